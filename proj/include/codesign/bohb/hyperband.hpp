#pragma once

#include <string>
#include <vector>

namespace codesign::bohb {

/// Outer-loop optimizer parameters. Budgets are in evaluator units
/// (inner-loop episodes for task scoring, grid refinement for the
/// manipulability heuristic); the defaults mirror the published setup.
struct BohbConfig {
  double eta = 3.0;               // successive-halving reduction factor
  double b_min = 300000;          // minimum budget
  double b_max = 1000000;         // maximum budget
  double random_fraction = 1.0 / 3.0;
  int iterations = 20;            // bracket sweeps
  int max_sampled_designs = 60;   // fresh suggestions, promotions excluded
  double gamma = 0.15;            // good/bad split quantile
  int ei_candidates = 64;         // samples from the good model per suggestion
  int min_observations = 7;       // dimension + 1 before the model engages
  std::string budget_unit = "episodes";
  /// Bandwidth multiplier for drawing EI candidates from the good model;
  /// densities are evaluated unwidened.
  double sample_widening = 2.2;
  /// Off by default: histories stay byte-reproducible across runs. Enable
  /// for profiling; resumed runs then keep the original timings.
  bool record_wall_time = false;

  void validate() const;  // throws ConfigInvalid
};

struct Rung {
  double budget = 0.0;
  int n_configs = 0;
};

/// One successive-halving bracket: n_0 configs at the lowest rung budget,
/// the top floor(n/eta) promoted to each subsequent rung.
struct Bracket {
  int index = 0;  // s, from s_max down to 0
  std::vector<Rung> rungs;
};

/// Standard bracket geometry: s_max = floor(log_eta(b_max/b_min)); bracket s
/// starts ceil((s_max+1)/(s+1) * eta^s) configs at budget b_max * eta^-s.
std::vector<Bracket> make_brackets(const BohbConfig& config);

/// floor(n / eta) survivors of a rung of n configs.
int halving_count(int n, double eta);

}  // namespace codesign::bohb
