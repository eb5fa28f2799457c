#pragma once

#include <optional>
#include <string>
#include <vector>

#include "codesign/bohb/optimizer.hpp"
#include "codesign/ctrl/controller.hpp"
#include "codesign/manip/manipulability.hpp"

namespace codesign::orch {

enum class ScoringMode { task, manipulability };

/// Everything one experiment run needs; parseable from a structured text
/// file and echoed back into the output directory for provenance.
struct ExperimentConfig {
  std::string robot_file;
  ScoringMode mode = ScoringMode::task;
  std::vector<sim::TaskId> train_tasks{sim::TaskId::RandomObstacle};
  std::vector<sim::TaskId> val_tasks{sim::TaskId::RandomGoal, sim::TaskId::Drawer};
  std::vector<sim::TaskId> test_tasks{sim::TaskId::RandomGoal, sim::TaskId::Drawer,
                                      sim::TaskId::Cabinet};
  bohb::BohbConfig bohb;
  ctrl::ScoreConfig scoring;       // tuner + validation episode counts
  int test_episodes = 50;          // per test task for the final report
  int top_designs = 3;             // designs promoted to the test evaluation
  bool flat_manipulability = false;  // full grid resolution at every budget
  double manip_spacing_coarse = 0.2;
  double manip_spacing_fine = 0.1;
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  static ExperimentConfig load(const std::string& path);
  void write(const std::string& path) const;
};

/// One reported design: scores at the maximum budget, test success rates and
/// the workspace manipulability of the applied design.
struct RankedDesign {
  std::string label;  // "design-<seq>" or "tabletop"
  model::DesignParams omega;
  double opt_score = 0.0;                      // optimizer score at max budget
  std::map<std::string, double> test_rates;    // task -> success rate
  double mean_test_rate = 0.0;
  int episodes_per_task = 0;
  double mu = 0.0;                             // global manipulability
  bool feasible = true;
};

struct RankingReport {
  std::vector<RankedDesign> designs;           // ordered by opt_score desc
  std::optional<double> pearson_r;             // mu vs mean success, if defined
  std::string history_file;
  std::string tests_file;
};

/// Sample Pearson correlation; throws DegenerateInput for n < 2 or zero
/// variance.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

/// Success percentage and its binomial standard error (both in percent),
/// as printed in the report: 30/100 -> 30 +- 4.6.
std::pair<double, double> success_percent(int successes, int episodes);

/// Budget -> grid spacing map for manipulability-mode evaluations:
/// spacing = coarse / (1 + f), f the log-position of the budget between
/// b_min and b_max (so eta=3 rungs give coarse, 2/3*coarse, fine).
double manip_spacing_for_budget(double budget, const ExperimentConfig& config);

/// Full experiment: optimize with the configured evaluator, evaluate the
/// top designs plus the tabletop baseline on the test tasks, compute mu per
/// reported design and the mu-success correlation, and persist everything
/// under output_dir (history.jsonl, tests.jsonl, report.csv, report.txt,
/// config_resolved.cfg).
RankingReport run_experiment(const ExperimentConfig& config);

/// Rebuilds the report files from the persisted histories alone.
/// Returns false when the history is empty (callers exit with code 3).
bool regenerate_report(const std::string& history_file, const std::string& tests_file,
                       const std::string& output_dir);

}  // namespace codesign::orch
