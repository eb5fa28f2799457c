#include "codesign/bohb/hyperband.hpp"

#include <cmath>

#include "codesign/common/errors.hpp"

namespace codesign::bohb {

void BohbConfig::validate() const {
  if (eta < 2.0) throw ConfigInvalid("eta must be >= 2");
  if (!(b_min > 0.0) || b_min > b_max) throw ConfigInvalid("need 0 < b_min <= b_max");
  if (random_fraction < 0.0 || random_fraction > 1.0)
    throw ConfigInvalid("random fraction must lie in [0, 1]");
  if (gamma <= 0.0 || gamma >= 1.0) throw ConfigInvalid("gamma must lie in (0, 1)");
  if (iterations < 1 || max_sampled_designs < 1)
    throw ConfigInvalid("iterations and max sampled designs must be positive");
  if (ei_candidates < 1 || min_observations < 2)
    throw ConfigInvalid("ei candidates must be >= 1 and min observations >= 2");
}

int halving_count(int n, double eta) {
  return static_cast<int>(std::floor(static_cast<double>(n) / eta));
}

std::vector<Bracket> make_brackets(const BohbConfig& config) {
  config.validate();
  const int s_max =
      static_cast<int>(std::floor(std::log(config.b_max / config.b_min) / std::log(config.eta) +
                                  1e-9));
  std::vector<Bracket> brackets;
  for (int s = s_max; s >= 0; --s) {
    Bracket bracket;
    bracket.index = s;
    const double n0 =
        std::ceil(static_cast<double>(s_max + 1) / (s + 1) * std::pow(config.eta, s) - 1e-9);
    int n = static_cast<int>(n0);
    for (int i = 0; i <= s; ++i) {
      Rung rung;
      rung.budget = config.b_max * std::pow(config.eta, i - s);
      rung.n_configs = n;
      bracket.rungs.push_back(rung);
      n = halving_count(n, config.eta);
      if (n < 1 && i < s) break;  // nothing left to promote
    }
    brackets.push_back(bracket);
  }
  return brackets;
}

}  // namespace codesign::bohb
