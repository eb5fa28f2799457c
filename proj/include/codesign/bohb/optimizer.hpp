#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "codesign/bohb/hyperband.hpp"
#include "codesign/bohb/kde.hpp"
#include "codesign/model/design.hpp"

namespace codesign::bohb {

/// One persisted evaluation: the unit the optimizer reasons about and the
/// unit of the JSONL history.
struct EvaluationRecord {
  int sequence = 0;                       // insertion order
  model::DesignParams omega;
  Eigen::Matrix<double, 6, 1> unit = Eigen::Matrix<double, 6, 1>::Zero();
  double budget = 0.0;
  std::uint64_t seed = 0;
  double score = 0.0;
  std::map<std::string, double> per_task;  // task -> success rate
  bool feasible = true;
  std::map<std::string, double> gains;     // tuned controller gains
  int episodes_per_task = 0;
  double wall_time_s = 0.0;                // 0 unless wall-time recording is on
  std::string provenance = "random";       // random | model | promoted

  std::string to_json_line() const;
  static EvaluationRecord from_json_line(const std::string& line);
};

struct EvalResult {
  double score = 0.0;
  std::map<std::string, double> per_task;
  bool feasible = true;
  std::map<std::string, double> gains;
  int episodes_per_task = 0;
};

using Evaluator =
    std::function<EvalResult(const model::DesignParams& omega, double budget, std::uint64_t seed)>;
/// Called after every completed evaluation (history append + flush).
using RecordSink = std::function<void(const EvaluationRecord&)>;

struct OptimizeOutcome {
  EvaluationRecord best;                   // argmax score at the largest budget
  std::vector<EvaluationRecord> history;   // complete, in evaluation order
};

/// TPE suggestion over the unit cube given the history: a uniform point with
/// probability random_fraction (or with too little data), otherwise the
/// argmax of l(u)/g(u) over ei_candidates draws from the good model fitted
/// at the largest budget with at least min_observations observations.
/// Returns the point and its provenance tag.
std::pair<Eigen::Matrix<double, 6, 1>, std::string> suggest(
    const std::vector<EvaluationRecord>& history, const BohbConfig& config, Rng& rng);

/// Hyperband outer loop over a design-space evaluator. Serial and
/// deterministic: a fixed seed reproduces the identical history.
class Optimizer {
 public:
  Optimizer(model::DesignSpace space, BohbConfig config, Evaluator evaluator,
            RecordSink sink = nullptr);

  /// Replays these records instead of re-evaluating (resume support). They
  /// must come from a run with the same seed and configuration.
  void preload(std::vector<EvaluationRecord> records);

  OptimizeOutcome run(std::uint64_t seed);

 private:
  EvaluationRecord evaluate(const model::DesignParams& omega,
                            const Eigen::Matrix<double, 6, 1>& unit, double budget,
                            std::uint64_t seed, const std::string& provenance);

  model::DesignSpace space_;
  BohbConfig config_;
  Evaluator evaluator_;
  RecordSink sink_;
  std::vector<EvaluationRecord> history_;
  std::vector<EvaluationRecord> replay_;
  std::size_t replay_cursor_ = 0;
  int sampled_ = 0;
};

/// JSONL history persistence; load throws ParseError on malformed lines.
void append_record(const std::string& path, const EvaluationRecord& record);
std::vector<EvaluationRecord> load_history(const std::string& path);

}  // namespace codesign::bohb
