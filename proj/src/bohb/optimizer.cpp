#include "codesign/bohb/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <chrono>
#include <fstream>

#include "json.hpp"

#include "codesign/common/errors.hpp"

namespace codesign::bohb {

using nlohmann::json;

std::string EvaluationRecord::to_json_line() const {
  json j;
  j["sequence"] = sequence;
  const auto v = omega.as_array();
  json omega_j;
  for (std::size_t d = 0; d < 6; ++d) omega_j[model::design_dim_names()[d]] = v[d];
  j["omega"] = omega_j;
  j["unit"] = std::vector<double>(unit.data(), unit.data() + 6);
  j["budget"] = budget;
  j["seed"] = seed;
  j["score"] = score;
  j["per_task"] = per_task;
  j["feasible"] = feasible;
  j["gains"] = gains;
  j["episodes_per_task"] = episodes_per_task;
  j["wall_time_s"] = wall_time_s;
  j["provenance"] = provenance;
  return j.dump();
}

EvaluationRecord EvaluationRecord::from_json_line(const std::string& line) {
  EvaluationRecord r;
  json j = json::parse(line);
  r.sequence = j.at("sequence").get<int>();
  const json& omega_j = j.at("omega");
  std::array<double, 6> v{};
  for (std::size_t d = 0; d < 6; ++d) v[d] = omega_j.at(model::design_dim_names()[d]).get<double>();
  r.omega = model::DesignParams{v[0], v[1], v[2], v[3], v[4], v[5]};
  const auto unit = j.at("unit").get<std::vector<double>>();
  if (unit.size() != 6) throw ParseError("unit vector must have 6 entries", 0, "unit");
  for (int d = 0; d < 6; ++d) r.unit[d] = unit[static_cast<std::size_t>(d)];
  r.budget = j.at("budget").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.score = j.at("score").get<double>();
  r.per_task = j.at("per_task").get<std::map<std::string, double>>();
  r.feasible = j.at("feasible").get<bool>();
  r.gains = j.at("gains").get<std::map<std::string, double>>();
  r.episodes_per_task = j.value("episodes_per_task", 0);
  r.wall_time_s = j.value("wall_time_s", 0.0);
  r.provenance = j.at("provenance").get<std::string>();
  return r;
}

void append_record(const std::string& path, const EvaluationRecord& record) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot open history file for append: " + path);
  out << record.to_json_line() << "\n";
  out.flush();
  if (!out) throw IoError("failed writing history file: " + path);
}

std::vector<EvaluationRecord> load_history(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open history file: " + path);
  std::vector<EvaluationRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(EvaluationRecord::from_json_line(line));
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad history record: ") + e.what(), line_no);
    }
  }
  return records;
}

std::pair<Eigen::Matrix<double, 6, 1>, std::string> suggest(
    const std::vector<EvaluationRecord>& history, const BohbConfig& config, Rng& rng) {
  Eigen::Matrix<double, 6, 1> u;
  // The random fraction draw happens first so the rng stream is identical
  // whether or not the model path is available.
  const bool forced_random = rng.uniform() < config.random_fraction;

  // Observations at the largest budget with enough of them.
  std::vector<double> budgets;
  for (const auto& r : history) budgets.push_back(r.budget);
  std::sort(budgets.begin(), budgets.end(), std::greater<double>());
  budgets.erase(std::unique(budgets.begin(), budgets.end()), budgets.end());
  std::vector<Eigen::VectorXd> points;
  std::vector<double> scores;
  for (double b : budgets) {
    points.clear();
    scores.clear();
    for (const auto& r : history) {
      if (r.budget != b) continue;
      // Deduplicate repeated units (promotions re-evaluate the same point);
      // keep the best score so the copy carries no extra density mass.
      bool duplicate = false;
      for (std::size_t k = 0; k < points.size(); ++k) {
        if ((points[k] - r.unit).cwiseAbs().maxCoeff() < 1e-12) {
          scores[k] = std::max(scores[k], r.score);
          duplicate = true;
          break;
        }
      }
      if (!duplicate) {
        points.push_back(r.unit);
        scores.push_back(r.score);
      }
    }
    if (points.size() >= static_cast<std::size_t>(config.min_observations)) break;
  }

  if (forced_random || points.size() < static_cast<std::size_t>(config.min_observations)) {
    for (int d = 0; d < 6; ++d) u[d] = rng.uniform();
    return {u, "random"};
  }

  const DensityPair pair =
      fit_density_pair(points, scores, config.gamma,
                       static_cast<std::size_t>(config.min_observations) - 1, 1e-3, true);
  // Tree-structured selection: the product model factorizes, so the joint
  // candidate budget spreads over dimensions as its sixth root (64 joint
  // candidates = best-of-2 per dimension). Candidates come from the widened
  // good marginal; the winner maximizes the marginal ratio l/g. A novelty
  // check rejects suggestions that essentially repeat an existing
  // observation, which would otherwise pin the argmax to one point.
  const int per_dim = std::max(
      1, static_cast<int>(std::lround(std::pow(static_cast<double>(config.ei_candidates),
                                               1.0 / 6.0))));
  for (int attempt = 0; attempt < 10; ++attempt) {
    for (int d = 0; d < 6; ++d) {
      double best = 0.5;
      double best_ratio = -std::numeric_limits<double>::infinity();
      for (int c = 0; c < per_dim; ++c) {
        const double candidate = pair.good.sample_dim(d, rng, config.sample_widening);
        const double ratio = pair.good.log_density_dim(d, candidate) -
                             pair.bad.log_density_dim(d, candidate);
        if (ratio > best_ratio) {
          best_ratio = ratio;
          best = candidate;
        }
      }
      u[d] = best;
    }
    double min_dist = std::numeric_limits<double>::infinity();
    for (const auto& r : history)
      min_dist = std::min(min_dist, (r.unit - u).cwiseAbs().maxCoeff());
    if (min_dist > 0.02) break;
  }
  return {u, "model"};
}

Optimizer::Optimizer(model::DesignSpace space, BohbConfig config, Evaluator evaluator,
                     RecordSink sink)
    : space_(std::move(space)),
      config_(std::move(config)),
      evaluator_(std::move(evaluator)),
      sink_(std::move(sink)) {
  config_.validate();
}

void Optimizer::preload(std::vector<EvaluationRecord> records) {
  replay_ = std::move(records);
  std::sort(replay_.begin(), replay_.end(),
            [](const EvaluationRecord& a, const EvaluationRecord& b) {
              return a.sequence < b.sequence;
            });
  replay_cursor_ = 0;
}

EvaluationRecord Optimizer::evaluate(const model::DesignParams& omega,
                                     const Eigen::Matrix<double, 6, 1>& unit, double budget,
                                     std::uint64_t seed, const std::string& provenance) {
  EvaluationRecord record;
  bool replayed = false;
  if (replay_cursor_ < replay_.size()) {
    // Resume path: take the recorded result instead of re-evaluating, after
    // checking it matches what the schedule asks for.
    record = replay_[replay_cursor_];
    if ((record.unit - unit).cwiseAbs().maxCoeff() > 1e-12 ||
        std::abs(record.budget - budget) > 1e-9 || record.seed != seed)
      throw ConfigInvalid("history does not replay this run: record " +
                          std::to_string(record.sequence) +
                          " disagrees with the schedule (wrong seed or config?)");
    ++replay_cursor_;
    record.sequence = static_cast<int>(history_.size());
    replayed = true;
  } else {
    const auto t0 = std::chrono::steady_clock::now();
    const EvalResult result = evaluator_(omega, budget, seed);
    record.sequence = static_cast<int>(history_.size());
    record.omega = omega;
    record.unit = unit;
    record.budget = budget;
    record.seed = seed;
    record.score = result.score;
    record.per_task = result.per_task;
    record.feasible = result.feasible;
    record.gains = result.gains;
    record.episodes_per_task = result.episodes_per_task;
    record.provenance = provenance;
    if (config_.record_wall_time)
      record.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  history_.push_back(record);
  // Replayed records are already in the persisted history; only fresh
  // evaluations are appended, so a resumed file ends up identical to an
  // uninterrupted run.
  if (sink_ && !replayed) sink_(record);
  return record;
}

OptimizeOutcome Optimizer::run(std::uint64_t seed) {
  Rng rng(seed);
  const auto brackets = make_brackets(config_);
  sampled_ = 0;
  history_.clear();

  bool stop = false;
  for (int sweep = 0; sweep < config_.iterations && !stop; ++sweep) {
    for (const auto& bracket : brackets) {
      if (stop) break;
      // Fill the first rung with fresh suggestions.
      std::vector<EvaluationRecord> rung_records;
      const Rung& first = bracket.rungs.front();
      for (int i = 0; i < first.n_configs; ++i) {
        if (sampled_ >= config_.max_sampled_designs) {
          stop = true;
          break;
        }
        auto [unit, provenance] = suggest(history_, config_, rng);
        const model::DesignParams omega = model::decode_unit(unit, space_);
        const std::uint64_t eval_seed = rng.next_u64();
        rung_records.push_back(evaluate(omega, unit, first.budget, eval_seed, provenance));
        ++sampled_;
      }
      if (stop) break;  // an interrupted rung is not promoted

      // Successive halving: re-evaluate the top configs at each next rung.
      for (std::size_t r = 1; r < bracket.rungs.size(); ++r) {
        const Rung& rung = bracket.rungs[r];
        std::stable_sort(rung_records.begin(), rung_records.end(),
                         [](const EvaluationRecord& a, const EvaluationRecord& b) {
                           return a.score > b.score;
                         });
        const int survivors = std::min<int>(rung.n_configs, static_cast<int>(rung_records.size()));
        std::vector<EvaluationRecord> next;
        for (int i = 0; i < survivors; ++i) {
          const EvaluationRecord& parent = rung_records[static_cast<std::size_t>(i)];
          next.push_back(
              evaluate(parent.omega, parent.unit, rung.budget, parent.seed, "promoted"));
        }
        rung_records = std::move(next);
        if (rung_records.empty()) break;
      }
    }
  }

  OptimizeOutcome outcome;
  outcome.history = history_;
  if (!history_.empty()) {
    double max_budget = 0.0;
    for (const auto& r : history_) max_budget = std::max(max_budget, r.budget);
    const EvaluationRecord* best = nullptr;
    for (const auto& r : history_) {
      if (r.budget != max_budget) continue;
      if (!best || r.score > best->score) best = &r;  // ties keep the earliest
    }
    outcome.best = *best;
  }
  return outcome;
}

}  // namespace codesign::bohb
