#include "codesign/orch/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "codesign/common/errors.hpp"
#include "codesign/common/kvdoc.hpp"

namespace codesign::orch {

namespace {

std::vector<sim::TaskId> parse_task_list(const KvEntry& doc, const std::string& key,
                                         const std::vector<sim::TaskId>& fallback) {
  const KvEntry* e = doc.find(key);
  if (!e) return fallback;
  std::vector<sim::TaskId> tasks;
  for (const auto& tok : e->tokens()) tasks.push_back(sim::task_from_string(tok));
  if (tasks.empty()) throw ConfigInvalid("task list '" + key + "' is empty");
  return tasks;
}

std::string task_list_string(const std::vector<sim::TaskId>& tasks) {
  std::string out;
  for (const auto& t : tasks) {
    if (!out.empty()) out += " ";
    out += sim::to_string(t);
  }
  return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  const KvEntry doc = load_kvdoc(path);
  ExperimentConfig config;
  config.robot_file = doc.get_string("robot");
  const std::string mode = doc.get_string("mode", "task");
  if (mode == "task")
    config.mode = ScoringMode::task;
  else if (mode == "manipulability")
    config.mode = ScoringMode::manipulability;
  else
    throw ConfigInvalid("unknown scoring mode '" + mode + "'");
  config.seed = static_cast<std::uint64_t>(doc.get_number("seed", 1));
  config.output_dir = doc.get_string("output_dir", "out");
  config.train_tasks = parse_task_list(doc, "train_tasks", config.train_tasks);
  config.val_tasks = parse_task_list(doc, "val_tasks", config.val_tasks);
  config.test_tasks = parse_task_list(doc, "test_tasks", config.test_tasks);
  config.test_episodes = static_cast<int>(doc.get_number("test_episodes", config.test_episodes));
  config.top_designs = static_cast<int>(doc.get_number("top_designs", config.top_designs));

  if (const KvEntry* b = doc.find("bohb")) {
    config.bohb.eta = b->get_number("eta", config.bohb.eta);
    config.bohb.b_min = b->get_number("b_min", config.bohb.b_min);
    config.bohb.b_max = b->get_number("b_max", config.bohb.b_max);
    config.bohb.random_fraction = b->get_number("random_fraction", config.bohb.random_fraction);
    config.bohb.iterations = static_cast<int>(b->get_number("iterations", config.bohb.iterations));
    config.bohb.max_sampled_designs =
        static_cast<int>(b->get_number("max_sampled_designs", config.bohb.max_sampled_designs));
    config.bohb.gamma = b->get_number("gamma", config.bohb.gamma);
    config.bohb.ei_candidates =
        static_cast<int>(b->get_number("ei_candidates", config.bohb.ei_candidates));
    config.bohb.min_observations =
        static_cast<int>(b->get_number("min_observations", config.bohb.min_observations));
    config.bohb.sample_widening = b->get_number("sample_widening", config.bohb.sample_widening);
    config.bohb.record_wall_time = b->get_bool("record_wall_time", config.bohb.record_wall_time);
  }
  if (const KvEntry* s = doc.find("scoring")) {
    config.scoring.val_episodes =
        static_cast<int>(s->get_number("val_episodes", config.scoring.val_episodes));
    config.scoring.tuner.population =
        static_cast<int>(s->get_number("population", config.scoring.tuner.population));
    auto& sampler = config.scoring.tuner.sampler;
    sampler.horizon = static_cast<int>(s->get_number("horizon", sampler.horizon));
    sampler.obstacle_spacing = s->get_number("obstacle_spacing", sampler.obstacle_spacing);
    sampler.obstacle_size = s->get_number("obstacle_size", sampler.obstacle_size);
    sampler.max_trans_err = s->get_number("max_trans_err", sampler.max_trans_err);
    sampler.max_rot_err = s->get_number("max_rot_err", sampler.max_rot_err);
    sampler.goal_height_min = s->get_number("goal_height_min", sampler.goal_height_min);
    sampler.goal_height_max = s->get_number("goal_height_max", sampler.goal_height_max);
    sampler.drawer_height_min = s->get_number("drawer_height_min", sampler.drawer_height_min);
    sampler.drawer_height_max = s->get_number("drawer_height_max", sampler.drawer_height_max);
    sampler.cabinet_height_min = s->get_number("cabinet_height_min", sampler.cabinet_height_min);
    sampler.cabinet_height_max = s->get_number("cabinet_height_max", sampler.cabinet_height_max);
    sampler.edge_band = s->get_number("edge_band", sampler.edge_band);
    sampler.door_gap = s->get_number("door_gap", sampler.door_gap);
    sampler.door_radius = s->get_number("door_radius", sampler.door_radius);
    sampler.drawer_pull = s->get_number("drawer_pull", sampler.drawer_pull);
    sampler.cabinet_radius = s->get_number("cabinet_radius", sampler.cabinet_radius);
    sampler.ee_speed = s->get_number("ee_speed", sampler.ee_speed);
    sampler.anchor_height = s->get_number("anchor_height", sampler.anchor_height);
    sampler.insert_path_obstacle =
        s->get_bool("insert_path_obstacle", sampler.insert_path_obstacle);
  }
  if (const KvEntry* m = doc.find("manipulability")) {
    config.flat_manipulability = m->get_bool("flat", config.flat_manipulability);
    config.manip_spacing_coarse = m->get_number("spacing_coarse", config.manip_spacing_coarse);
    config.manip_spacing_fine = m->get_number("spacing_fine", config.manip_spacing_fine);
  }
  config.scoring.train_tasks = config.train_tasks;
  config.scoring.val_tasks = config.val_tasks;
  config.bohb.validate();
  return config;
}

void ExperimentConfig::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config file: " + path);
  char buf[128];
  out << "robot: " << robot_file << "\n";
  out << "mode: " << (mode == ScoringMode::task ? "task" : "manipulability") << "\n";
  out << "seed: " << seed << "\n";
  out << "output_dir: " << output_dir << "\n";
  out << "train_tasks: " << task_list_string(train_tasks) << "\n";
  out << "val_tasks: " << task_list_string(val_tasks) << "\n";
  out << "test_tasks: " << task_list_string(test_tasks) << "\n";
  out << "test_episodes: " << test_episodes << "\n";
  out << "top_designs: " << top_designs << "\n";
  out << "bohb {\n";
  std::snprintf(buf, sizeof(buf), "  eta: %.17g\n", bohb.eta);
  out << buf;
  std::snprintf(buf, sizeof(buf), "  b_min: %.17g\n", bohb.b_min);
  out << buf;
  std::snprintf(buf, sizeof(buf), "  b_max: %.17g\n", bohb.b_max);
  out << buf;
  std::snprintf(buf, sizeof(buf), "  random_fraction: %.17g\n", bohb.random_fraction);
  out << buf;
  out << "  iterations: " << bohb.iterations << "\n";
  out << "  max_sampled_designs: " << bohb.max_sampled_designs << "\n";
  std::snprintf(buf, sizeof(buf), "  gamma: %.17g\n", bohb.gamma);
  out << buf;
  out << "  ei_candidates: " << bohb.ei_candidates << "\n";
  out << "  min_observations: " << bohb.min_observations << "\n";
  std::snprintf(buf, sizeof(buf), "  sample_widening: %.17g\n", bohb.sample_widening);
  out << buf;
  out << "  record_wall_time: " << (bohb.record_wall_time ? "true" : "false") << "\n";
  out << "}\n";
  out << "scoring {\n";
  out << "  val_episodes: " << scoring.val_episodes << "\n";
  out << "  population: " << scoring.tuner.population << "\n";
  const auto& sampler = scoring.tuner.sampler;
  out << "  horizon: " << sampler.horizon << "\n";
  auto put = [&](const char* key, double v) {
    std::snprintf(buf, sizeof(buf), "  %s: %.17g\n", key, v);
    out << buf;
  };
  put("obstacle_spacing", sampler.obstacle_spacing);
  put("obstacle_size", sampler.obstacle_size);
  put("max_trans_err", sampler.max_trans_err);
  put("max_rot_err", sampler.max_rot_err);
  put("goal_height_min", sampler.goal_height_min);
  put("goal_height_max", sampler.goal_height_max);
  put("drawer_height_min", sampler.drawer_height_min);
  put("drawer_height_max", sampler.drawer_height_max);
  put("cabinet_height_min", sampler.cabinet_height_min);
  put("cabinet_height_max", sampler.cabinet_height_max);
  put("edge_band", sampler.edge_band);
  put("door_gap", sampler.door_gap);
  put("door_radius", sampler.door_radius);
  put("drawer_pull", sampler.drawer_pull);
  put("cabinet_radius", sampler.cabinet_radius);
  put("ee_speed", sampler.ee_speed);
  put("anchor_height", sampler.anchor_height);
  out << "  insert_path_obstacle: " << (sampler.insert_path_obstacle ? "true" : "false")
      << "\n";
  out << "}\n";
  out << "manipulability {\n";
  out << "  flat: " << (flat_manipulability ? "true" : "false") << "\n";
  std::snprintf(buf, sizeof(buf), "  spacing_coarse: %.17g\n", manip_spacing_coarse);
  out << buf;
  std::snprintf(buf, sizeof(buf), "  spacing_fine: %.17g\n", manip_spacing_fine);
  out << buf;
  out << "}\n";
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw DegenerateInput("pearson needs two equal-length samples of size >= 2");
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) throw DegenerateInput("pearson needs nonzero variance");
  return sxy / std::sqrt(sxx * syy);
}

std::pair<double, double> success_percent(int successes, int episodes) {
  if (episodes <= 0) return {0.0, 0.0};
  const double p = static_cast<double>(successes) / static_cast<double>(episodes);
  return {100.0 * p, 100.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(episodes))};
}

double manip_spacing_for_budget(double budget, const ExperimentConfig& config) {
  if (config.flat_manipulability) return config.manip_spacing_fine;
  if (config.bohb.b_max <= config.bohb.b_min) return config.manip_spacing_fine;
  const double f = std::clamp(std::log(budget / config.bohb.b_min) /
                                  std::log(config.bohb.b_max / config.bohb.b_min),
                              0.0, 1.0);
  // coarse at b_min, fine at b_max; eta=3 rungs give {coarse, 2/3 coarse, fine}.
  const double spacing = config.manip_spacing_coarse / (1.0 + f);
  return std::max(spacing, config.manip_spacing_fine);
}

namespace {

struct BinRate {
  double percent = 0.0;
  double se = 0.0;
};

BinRate binomial_percent(double rate, int n) {
  BinRate out;
  out.percent = 100.0 * rate;
  if (n > 0) out.se = 100.0 * std::sqrt(rate * (1.0 - rate) / static_cast<double>(n));
  return out;
}

/// Rebuilds report rows from the tests records (labels from provenance).
std::vector<RankedDesign> rows_from_tests(const std::vector<bohb::EvaluationRecord>& tests) {
  std::vector<RankedDesign> rows;
  for (const auto& r : tests) {
    RankedDesign row;
    row.label = r.provenance == "baseline" ? "tabletop" : "design-" + std::to_string(r.sequence);
    row.omega = r.omega;
    row.opt_score = r.score;
    row.test_rates = r.per_task;
    row.episodes_per_task = r.episodes_per_task;
    row.mu = r.per_task.count("__mu") ? r.per_task.at("__mu") : 0.0;
    row.test_rates.erase("__mu");
    row.feasible = r.feasible;
    double sum = 0.0;
    for (const auto& [task, rate] : row.test_rates) sum += rate;
    row.mean_test_rate =
        row.test_rates.empty() ? 0.0 : sum / static_cast<double>(row.test_rates.size());
    rows.push_back(row);
  }
  return rows;
}

void write_report_files(const std::vector<RankedDesign>& rows, std::optional<double> r,
                        const std::string& output_dir) {
  std::filesystem::create_directories(output_dir);
  // Column set: union of task names, sorted.
  std::vector<std::string> tasks;
  for (const auto& row : rows)
    for (const auto& [task, rate] : row.test_rates)
      if (std::find(tasks.begin(), tasks.end(), task) == tasks.end()) tasks.push_back(task);
  std::sort(tasks.begin(), tasks.end());

  char buf[160];
  {
    std::ofstream csv(output_dir + "/report.csv");
    if (!csv) throw IoError("cannot write report.csv");
    csv << "label";
    for (const auto& name : model::design_dim_names()) csv << "," << name;
    csv << ",opt_score";
    for (const auto& task : tasks) csv << "," << task << "_pct," << task << "_se";
    csv << ",average_pct,average_se,manipulability,feasible\n";
    for (const auto& row : rows) {
      csv << row.label;
      for (double v : row.omega.as_array()) {
        std::snprintf(buf, sizeof(buf), ",%.17g", v);
        csv << buf;
      }
      std::snprintf(buf, sizeof(buf), ",%.17g", row.opt_score);
      csv << buf;
      int total_n = 0;
      double rate_sum = 0.0;
      for (const auto& task : tasks) {
        if (row.test_rates.count(task)) {
          const BinRate br = binomial_percent(row.test_rates.at(task), row.episodes_per_task);
          std::snprintf(buf, sizeof(buf), ",%.1f,%.1f", br.percent, br.se);
          csv << buf;
          total_n += row.episodes_per_task;
          rate_sum += row.test_rates.at(task) * row.episodes_per_task;
        } else {
          csv << ",,";
        }
      }
      const double avg = total_n > 0 ? rate_sum / total_n : 0.0;
      const BinRate avg_br = binomial_percent(avg, total_n);
      std::snprintf(buf, sizeof(buf), ",%.1f,%.1f,%.17g,%d\n", 100.0 * row.mean_test_rate,
                    avg_br.se, row.mu, row.feasible ? 1 : 0);
      csv << buf;
    }
    if (r) {
      std::snprintf(buf, sizeof(buf), "# pearson_mu_success,%.17g\n", *r);
      csv << buf;
    }
  }
  {
    std::ofstream txt(output_dir + "/report.txt");
    if (!txt) throw IoError("cannot write report.txt");
    std::snprintf(buf, sizeof(buf), "%-14s %-9s", "model", "score");
    txt << buf;
    for (const auto& task : tasks) {
      std::snprintf(buf, sizeof(buf), " %-16s", task.c_str());
      txt << buf;
    }
    txt << " average        manipulability\n";
    for (const auto& row : rows) {
      std::snprintf(buf, sizeof(buf), "%-14s %-9.4f", row.label.c_str(), row.opt_score);
      txt << buf;
      for (const auto& task : tasks) {
        if (row.test_rates.count(task)) {
          const BinRate br = binomial_percent(row.test_rates.at(task), row.episodes_per_task);
          std::snprintf(buf, sizeof(buf), " %5.1f +- %-6.1f", br.percent, br.se);
          txt << buf;
        } else {
          std::snprintf(buf, sizeof(buf), " %-16s", "-");
          txt << buf;
        }
      }
      const BinRate avg = binomial_percent(
          row.mean_test_rate,
          row.episodes_per_task * static_cast<int>(row.test_rates.size()));
      std::snprintf(buf, sizeof(buf), " %5.1f +- %-5.1f %10.4f\n", avg.percent, avg.se, row.mu);
      txt << buf;
    }
    if (r) {
      std::snprintf(buf, sizeof(buf), "pearson(manipulability, success) = %.4f\n", *r);
      txt << buf;
    }
  }
}

std::optional<double> correlation_of_rows(const std::vector<RankedDesign>& rows) {
  std::vector<double> mus, rates;
  for (const auto& row : rows) {
    mus.push_back(row.mu);
    rates.push_back(row.mean_test_rate);
  }
  if (mus.size() < 2) return std::nullopt;
  try {
    return pearson(mus, rates);
  } catch (const DegenerateInput&) {
    return std::nullopt;
  }
}

}  // namespace

RankingReport run_experiment(const ExperimentConfig& config) {
  const model::RobotDescription robot = model::load_robot(config.robot_file);
  const model::DesignSpace space;
  std::filesystem::create_directories(config.output_dir);
  config.write(config.output_dir + "/config_resolved.cfg");

  RankingReport report;
  report.history_file = config.output_dir + "/history.jsonl";
  report.tests_file = config.output_dir + "/tests.jsonl";

  // Fresh run unless a resume preloaded records into the file already.
  std::vector<bohb::EvaluationRecord> preload;
  if (std::filesystem::exists(report.history_file)) {
    preload = bohb::load_history(report.history_file);
    if (preload.empty()) std::filesystem::remove(report.history_file);
  }

  ctrl::ScoreConfig scoring = config.scoring;
  scoring.train_tasks = config.train_tasks;
  scoring.val_tasks = config.val_tasks;

  bohb::Evaluator evaluator;
  if (config.mode == ScoringMode::task) {
    evaluator = [&](const model::DesignParams& omega, double budget,
                    std::uint64_t seed) -> bohb::EvalResult {
      const ctrl::DesignScore score =
          ctrl::score_design(robot, omega, static_cast<int>(std::lround(budget)), seed, scoring);
      bohb::EvalResult result;
      result.score = score.score;
      result.per_task = score.per_task;
      result.feasible = score.feasible;
      result.gains = score.gains.to_map();
      result.episodes_per_task = score.episodes_per_task;
      return result;
    };
  } else {
    evaluator = [&](const model::DesignParams& omega, double budget,
                    std::uint64_t seed) -> bohb::EvalResult {
      bohb::EvalResult result;
      const feas::FeasibilityReport feasibility = feas::check_design(robot, omega);
      if (!feasibility.statically_stable || !feasibility.dynamically_stable) {
        result.feasible = false;
        result.score = 0.0;
        return result;
      }
      manip::WorkspaceGrid grid;
      grid.spacing = manip_spacing_for_budget(budget, config);
      const model::RobotDescription designed = model::apply_design(robot, omega);
      const manip::ManipField field = manip::global_manipulability(designed, grid, seed);
      result.score = field.mu;
      return result;
    };
  }

  bohb::Optimizer optimizer(space, config.bohb, evaluator, [&](const bohb::EvaluationRecord& r) {
    bohb::append_record(report.history_file, r);
  });
  if (!preload.empty()) optimizer.preload(std::move(preload));
  const bohb::OptimizeOutcome outcome = optimizer.run(config.seed);

  // Top designs at the maximum achieved budget, deduplicated by design point.
  double max_budget = 0.0;
  for (const auto& r : outcome.history) max_budget = std::max(max_budget, r.budget);
  std::vector<bohb::EvaluationRecord> finalists;
  for (const auto& r : outcome.history) {
    if (r.budget != max_budget || !r.feasible) continue;
    bool duplicate = false;
    for (auto& f : finalists) {
      if (f.omega == r.omega) {
        duplicate = true;
        if (r.score > f.score) f = r;
        break;
      }
    }
    if (!duplicate) finalists.push_back(r);
  }
  std::stable_sort(finalists.begin(), finalists.end(),
                   [](const auto& a, const auto& b) { return a.score > b.score; });
  if (static_cast<int>(finalists.size()) > config.top_designs)
    finalists.resize(static_cast<std::size_t>(config.top_designs));

  // The tabletop baseline always appears in the report, scored through the
  // same evaluator at the same budget as the finalists.
  bohb::EvaluationRecord baseline;
  baseline.omega = model::DesignParams::tabletop();
  baseline.unit = model::encode_unit(baseline.omega, space);
  baseline.budget = max_budget;
  baseline.provenance = "baseline";
  baseline.sequence = -1;
  {
    const bohb::EvalResult result =
        evaluator(baseline.omega, max_budget, seed_mix(config.seed, 0x7AB1E70BULL));
    baseline.score = result.score;
    baseline.feasible = result.feasible;
    baseline.gains = result.gains;
  }
  finalists.push_back(baseline);

  // Test evaluation: tune on the training tasks with the full budget, then
  // fresh episodes per test task; manipulability of the applied design.
  std::filesystem::remove(report.tests_file);
  const int tune_budget = std::max(scoring.tuner.population,
                                   static_cast<int>(std::lround(max_budget)));
  for (auto& record : finalists) {
    bohb::EvaluationRecord test = record;
    test.provenance = record.provenance == "baseline" ? "baseline" : "test";
    test.per_task.clear();
    test.episodes_per_task = config.test_episodes;
    // test.score keeps the optimizer score; test rates live in per_task.

    const feas::FeasibilityReport feasibility = feas::check_design(robot, record.omega);
    test.feasible = feasibility.statically_stable && feasibility.dynamically_stable;
    double mu = 0.0;
    if (test.feasible) {
      const model::RobotDescription designed = model::apply_design(robot, record.omega);
      const ctrl::TunedPolicy tuned =
          ctrl::tune_policy(designed, config.train_tasks, tune_budget,
                            seed_mix(config.seed, 0x7E57ULL), scoring.tuner);
      test.gains = tuned.gains.to_map();
      for (std::size_t t = 0; t < config.test_tasks.size(); ++t) {
        const double rate = ctrl::evaluate_gains(
            designed, tuned.gains, config.test_tasks[t], config.test_episodes,
            seed_mix(config.seed, 0xBEEF00ULL + t), scoring.tuner.sampler, scoring.tuner.sim);
        test.per_task[sim::to_string(config.test_tasks[t])] = rate;
      }

      manip::WorkspaceGrid grid;
      grid.spacing = config.manip_spacing_fine;
      mu = manip::global_manipulability(designed, grid, config.seed).mu;
    } else {
      for (const auto task : config.test_tasks) test.per_task[sim::to_string(task)] = 0.0;
    }
    test.per_task["__mu"] = mu;
    bohb::append_record(report.tests_file, test);
  }

  const auto tests = bohb::load_history(report.tests_file);
  report.designs = rows_from_tests(tests);
  report.pearson_r = correlation_of_rows(report.designs);
  write_report_files(report.designs, report.pearson_r, config.output_dir);
  return report;
}

bool regenerate_report(const std::string& history_file, const std::string& tests_file,
                       const std::string& output_dir) {
  const auto history = bohb::load_history(history_file);
  if (history.empty()) return false;
  const auto tests = bohb::load_history(tests_file);
  const auto rows = rows_from_tests(tests);
  write_report_files(rows, correlation_of_rows(rows), output_dir);
  return true;
}

}  // namespace codesign::orch
