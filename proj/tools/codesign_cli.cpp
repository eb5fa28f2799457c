// Command-line entry point: design optimization, single-design evaluation,
// workspace manipulability, tipover feasibility and report regeneration.
#include <cstdio>
#include <filesystem>

#include "CLI11.hpp"

#include "codesign/common/errors.hpp"
#include "codesign/common/kvdoc.hpp"
#include "codesign/orch/experiment.hpp"

using namespace codesign;

namespace {

/// Designs come inline ("a,b,c,d,e,f", angles with optional deg/rad suffix)
/// or from a file with one `<dimension>: value` entry per line.
model::DesignParams parse_design(const std::string& inline_spec, const std::string& file) {
  if (!inline_spec.empty()) {
    std::string spec = inline_spec;
    for (auto& c : spec)
      if (c == ',') c = ' ';
    KvEntry entry;
    entry.value = spec;
    entry.line = 1;
    const auto v = entry.angles();
    if (v.size() != 6) throw BadParams("a design needs 6 comma-separated values");
    return model::DesignParams::make(v[0], v[1], v[2], v[3], v[4], v[5]);
  }
  if (!file.empty()) {
    const KvEntry doc = load_kvdoc(file);
    const auto& names = model::design_dim_names();
    return model::DesignParams::make(doc.get_angle(names[0], 0.0), doc.get_angle(names[1], 0.0),
                                     doc.get_angle(names[2], 0.0), doc.get_angle(names[3], 0.0),
                                     doc.get_angle(names[4], 0.0), doc.get_angle(names[5], 0.0));
  }
  return model::DesignParams::tabletop();
}

void print_feasibility(const feas::FeasibilityReport& report) {
  std::printf("com_xy:              (%.4f, %.4f) m\n", report.com_xy.x(), report.com_xy.y());
  std::printf("statically_stable:   %s (margin %.3f m)\n",
              report.statically_stable ? "yes" : "no", report.static_margin);
  std::printf("tau_critical:        %.2f N*m\n", report.tau_critical);
  std::printf("tau_grav:            %.2f N*m\n", report.tau_grav);
  std::printf("tau_acc:             %.2f N*m\n", report.tau_acc);
  if (report.external_torque > 0)
    std::printf("external_torque:     %.2f N*m\n", report.external_torque);
  std::printf("dynamically_stable:  %s (margin %.2f N*m)\n",
              report.dynamically_stable ? "yes" : "no", report.margin);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Arm-mounting co-design: BOHB outer loop over a kinematic task simulator"};
  app.require_subcommand(1);

  // optimize / resume
  std::string config_file, resume_file;
  bool flat = false;
  auto* optimize = app.add_subcommand("optimize", "run a design optimization experiment");
  optimize->add_option("--config", config_file, "experiment config file")->required();
  optimize->add_option("--resume", resume_file, "existing history.jsonl to continue from");
  optimize->add_flag("--flat", flat, "manipulability mode: full grid resolution at every budget");

  auto* resume = app.add_subcommand("resume", "continue an interrupted optimization");
  resume->add_option("--config", config_file, "experiment config file")->required();
  resume->add_option("--history", resume_file, "history.jsonl of the interrupted run")->required();

  // evaluate
  std::string robot_file, design_spec, design_file, task_list = "random_goal drawer";
  int episodes = 50;
  std::uint64_t seed = 1;
  int budget = 96;
  auto* evaluate = app.add_subcommand("evaluate", "tune and evaluate one design on tasks");
  evaluate->add_option("--robot", robot_file, "robot description file")->required();
  evaluate->add_option("--omega", design_spec, "inline design: alpha,beta,rho,x,y,phi");
  evaluate->add_option("--design", design_file, "design file");
  evaluate->add_option("--tasks", task_list, "space-separated task names");
  evaluate->add_option("--episodes", episodes, "episodes per task");
  evaluate->add_option("--budget", budget, "controller tuning budget in episodes");
  evaluate->add_option("--seed", seed, "random seed");

  // manipulability
  std::string out_csv = "heatmap.csv";
  double spacing = 0.1;
  auto* manip_cmd = app.add_subcommand("manipulability", "workspace-grid manipulability of a design");
  manip_cmd->add_option("--robot", robot_file, "robot description file")->required();
  manip_cmd->add_option("--omega", design_spec, "inline design");
  manip_cmd->add_option("--design", design_file, "design file");
  manip_cmd->add_option("--seed", seed, "random seed");
  manip_cmd->add_option("--spacing", spacing, "grid spacing in meters");
  manip_cmd->add_option("--out", out_csv, "heatmap csv path");

  // feasibility
  bool pull_torque = false;
  auto* feas_cmd = app.add_subcommand("feasibility", "tipover checks for a design");
  feas_cmd->add_option("--robot", robot_file, "robot description file")->required();
  feas_cmd->add_option("--omega", design_spec, "inline design");
  feas_cmd->add_option("--design", design_file, "design file");
  feas_cmd->add_flag("--pull-torque", pull_torque, "include the arm's external pull torque");

  // report
  std::string history_file, tests_file, out_dir = "out";
  auto* report_cmd = app.add_subcommand("report", "regenerate report files from histories");
  report_cmd->add_option("--history", history_file, "history.jsonl")->required();
  report_cmd->add_option("--tests", tests_file, "tests.jsonl")->required();
  report_cmd->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (optimize->parsed() || resume->parsed()) {
      orch::ExperimentConfig config = orch::ExperimentConfig::load(config_file);
      if (flat) config.flat_manipulability = true;
      std::filesystem::create_directories(config.output_dir);
      const std::string history_path = config.output_dir + "/history.jsonl";
      if (!resume_file.empty() && resume_file != history_path)
        std::filesystem::copy_file(resume_file, history_path,
                                   std::filesystem::copy_options::overwrite_existing);
      if (resume_file.empty() && std::filesystem::exists(history_path))
        std::filesystem::remove(history_path);
      orch::RankingReport report = orch::run_experiment(config);
      std::printf("designs reported: %zu\n", report.designs.size());
      for (const auto& d : report.designs)
        std::printf("  %-14s opt %.4f  test %.3f  mu %.4f\n", d.label.c_str(), d.opt_score,
                    d.mean_test_rate, d.mu);
      if (report.pearson_r)
        std::printf("pearson(mu, success) = %.4f\n", *report.pearson_r);
      std::printf("report written to %s\n", config.output_dir.c_str());
      return 0;
    }
    if (evaluate->parsed()) {
      const auto robot = model::load_robot(robot_file);
      const auto omega = parse_design(design_spec, design_file);
      ctrl::ScoreConfig scoring;
      scoring.train_tasks.clear();
      scoring.val_tasks.clear();
      KvEntry tasks_entry;
      tasks_entry.value = task_list;
      for (const auto& tok : tasks_entry.tokens())
        scoring.val_tasks.push_back(sim::task_from_string(tok));
      scoring.train_tasks = scoring.val_tasks;
      scoring.val_episodes = episodes;
      const ctrl::DesignScore score = ctrl::score_design(robot, omega, budget, seed, scoring);
      if (!score.feasible) {
        std::printf("design infeasible (tipover)\n");
        return 2;
      }
      for (const auto& [task, rate] : score.per_task)
        std::printf("%-16s %.1f%% of %d episodes\n", task.c_str(), 100.0 * rate, episodes);
      std::printf("mean success     %.3f\n", score.score);
      return 0;
    }
    if (manip_cmd->parsed()) {
      const auto robot = model::load_robot(robot_file);
      const auto omega = parse_design(design_spec, design_file);
      const auto designed = model::apply_design(robot, omega);
      manip::WorkspaceGrid grid;
      grid.spacing = spacing;
      const manip::ManipField field = manip::global_manipulability(designed, grid, seed);
      manip::export_heatmap(field, out_csv);
      std::printf("mu = %.6f over %zu poses (%zu reachable); heatmap: %s\n", field.mu,
                  field.values.size(), field.reachable, out_csv.c_str());
      return 0;
    }
    if (feas_cmd->parsed()) {
      const auto robot = model::load_robot(robot_file);
      const auto omega = parse_design(design_spec, design_file);
      feas::FeasibilityOptions options;
      options.include_external_pull = pull_torque;
      const feas::FeasibilityReport report = feas::check_design(robot, omega, options);
      print_feasibility(report);
      return (report.statically_stable && report.dynamically_stable) ? 0 : 2;
    }
    if (report_cmd->parsed()) {
      if (!orch::regenerate_report(history_file, tests_file, out_dir)) {
        std::fprintf(stderr, "history is empty\n");
        return 3;
      }
      std::printf("report written to %s\n", out_dir.c_str());
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
