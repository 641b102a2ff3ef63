// Command-line driver for pilot studies, single estimates and estimator comparisons.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "camfis/error.hpp"
#include "camfis/harness/config.hpp"
#include "camfis/harness/csv.hpp"
#include "camfis/harness/harness.hpp"

namespace fs = std::filesystem;
using namespace camfis;
using namespace camfis::harness;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::uint64_t seed = 1;
  std::string out = "camfis_out";
  std::string problem;
  std::string scale = "desk";
  std::optional<std::size_t> threads;
};

CampaignConfig resolve_config(const GlobalOptions& g) {
  std::optional<ProblemKind> kind;
  if (!g.problem.empty()) kind = parse_problem_kind(g.problem);
  else if (!g.config_path.empty()) kind = peek_problem(g.config_path);
  CampaignConfig cfg = default_config(kind.value_or(ProblemKind::heat), parse_scale(g.scale));
  if (!g.config_path.empty()) cfg = load_config(g.config_path, cfg);
  // --problem wins over the file's problem key
  if (kind) cfg.problem = *kind;
  if (g.threads) cfg.threads = *g.threads;
  cfg.validate();
  return cfg;
}

void write_config_echo(const fs::path& dir, const CampaignConfig& cfg, std::uint64_t seed) {
  std::ofstream out(dir / "config.txt");
  out << "# master seed " << seed << '\n';
  write_config(out, cfg);
}

void apply_pins(PilotReport& report, const CampaignConfig& cfg) {
  if (!cfg.pinned_costs) return;
  report.cost_model.c0 = cfg.pinned_costs->c0;
  report.cost_model.c1 = cfg.pinned_costs->c1;
  report.cost_model.high_fidelity_cost = cfg.pinned_costs->high_fidelity_cost;
}

std::vector<TradeoffRow> tradeoffs_for(const PilotReport& pilot, const CampaignConfig& cfg) {
  std::vector<double> h;
  for (const auto& r : pilot.rows) h.push_back(r.h);
  std::vector<TradeoffSolution> sols;
  for (double eps : cfg.tolerances)
    sols.push_back(solve_tradeoff(h, pilot.error_model, pilot.cost_model, eps, cfg.f_sup_factor));
  return tradeoff_rows(cfg.tolerances, sols);
}

PilotReport do_pilot(const Experiment& exp, const fs::path& dir) {
  PilotReport report = run_pilot(exp, stage_stream(RandomStream(exp.seed), Stage::pilot));
  write_pilot_csv(dir / "pilot.csv", report);
  write_constants_csv(dir / "constants.csv", report);
  write_tradeoff_csv(dir / "tradeoff.csv", tradeoffs_for(report, exp.config));
  return report;
}

/// Existing pilot.csv + constants.csv in the output directory, else a fresh pilot.
PilotReport load_or_run_pilot(const Experiment& exp, const fs::path& dir) {
  if (fs::exists(dir / "pilot.csv") && fs::exists(dir / "constants.csv")) {
    PilotReport report;
    report.rows = read_pilot_csv(dir / "pilot.csv");
    read_constants_csv(dir / "constants.csv", report);
    apply_pins(report, exp.config);
    std::cerr << "using pilot results from " << dir.string() << '\n';
    return report;
  }
  std::cerr << "no pilot results in " << dir.string() << ", running the pilot\n";
  return do_pilot(exp, dir);
}

void print_constants(const PilotReport& p) {
  std::cout << "K0_tilde=" << format_double(p.error_model.k0_tilde) << " K1=" << format_double(p.error_model.k1)
            << " c0=" << format_double(p.cost_model.c0) << " c1=" << format_double(p.cost_model.c1)
            << " C=" << format_double(p.cost_model.high_fidelity_cost) << " M=" << p.cost_model.training_evals
            << '\n';
}

void write_comparison(const fs::path& dir, const Experiment& exp, const Comparison& cmp) {
  write_mse_csv(dir / "mse.csv", cmp.records);
  write_records_csv(dir / "records.csv", cmp.records);
  write_truth_csv(dir / "truth.csv", cmp.truth, exp.config.truth_m, exp.seed);
  write_tradeoff_csv(dir / "tradeoff.csv", tradeoff_rows(exp.config.tolerances, cmp.tradeoffs));
  for (const auto& r : cmp.records) {
    std::cout << "eps=" << format_double(r.epsilon) << ' ' << to_string(r.estimator) << " n=" << r.n
              << " m=" << r.m << " mse=" << format_double(r.mse_hat)
              << " cost_s=" << format_double(r.mean_cost_seconds) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Context-aware multi-fidelity importance sampling experiments"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config_path, "Campaign config file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--problem", g.problem, "Inverse problem")->check(CLI::IsMember({"heat", "beam"}));
  app.add_option("--scale", g.scale, "Built-in experiment sizes")
      ->check(CLI::IsMember({"paper", "desk"}))
      ->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");

  auto* pilot_cmd = app.add_subcommand("pilot", "Pilot study: chi^2 and cost per fidelity, fitted constants");
  auto* run_cmd = app.add_subcommand("run", "Context-aware estimate at one tolerance");
  double run_eps = 0.0;
  run_cmd->add_option("--epsilon", run_eps, "Tolerance")->required()->check(CLI::PositiveNumber);
  auto* truth_cmd = app.add_subcommand("truth", "Reference value from high-fidelity importance sampling");
  auto* mse_cmd = app.add_subcommand("mse", "MSE of the context-aware estimator over the tolerance grid");
  auto* compare_cmd = app.add_subcommand("compare", "MSE and cost of all three estimators over the tolerance grid");

  CLI11_PARSE(app, argc, argv);

  try {
    const CampaignConfig cfg = resolve_config(g);
    const fs::path dir = g.out;
    fs::create_directories(dir);
    write_config_echo(dir, cfg, g.seed);
    const Experiment exp = make_experiment(cfg, g.seed);
    const RandomStream master(g.seed);

    if (*pilot_cmd) {
      print_constants(do_pilot(exp, dir));
    } else if (*run_cmd) {
      const PilotReport pilot = load_or_run_pilot(exp, dir);
      const Algorithm1Result r = run_algorithm1(exp, pilot, run_eps, stage_stream(master, Stage::run));
      std::ofstream out(dir / "run.csv");
      out << "epsilon,n_star,m_star,estimate,predicted_cost,fit_seconds,sample_seconds\n"
          << format_double(run_eps) << ',' << r.n_star << ',' << r.solution.m_star << ','
          << format_double(r.estimate) << ',' << format_double(r.solution.predicted_cost) << ','
          << format_double(r.fit_seconds) << ',' << format_double(r.sample_seconds) << '\n';
      std::cout << "estimate=" << format_double(r.estimate) << " n_star=" << r.n_star
                << " m_star=" << r.solution.m_star << " wall_s=" << format_double(r.wall_seconds) << '\n';
    } else if (*truth_cmd) {
      const TimedFit hf = timed_laplace_fit(exp, cfg.high_fidelity);
      const TestFunction f = make_test_function(hf.laplace);
      const TruthEstimate t =
          estimate_truth(exp, hf.laplace, f, cfg.truth_m, cfg.truth_trials, stage_stream(master, Stage::truth));
      write_truth_csv(dir / "truth.csv", t, cfg.truth_m, g.seed);
      std::cout << "truth=" << format_double(t.mean) << " std=" << format_double(t.std_dev) << '\n';
    } else if (*mse_cmd || *compare_cmd) {
      const PilotReport pilot = load_or_run_pilot(exp, dir);
      const Comparison cmp = compare_estimators(exp, pilot, cfg.tolerances, master, static_cast<bool>(*compare_cmd));
      write_comparison(dir, exp, cmp);
    }
  } catch (const camfis::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
