// ttl: data generation, training, closed-loop simulation and reference
// export for the tail-sitter transition toolkit.

#include <cmath>
#include <complex>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ttl/ttl.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDiverged = 2;

std::string format_eigenvalue(const std::complex<double>& z) {
  char buf[96];
  const double tiny = 1e-9 * std::max(1.0, std::abs(z.real()));
  if (std::abs(z.imag()) <= tiny) {
    std::snprintf(buf, sizeof buf, "%.10g", z.real() == 0.0 ? 0.0 : z.real());
  } else {
    std::snprintf(buf, sizeof buf, "%.10g%+.10gi", z.real(), z.imag());
  }
  return buf;
}

ttl::Channel parse_channel(const std::string& s) { return ttl::channel_from_string(s); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tail-sitter transition toolkit: RNN estimation + feedback linearization"};
  app.require_subcommand(1);

  std::string channel, config_path, out_path, data_path, weights_path, report_path, scenario_path,
      mode;
  bool oracle = false;

  auto* gen = app.add_subcommand("gen-data", "Record an excitation dataset for one channel");
  gen->add_option("--channel", channel, "u or w")->required()->check(CLI::IsMember({"u", "w"}));
  gen->add_option("--config", config_path, "config file")->required();
  gen->add_option("--out", out_path, "dataset CSV")->required();

  auto* train = app.add_subcommand("train", "Train a channel network on a dataset");
  train->add_option("--channel", channel, "u or w")->required()->check(CLI::IsMember({"u", "w"}));
  train->add_option("--data", data_path, "dataset CSV")->required();
  train->add_option("--config", config_path, "config file")->required();
  train->add_option("--out-weights", weights_path, "weight snapshot CSV")->required();
  train->add_option("--report", report_path, "per-epoch MSE CSV")->required();

  auto* sim = app.add_subcommand("simulate", "Run a closed-loop transition");
  sim->add_option("--scenario", scenario_path, "scenario file")->required();
  sim->add_option("--out", out_path, "trajectory CSV")->required();
  sim->add_flag("--oracle", oracle, "use the true h1, h2 instead of trained networks");

  auto* gains = app.add_subcommand("check-gains", "Eigenvalues of the pitch error matrix");
  gains->add_option("--config", config_path, "config file")->required();

  auto* refs = app.add_subcommand("export-refs", "Export the reference profile");
  refs->add_option("--mode", mode, "hc or ch")->required()->check(CLI::IsMember({"hc", "ch"}));
  refs->add_option("--config", config_path, "config file")->required();
  refs->add_option("--out", out_path, "reference CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) {
      const auto cfg = ttl::Config::load(config_path);
      const auto ch = parse_channel(channel);
      const auto vp = ttl::vehicle_from(cfg);
      const auto ds = ttl::collect_dataset(ttl::excitation_from(cfg, ch), vp,
                                           ch == ttl::Channel::U ? cfg.number("eps_hold", 0.0) : 0.0);
      ttl::csv::write_file(out_path, ttl::dataset_to_csv(ds));
    } else if (*train) {
      const auto cfg = ttl::Config::load(config_path);
      const auto ch = parse_channel(channel);
      const auto vp = ttl::vehicle_from(cfg);
      auto ds = ttl::dataset_from_csv(ttl::csv::read_file(data_path), ch);
      if (ch == ttl::Channel::U) ds.eps_hold = cfg.number("eps_hold", 0.0);
      const double neurons = cfg.number("neurons", 8.0);
      if (!(neurons >= 1.0)) throw ttl::ConfigError("config: neurons must be >= 1");
      const auto net = ttl::prepare_network(ds, vp, cfg.seed(), static_cast<Eigen::Index>(neurons));
      const auto res = ttl::train_offline(ds, net, ttl::train_options_from(cfg));
      ttl::save_weights(weights_path, res.net);
      ttl::csv::write_file(report_path, ttl::report_to_csv(res.report));
      std::cout << "final_mse = " << ttl::csv::shortest(res.report.final_mse) << '\n';
    } else if (*sim) {
      const auto cfg = ttl::Config::load(scenario_path);
      const auto log = ttl::run_transition(ttl::scenario_from(cfg, oracle));
      ttl::csv::write_file(out_path, ttl::trajectory_to_csv(log));
    } else if (*gains) {
      const auto cfg = ttl::Config::load(config_path);
      const auto sys = ttl::attitude_error_matrix(ttl::inner_gains_from(cfg));
      std::cout << "A = [[0, 1], [" << ttl::csv::shortest(sys.a(1, 0)) << ", "
                << ttl::csv::shortest(sys.a(1, 1)) << "]]\n"
                << "lambda1 = " << format_eigenvalue(sys.lambda1) << '\n'
                << "lambda2 = " << format_eigenvalue(sys.lambda2) << '\n'
                << "hurwitz = " << (sys.hurwitz ? "true" : "false") << '\n';
    } else if (*refs) {
      const auto cfg = ttl::Config::load(config_path);
      const auto text = ttl::reference_to_csv(ttl::mode_from_string(mode), ttl::shaping_from(cfg),
                                              ttl::vehicle_from(cfg), cfg.number("t_end", 30.0),
                                              cfg.number("ref_dt", 0.01));
      ttl::csv::write_file(out_path, text);
    }
  } catch (const ttl::DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}
