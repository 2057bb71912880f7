// quench-echo: parameter sweeps of quench-dynamics observables
// (long-time echo average, rate function, susceptibilities) with
// reproducible CSV/JSON output.

#include <atomic>
#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "qecho/sweep.hpp"

namespace {

std::atomic<bool> g_cancel(false);

void handle_interrupt(int) { g_cancel.store(true); }

struct CommonOptions {
  std::string config_path;
  std::string output_override;
  int threads = 1;
  bool to_stdout = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--config", opt.config_path, "JSON config file")->required();
  cmd->add_option("--threads", opt.threads, "worker threads")
      ->check(CLI::Range(1, 256));
  cmd->add_flag("--stdout", opt.to_stdout,
                "write the CSV to standard output");
  cmd->add_option("--output", opt.output_override,
                  "override output_path from the config");
}

qecho::SweepConfig load_config(const CommonOptions& opt) {
  qecho::SweepConfig cfg = qecho::SweepConfig::from_json_file(opt.config_path);
  if (!opt.output_override.empty()) cfg.output_path = opt.output_override;
  if (cfg.output_path.empty() && !opt.to_stdout)
    throw std::invalid_argument(
        "config: no output_path and --stdout not set; nothing to emit");
  return cfg;
}

qecho::ProgressFn stderr_progress(const std::string& label) {
  auto last_decile = std::make_shared<std::atomic<int>>(-1);
  return [label, last_decile](int done, int total) {
    const int decile = 10 * done / total;
    int prev = last_decile->load();
    while (decile > prev && last_decile->compare_exchange_weak(prev, decile)) {
      std::cerr << label << ": " << done << "/" << total << "\n";
      return;
    }
  };
}

void emit(const qecho::SweepConfig& cfg, const std::string& csv,
          const nlohmann::ordered_json& meta, bool to_stdout) {
  if (to_stdout) std::cout << csv;
  if (!cfg.output_path.empty()) {
    qecho::write_file(cfg.output_path, csv);
    qecho::write_file(cfg.output_path + ".meta.json", meta.dump(2) + "\n");
    std::cerr << "wrote " << cfg.output_path << " and " << cfg.output_path
              << ".meta.json\n";
  }
}

int cmd_sweep(const CommonOptions& opt) {
  const qecho::SweepConfig cfg = load_config(opt);
  const qecho::SweepResult result =
      qecho::run_sweep(cfg, opt.threads, &g_cancel, stderr_progress("sweep"));
  emit(cfg, qecho::sweep_csv(result), qecho::sweep_meta(cfg, result),
       opt.to_stdout);
  if (result.partial) {
    std::cerr << "interrupted: flushed completed rows only\n";
    return 2;
  }
  if (result.failed_count > 0) {
    std::cerr << result.failed_count << " row(s) failed, see meta\n";
    return 2;
  }
  return 0;
}

int cmd_scaling(const CommonOptions& opt, std::vector<long>& sizes) {
  const qecho::SweepConfig cfg = load_config(opt);
  if (sizes.empty()) sizes = cfg.sizes;
  const auto points =
      qecho::run_scaling(cfg, sizes, opt.threads, stderr_progress("scaling"));
  nlohmann::ordered_json meta;
  meta["version"] = qecho::kVersion;
  meta["config"] = cfg.echo_json();
  meta["sizes"] = sizes;
  emit(cfg, qecho::scaling_csv(points), meta, opt.to_stdout);
  return 0;
}

int cmd_fidelity(const CommonOptions& opt, double delta) {
  qecho::SweepConfig cfg = load_config(opt);
  if (delta <= 0.0)
    delta = cfg.derivative_step > 0.0 ? cfg.derivative_step : 1e-5;
  const auto rows = qecho::run_fidelity_compare(cfg, delta, opt.threads,
                                                stderr_progress("fidelity"));
  nlohmann::ordered_json meta;
  meta["version"] = qecho::kVersion;
  meta["config"] = cfg.echo_json();
  meta["delta"] = delta;
  emit(cfg, qecho::fidelity_csv(rows), meta, opt.to_stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, handle_interrupt);

  CLI::App app{"quench-echo: nonequilibrium quench sweeps"};
  app.require_subcommand(1);

  CommonOptions sweep_opt, scaling_opt, fidelity_opt;
  std::vector<long> sizes;
  double delta = 0.0;

  CLI::App* sweep = app.add_subcommand(
      "sweep", "one quench-parameter sweep (lambda_f, L_bar, eta, chi)");
  add_common(sweep, sweep_opt);

  CLI::App* scaling = app.add_subcommand(
      "scaling", "peak location/height of the sweep feature per system size");
  add_common(scaling, scaling_opt);
  scaling->add_option("--sizes", sizes, "system sizes (overrides config)")
      ->delimiter(',');

  CLI::App* fid = app.add_subcommand(
      "fidelity", "finite-difference chi_delta against 4 chi_F per lambda");
  add_common(fid, fidelity_opt);
  fid->add_option("--delta", delta, "quench increment (default 1e-5)");

  CLI::App* selftest = app.add_subcommand(
      "selftest", "run the oracle-equivalence checks and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // usage errors exit 1
  }

  try {
    if (sweep->parsed()) return cmd_sweep(sweep_opt);
    if (scaling->parsed()) return cmd_scaling(scaling_opt, sizes);
    if (fid->parsed()) return cmd_fidelity(fidelity_opt, delta);
    if (selftest->parsed()) {
      const int failures = qecho::run_selftest(std::cerr);
      std::cerr << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
      return failures == 0 ? 0 : 1;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
