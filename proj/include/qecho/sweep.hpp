#pragma once

#include <atomic>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace qecho {

inline constexpr const char* kVersion = "1.0.0";

enum class Model { aa, ising, haldane };
enum class QuenchParameter { delta, h, M, phi };

std::string to_string(Model m);
std::string to_string(QuenchParameter q);

/// Uniform inclusive grid of `count` points over [start, stop].
struct GridSpec {
  double start = 0.0;
  double stop = 1.0;
  int count = 2;

  double step() const { return (stop - start) / double(count - 1); }
  double point(int j) const { return start + double(j) * step(); }
};

/// One sweep request. `fixed` holds the non-quenched model parameters
/// (aa: J, alpha; ising: J; haldane: t1, t2 and the non-quenched one of
/// M / phi). `size` is L for chains (0 selects the closed-form Ising rate)
/// and the grid N for the Haldane model.
struct SweepConfig {
  Model model = Model::aa;
  QuenchParameter parameter = QuenchParameter::delta;
  std::map<std::string, double> fixed;
  double lambda_i = 0.0;
  GridSpec grid;
  long size = 0;
  double derivative_step = 0.0;  // 0: sweep grid step; fidelity: the delta
  double degeneracy_tol = 1e-9;
  std::string output_path;
  std::vector<long> sizes;  // scaling runs only

  void validate() const;
  double fixed_or(const std::string& key, double fallback) const;

  static SweepConfig from_json_text(const std::string& text);
  static SweepConfig from_json_file(const std::string& path);
  nlohmann::ordered_json echo_json() const;
};

struct SweepRow {
  double lambda_f = 0.0;
  double l_bar = 0.0;
  double eta = 0.0;
  double chi = 0.0;
  bool has_chi = false;
  bool failed = false;
  bool done = false;
  std::string error;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // grid order; only `done` rows are emitted
  long site_count = 0;
  int failed_count = 0;
  bool partial = false;
  double wall_seconds = 0.0;
};

using ProgressFn = std::function<void(int done, int total)>;

/// Runs one sweep: one row per grid point, the second-derivative column from
/// the three-point stencil on the sweep grid itself. Rows are computed
/// independently (each single-threaded) and gathered in grid order, so the
/// output is identical for any worker count. Model errors mark the row
/// failed and the sweep continues.
SweepResult run_sweep(const SweepConfig& cfg, int threads = 1,
                      const std::atomic<bool>* cancel = nullptr,
                      const ProgressFn& progress = {});

struct ScalingPoint {
  long size = 0;
  double peak_location = 0.0;
  double peak_height = 0.0;
};

/// Repeats the sweep for each size and locates the sharpest feature by
/// parabolic refinement of the discrete argmax: the second-derivative peak
/// for the Haldane model, the steepest |dL/dlambda| for the quasiperiodic
/// chain. Rejected for the Ising model (size-independent closed form).
std::vector<ScalingPoint> run_scaling(const SweepConfig& cfg,
                                      const std::vector<long>& sizes,
                                      int threads = 1,
                                      const ProgressFn& progress = {});

struct FidelityRow {
  double lambda = 0.0;
  double chi_delta = 0.0;
  double four_chi_f = 0.0;
};

/// Tabulates both susceptibility routes (finite-difference quench curvature
/// versus perturbation sum) over the lambda grid.
std::vector<FidelityRow> run_fidelity_compare(const SweepConfig& cfg,
                                              double delta, int threads = 1,
                                              const ProgressFn& progress = {});

/// Oracle-equivalence checks: time-domain versus spectral echo average,
/// discrete versus closed-form Ising rate, finite-difference versus
/// perturbative susceptibility. Logs one line per check; returns the number
/// of failures.
int run_selftest(std::ostream& log);

// --- output formatting ---------------------------------------------------

/// Round-trip-exact float formatting (17 significant digits).
std::string format_float(double x);

std::string sweep_csv(const SweepResult& result);
std::string scaling_csv(const std::vector<ScalingPoint>& points);
std::string fidelity_csv(const std::vector<FidelityRow>& rows);

nlohmann::ordered_json sweep_meta(const SweepConfig& cfg,
                                  const SweepResult& result);

void write_file(const std::string& path, const std::string& contents);

}  // namespace qecho
