#include "qecho/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "qecho/aubry_andre.hpp"
#include "qecho/echo.hpp"
#include "qecho/fidelity.hpp"
#include "qecho/haldane.hpp"
#include "qecho/ising.hpp"
#include "qecho/parallel.hpp"

namespace qecho {

namespace {

constexpr double kPi = std::numbers::pi;

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void config_error(const std::string& what) {
  throw std::invalid_argument("config: " + what);
}

Model parse_model(const std::string& s) {
  if (s == "aa") return Model::aa;
  if (s == "ising") return Model::ising;
  if (s == "haldane") return Model::haldane;
  config_error("unknown model '" + s + "' (expected aa, ising or haldane)");
}

QuenchParameter parse_parameter(const std::string& s) {
  if (s == "delta") return QuenchParameter::delta;
  if (s == "h") return QuenchParameter::h;
  if (s == "M") return QuenchParameter::M;
  if (s == "phi") return QuenchParameter::phi;
  config_error("unknown quench_parameter '" + s +
               "' (expected delta, h, M or phi)");
}

const std::set<std::string>& fixed_keys(Model m, QuenchParameter q) {
  static const std::set<std::string> aa_keys{"J", "alpha"};
  static const std::set<std::string> ising_keys{"J"};
  static const std::set<std::string> haldane_m{"t1", "t2", "phi"};
  static const std::set<std::string> haldane_phi{"t1", "t2", "M"};
  switch (m) {
    case Model::aa:
      return aa_keys;
    case Model::ising:
      return ising_keys;
    case Model::haldane:
      return q == QuenchParameter::M ? haldane_m : haldane_phi;
  }
  config_error("unreachable model");
}

AAParams make_aa(const SweepConfig& cfg, double potential) {
  AAParams p;
  p.sites = cfg.size;
  p.hopping = cfg.fixed_or("J", 1.0);
  p.modulation = cfg.fixed_or("alpha", 0.6180339887498949);
  p.potential = potential;
  return p;
}

HaldaneParams make_haldane(const SweepConfig& cfg, double lambda) {
  HaldaneParams p;
  p.t1 = cfg.fixed_or("t1", 4.0);
  p.t2 = cfg.fixed_or("t2", 1.0);
  p.grid = static_cast<int>(cfg.size);
  if (cfg.parameter == QuenchParameter::M) {
    p.mass = lambda;
    p.phase = cfg.fixed_or("phi", 0.0);
  } else {
    p.phase = lambda;
    p.mass = cfg.fixed_or("M", 0.0);
  }
  return p;
}

// Per-row worker for one sweep; must be deterministic and self-contained.
std::function<void(SweepRow&)> make_row_worker(
    const SweepConfig& cfg, const std::shared_ptr<Eigen::VectorXd>& aa_psi0) {
  switch (cfg.model) {
    case Model::aa:
      return [cfg, aa_psi0](SweepRow& row) {
        AAParams pf = make_aa(cfg, row.lambda_f);
        const Spectrum<double> spec =
            eig_hermitian<double>(build_aa_hamiltonian(pf));
        const OverlapDistribution dist =
            overlap_distribution<double>(spec, *aa_psi0);
        row.l_bar = spectral_average(dist, cfg.degeneracy_tol);
        row.eta = rate_function(row.l_bar, cfg.size).value;
      };
    case Model::ising:
      return [cfg](SweepRow& row) {
        const double j = cfg.fixed_or("J", 1.0);
        if (cfg.size == 0) {
          row.eta = ising_rate_closed(cfg.lambda_i / j, row.lambda_f / j, 4096);
          row.l_bar = std::numeric_limits<double>::quiet_NaN();
        } else {
          row.eta = ising_rate_discrete(cfg.lambda_i, row.lambda_f, cfg.size,
                                        j, cfg.degeneracy_tol);
          row.l_bar = std::exp(-row.eta * double(cfg.size));
        }
      };
    case Model::haldane:
      return [cfg](SweepRow& row) {
        const HaldaneParams pi = make_haldane(cfg, cfg.lambda_i);
        const HaldaneParams pf = make_haldane(cfg, row.lambda_f);
        row.eta = haldane_rate(pi, pf, cfg.degeneracy_tol);
        row.l_bar = std::exp(-row.eta * double(cfg.size) * double(cfg.size));
      };
  }
  config_error("unreachable model");
}

void fill_chi_column(SweepResult& result, double step) {
  const long n = static_cast<long>(result.rows.size());
  for (long j = 1; j + 1 < n; ++j) {
    SweepRow& row = result.rows[j];
    const SweepRow& lo = result.rows[j - 1];
    const SweepRow& hi = result.rows[j + 1];
    if (row.done && !row.failed && lo.done && !lo.failed && hi.done &&
        !hi.failed) {
      row.chi = chi_lambda(lo.eta, row.eta, hi.eta, step);
      row.has_chi = true;
    }
  }
}

struct PeakMetric {
  std::vector<double> lambda;
  std::vector<double> value;
};

PeakMetric peak_metric(const SweepConfig& cfg, const SweepResult& result) {
  PeakMetric m;
  const auto& rows = result.rows;
  if (cfg.model == Model::haldane) {
    for (const SweepRow& r : rows)
      if (r.done && !r.failed && r.has_chi) {
        m.lambda.push_back(r.lambda_f);
        m.value.push_back(r.chi);
      }
  } else {
    // steepest change of the echo average, central first difference
    for (size_t j = 1; j + 1 < rows.size(); ++j) {
      const SweepRow& lo = rows[j - 1];
      const SweepRow& hi = rows[j + 1];
      if (lo.done && !lo.failed && hi.done && !hi.failed) {
        m.lambda.push_back(rows[j].lambda_f);
        m.value.push_back(std::abs(hi.l_bar - lo.l_bar) /
                          (2.0 * cfg.grid.step()));
      }
    }
  }
  return m;
}

ScalingPoint refine_peak(const PeakMetric& m, long size) {
  if (m.value.size() < 3)
    throw std::runtime_error("run_scaling: too few valid points for a peak");
  size_t jmax = 1;
  for (size_t j = 1; j + 1 < m.value.size(); ++j)
    if (m.value[j] > m.value[jmax]) jmax = j;
  const double y0 = m.value[jmax - 1], y1 = m.value[jmax],
               y2 = m.value[jmax + 1];
  const double denom = y0 - 2.0 * y1 + y2;
  ScalingPoint p;
  p.size = size;
  if (denom >= 0.0) {  // flat or non-concave sample, keep the grid point
    p.peak_location = m.lambda[jmax];
    p.peak_height = y1;
  } else {
    const double shift = 0.5 * (y0 - y2) / denom;
    const double step = m.lambda[jmax + 1] - m.lambda[jmax];
    p.peak_location = m.lambda[jmax] + shift * step;
    p.peak_height = y1 - 0.25 * (y0 - y2) * shift;
  }
  return p;
}

}  // namespace

std::string to_string(Model m) {
  switch (m) {
    case Model::aa:
      return "aa";
    case Model::ising:
      return "ising";
    case Model::haldane:
      return "haldane";
  }
  return "?";
}

std::string to_string(QuenchParameter q) {
  switch (q) {
    case QuenchParameter::delta:
      return "delta";
    case QuenchParameter::h:
      return "h";
    case QuenchParameter::M:
      return "M";
    case QuenchParameter::phi:
      return "phi";
  }
  return "?";
}

double SweepConfig::fixed_or(const std::string& key, double fallback) const {
  const auto it = fixed.find(key);
  return it == fixed.end() ? fallback : it->second;
}

void SweepConfig::validate() const {
  if (grid.count < 2) config_error("lambda_f_grid.count must be >= 2");
  if (!(grid.start < grid.stop))
    config_error("lambda_f_grid.start must be < stop");
  switch (model) {
    case Model::aa:
      if (parameter != QuenchParameter::delta)
        config_error("model aa quenches 'delta'");
      if (size < 2 || size > 4096) config_error("aa size must be in [2, 4096]");
      break;
    case Model::ising:
      if (parameter != QuenchParameter::h) config_error("model ising quenches 'h'");
      if (size != 0 && (size < 4 || size % 2 != 0))
        config_error("ising size must be 0 (closed form) or even >= 4");
      break;
    case Model::haldane:
      if (parameter != QuenchParameter::M && parameter != QuenchParameter::phi)
        config_error("model haldane quenches 'M' or 'phi'");
      if (size < 4 || size > 256)
        config_error("haldane grid size must be in [4, 256]");
      break;
  }
  for (const auto& [key, value] : fixed) {
    (void)value;
    if (!fixed_keys(model, parameter).count(key))
      config_error("fixed_params key '" + key + "' not recognized for model " +
                   to_string(model));
  }
  if (degeneracy_tol < 0.0) config_error("degeneracy_tol must be >= 0");
  if (derivative_step < 0.0) config_error("derivative_step must be >= 0");
}

SweepConfig SweepConfig::from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) config_error("top level must be an object");
  static const std::set<std::string> known{
      "model",           "quench_parameter", "fixed_params",
      "lambda_i",        "lambda_f_grid",    "size",
      "derivative_step", "degeneracy_tol",   "output_path",
      "sizes"};
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (!known.count(key)) config_error("unknown key '" + key + "'");
  }
  for (const char* req : {"model", "quench_parameter", "lambda_i",
                          "lambda_f_grid", "size"})
    if (!doc.contains(req))
      config_error(std::string("missing required key '") + req + "'");

  SweepConfig cfg;
  cfg.model = parse_model(doc["model"].get<std::string>());
  cfg.parameter = parse_parameter(doc["quench_parameter"].get<std::string>());
  if (doc.contains("fixed_params")) {
    if (!doc["fixed_params"].is_object())
      config_error("fixed_params must be an object");
    for (const auto& [key, value] : doc["fixed_params"].items()) {
      if (!value.is_number())
        config_error("fixed_params['" + key + "'] must be a number");
      cfg.fixed[key] = value.get<double>();
    }
  }
  cfg.lambda_i = doc["lambda_i"].get<double>();
  const json& grid = doc["lambda_f_grid"];
  if (!grid.is_object()) config_error("lambda_f_grid must be an object");
  for (const auto& [key, value] : grid.items()) {
    (void)value;
    if (key != "start" && key != "stop" && key != "count")
      config_error("unknown key 'lambda_f_grid." + key + "'");
  }
  for (const char* req : {"start", "stop", "count"})
    if (!grid.contains(req))
      config_error(std::string("lambda_f_grid missing '") + req + "'");
  cfg.grid.start = grid["start"].get<double>();
  cfg.grid.stop = grid["stop"].get<double>();
  cfg.grid.count = grid["count"].get<int>();
  cfg.size = doc["size"].get<long>();
  if (doc.contains("derivative_step"))
    cfg.derivative_step = doc["derivative_step"].get<double>();
  if (doc.contains("degeneracy_tol"))
    cfg.degeneracy_tol = doc["degeneracy_tol"].get<double>();
  if (doc.contains("output_path"))
    cfg.output_path = doc["output_path"].get<std::string>();
  if (doc.contains("sizes")) {
    if (!doc["sizes"].is_array()) config_error("sizes must be an array");
    for (const auto& s : doc["sizes"]) cfg.sizes.push_back(s.get<long>());
  }
  cfg.validate();
  return cfg;
}

SweepConfig SweepConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

ordered_json SweepConfig::echo_json() const {
  ordered_json j;
  j["model"] = to_string(model);
  j["quench_parameter"] = to_string(parameter);
  ordered_json fp = ordered_json::object();
  for (const auto& [key, value] : fixed) fp[key] = value;
  j["fixed_params"] = fp;
  j["lambda_i"] = lambda_i;
  j["lambda_f_grid"] = {{"start", grid.start},
                        {"stop", grid.stop},
                        {"count", grid.count}};
  j["size"] = size;
  j["derivative_step"] = derivative_step;
  j["degeneracy_tol"] = degeneracy_tol;
  j["output_path"] = output_path;
  if (!sizes.empty()) j["sizes"] = sizes;
  return j;
}

SweepResult run_sweep(const SweepConfig& cfg, int threads,
                      const std::atomic<bool>* cancel,
                      const ProgressFn& progress) {
  cfg.validate();
  if (cfg.derivative_step > 0.0 &&
      std::abs(cfg.derivative_step - cfg.grid.step()) >
          1e-12 * std::max(1.0, cfg.grid.step()))
    config_error(
        "derivative_step must equal the sweep grid step (the stencil runs on "
        "the sweep grid)");
  const auto started = std::chrono::steady_clock::now();

  SweepResult result;
  result.rows.resize(size_t(cfg.grid.count));
  for (int j = 0; j < cfg.grid.count; ++j)
    result.rows[size_t(j)].lambda_f = cfg.grid.point(j);
  switch (cfg.model) {
    case Model::aa:
      result.site_count = cfg.size;
      break;
    case Model::ising:
      result.site_count = cfg.size;
      break;
    case Model::haldane:
      result.site_count = 2 * cfg.size * cfg.size;
      break;
  }

  // The pre-quench ground state is shared by every row.
  std::shared_ptr<Eigen::VectorXd> aa_psi0;
  if (cfg.model == Model::aa)
    aa_psi0 = std::make_shared<Eigen::VectorXd>(
        aa_ground_state(make_aa(cfg, cfg.lambda_i)));

  const auto worker = make_row_worker(cfg, aa_psi0);
  std::atomic<int> done_count(0);
  parallel_for(
      cfg.grid.count, threads,
      [&](long j) {
        SweepRow& row = result.rows[size_t(j)];
        try {
          worker(row);
        } catch (const std::exception& e) {
          row.failed = true;
          row.l_bar = std::numeric_limits<double>::quiet_NaN();
          row.eta = std::numeric_limits<double>::quiet_NaN();
          row.error = e.what();
        }
        row.done = true;
        const int d = done_count.fetch_add(1) + 1;
        if (progress) progress(d, cfg.grid.count);
      },
      cancel);

  for (const SweepRow& row : result.rows) {
    if (!row.done) result.partial = true;
    if (row.done && row.failed) ++result.failed_count;
  }
  fill_chi_column(result, cfg.grid.step());
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return result;
}

std::vector<ScalingPoint> run_scaling(const SweepConfig& cfg,
                                      const std::vector<long>& sizes,
                                      int threads, const ProgressFn& progress) {
  if (cfg.model == Model::ising)
    throw std::invalid_argument(
        "run_scaling: the Ising rate is evaluated in the thermodynamic limit; "
        "finite-size scaling is undefined for it");
  if (sizes.size() < 2)
    throw std::invalid_argument("run_scaling: need at least 2 sizes");
  for (size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1])
      throw std::invalid_argument("run_scaling: sizes must be ascending");
  std::vector<ScalingPoint> out;
  for (long size : sizes) {
    SweepConfig c = cfg;
    c.size = size;
    const SweepResult r = run_sweep(c, threads, nullptr, progress);
    if (r.failed_count > 0 || r.partial)
      throw std::runtime_error("run_scaling: sweep failed at size " +
                               std::to_string(size));
    out.push_back(refine_peak(peak_metric(c, r), size));
  }
  return out;
}

std::vector<FidelityRow> run_fidelity_compare(const SweepConfig& cfg,
                                              double delta, int threads,
                                              const ProgressFn& progress) {
  cfg.validate();
  if (!(delta > 0.0))
    throw std::invalid_argument("run_fidelity_compare: delta <= 0");
  if (cfg.model == Model::ising)
    throw std::invalid_argument(
        "run_fidelity_compare: supported models are aa and haldane");
  std::vector<FidelityRow> rows(size_t(cfg.grid.count));
  std::atomic<int> done_count(0);
  parallel_for(cfg.grid.count, threads, [&](long j) {
    FidelityRow& row = rows[size_t(j)];
    row.lambda = cfg.grid.point(int(j));
    SusceptibilityPair pair;
    if (cfg.model == Model::haldane) {
      const HaldaneQuench which = cfg.parameter == QuenchParameter::M
                                      ? HaldaneQuench::mass
                                      : HaldaneQuench::phase;
      pair = haldane_susceptibility(make_haldane(cfg, row.lambda), which, delta);
    } else {
      pair = aa_susceptibility(make_aa(cfg, row.lambda), delta);
    }
    row.chi_delta = pair.chi_delta;
    row.four_chi_f = pair.four_chi_f;
    const int d = done_count.fetch_add(1) + 1;
    if (progress) progress(d, cfg.grid.count);
  });
  return rows;
}

int run_selftest(std::ostream& log) {
  int failures = 0;
  const auto check = [&](const char* name, double got, double want,
                         double tol) {
    const bool ok = std::abs(got - want) <= tol;
    log << (ok ? "PASS" : "FAIL") << "  " << name << ": got " << got
        << ", want " << want << " +- " << tol << "\n";
    if (!ok) ++failures;
  };

  {
    AAParams p;
    p.sites = 16;
    p.potential = 0.0;
    const Eigen::VectorXd psi0 = aa_ground_state(p);
    AAParams pf = p;
    pf.potential = 1.0;
    const Spectrum<double> spec =
        eig_hermitian<double>(build_aa_hamiltonian(pf));
    const OverlapDistribution dist = overlap_distribution<double>(spec, psi0);
    check("time-domain vs spectral echo average (aa L=16)",
          time_average_echo(dist, 2.0e4, 200000), spectral_average(dist),
          1e-2);
  }
  check("discrete vs closed-form Ising rate (L=1000)",
        ising_rate_discrete(0.0, 2.0, 1000), ising_rate_closed(0.0, 2.0, 4096),
        1e-3);
  {
    HaldaneParams p;
    p.mass = 2.0;
    p.phase = 0.5 * kPi;
    p.grid = 24;
    const SusceptibilityPair pair =
        haldane_susceptibility(p, HaldaneQuench::mass, 1e-5);
    check("finite-difference vs perturbative susceptibility (haldane M=2)",
          pair.chi_delta / pair.four_chi_f, 1.0, 1e-3);
  }
  return failures;
}

// --- output formatting ---------------------------------------------------

std::string format_float(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = "lambda_f,L_bar,eta,chi\n";
  for (const SweepRow& row : result.rows) {
    if (!row.done) continue;
    out += format_float(row.lambda_f);
    out += ',';
    out += format_float(row.l_bar);
    out += ',';
    out += format_float(row.eta);
    out += ',';
    if (row.has_chi) out += format_float(row.chi);
    out += '\n';
  }
  return out;
}

std::string scaling_csv(const std::vector<ScalingPoint>& points) {
  std::string out = "size,peak_location,peak_height\n";
  for (const ScalingPoint& p : points) {
    out += std::to_string(p.size);
    out += ',';
    out += format_float(p.peak_location);
    out += ',';
    out += format_float(p.peak_height);
    out += '\n';
  }
  return out;
}

std::string fidelity_csv(const std::vector<FidelityRow>& rows) {
  std::string out = "lambda,chi_delta,four_chi_F\n";
  for (const FidelityRow& row : rows) {
    out += format_float(row.lambda);
    out += ',';
    out += format_float(row.chi_delta);
    out += ',';
    out += format_float(row.four_chi_f);
    out += '\n';
  }
  return out;
}

ordered_json sweep_meta(const SweepConfig& cfg, const SweepResult& result) {
  ordered_json meta;
  meta["version"] = kVersion;
  meta["config"] = cfg.echo_json();
  meta["site_count"] = result.site_count;
  meta["rows_emitted"] =
      std::count_if(result.rows.begin(), result.rows.end(),
                    [](const SweepRow& r) { return r.done; });
  meta["partial"] = result.partial;
  ordered_json failed = ordered_json::array();
  for (size_t j = 0; j < result.rows.size(); ++j) {
    const SweepRow& row = result.rows[j];
    if (row.done && row.failed)
      failed.push_back({{"index", j},
                        {"lambda_f", row.lambda_f},
                        {"error", row.error}});
  }
  meta["failed_rows"] = failed;
  meta["wall_time_seconds"] = result.wall_seconds;
  return meta;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << contents;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace qecho
