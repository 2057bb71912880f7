#include <doctest.h>

#include <cstdlib>
#include <numbers>

#include "qecho/aubry_andre.hpp"
#include "qecho/sweep.hpp"

using namespace qecho;

namespace {

constexpr double kPi = std::numbers::pi;

const char* kAAConfig = R"({
  "model": "aa",
  "quench_parameter": "delta",
  "fixed_params": {"J": 1.0, "alpha": 0.6180339887498949},
  "lambda_i": 0.0,
  "lambda_f_grid": {"start": 0.0, "stop": 4.0, "count": 9},
  "size": 32,
  "degeneracy_tol": 1e-9,
  "output_path": "out.csv"
})";

SweepConfig haldane_mass_config(int grid, int count = 11) {
  SweepConfig cfg;
  cfg.model = Model::haldane;
  cfg.parameter = QuenchParameter::M;
  cfg.fixed = {{"t1", 4.0}, {"t2", 1.0}, {"phi", 0.5 * kPi}};
  cfg.lambda_i = 0.0;
  cfg.grid = {4.5, 6.0, count};
  cfg.size = grid;
  return cfg;
}

}  // namespace

TEST_SUITE("sweep") {

TEST_CASE("config_round_trip_and_defaults") {
  const SweepConfig cfg = SweepConfig::from_json_text(kAAConfig);
  CHECK(cfg.model == Model::aa);
  CHECK(cfg.parameter == QuenchParameter::delta);
  CHECK(cfg.lambda_i == 0.0);
  CHECK(cfg.grid.count == 9);
  CHECK(cfg.grid.step() == doctest::Approx(0.5));
  CHECK(cfg.size == 32);
  CHECK(cfg.degeneracy_tol == 1e-9);
  CHECK(cfg.output_path == "out.csv");
  CHECK(cfg.fixed_or("J", 2.0) == 1.0);
  CHECK(cfg.fixed_or("missing", 7.0) == 7.0);
  const auto echo = cfg.echo_json();
  CHECK(echo["model"] == "aa");
  CHECK(echo["lambda_f_grid"]["count"] == 9);
}

TEST_CASE("config_rejects_unknown_and_missing_keys") {
  CHECK_THROWS_WITH_AS(
      SweepConfig::from_json_text(R"({"model": "aa", "typo_key": 1})"),
      doctest::Contains("unknown key 'typo_key'"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(SweepConfig::from_json_text(R"({"model": "aa"})"),
                       doctest::Contains("missing required key"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      SweepConfig::from_json_text(
          R"({"model": "aa", "quench_parameter": "delta", "lambda_i": 0,
              "lambda_f_grid": {"start": 0, "stop": 1, "count": 5, "junk": 2},
              "size": 16})"),
      doctest::Contains("lambda_f_grid.junk"), std::invalid_argument);
  CHECK_THROWS_AS(SweepConfig::from_json_text("not json"),
                  std::invalid_argument);
}

TEST_CASE("config_validates_model_specific_bounds") {
  SweepConfig cfg = SweepConfig::from_json_text(kAAConfig);
  cfg.size = 5000;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.size = 32;
  cfg.parameter = QuenchParameter::h;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.parameter = QuenchParameter::delta;
  cfg.grid.count = 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.grid = {2.0, 1.0, 5};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.grid = {0.0, 4.0, 9};
  cfg.fixed["t1"] = 1.0;  // not an aa parameter
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("sweep_rows_sorted_with_endpoint_chi_null") {
  SweepConfig cfg = SweepConfig::from_json_text(kAAConfig);
  const SweepResult res = run_sweep(cfg);
  REQUIRE(res.rows.size() == 9);
  CHECK(res.failed_count == 0);
  CHECK_FALSE(res.partial);
  CHECK_FALSE(res.rows.front().has_chi);
  CHECK_FALSE(res.rows.back().has_chi);
  for (size_t j = 1; j < res.rows.size(); ++j) {
    CHECK(res.rows[j].lambda_f > res.rows[j - 1].lambda_f);
    if (j + 1 < res.rows.size()) CHECK(res.rows[j].has_chi);
  }
  // identity point: lambda_f = lambda_i = 0 is on the grid
  CHECK(res.rows.front().l_bar == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.rows.front().eta == doctest::Approx(0.0).epsilon(1e-12));
  // matches the single-call path
  AAParams p;
  p.sites = 32;
  p.potential = 0.0;
  const QuenchAverage q = aa_quench_average(p, res.rows[4].lambda_f);
  CHECK(res.rows[4].l_bar == q.echo_average);
  CHECK(res.rows[4].eta == q.rate);
}

TEST_CASE("sweep_bytes_identical_across_reruns_and_thread_counts") {
  SweepConfig cfg = SweepConfig::from_json_text(kAAConfig);
  const std::string a = sweep_csv(run_sweep(cfg, 1));
  const std::string b = sweep_csv(run_sweep(cfg, 1));
  const std::string c = sweep_csv(run_sweep(cfg, 3));
  CHECK(a == b);
  CHECK(a == c);
  CHECK(a.substr(0, a.find('\n')) == "lambda_f,L_bar,eta,chi");
}

TEST_CASE("meta_stable_apart_from_wall_time") {
  SweepConfig cfg = SweepConfig::from_json_text(kAAConfig);
  auto a = sweep_meta(cfg, run_sweep(cfg, 1));
  auto b = sweep_meta(cfg, run_sweep(cfg, 2));
  CHECK(a.contains("wall_time_seconds"));
  CHECK(a["version"] == kVersion);
  a.erase("wall_time_seconds");
  b.erase("wall_time_seconds");
  CHECK(a.dump(2) == b.dump(2));
  CHECK(a["config"]["size"] == 32);
  CHECK(a["site_count"] == 32);
  CHECK(a["rows_emitted"] == 9);
}

TEST_CASE("csv_floats_round_trip_exactly") {
  SweepConfig cfg = SweepConfig::from_json_text(kAAConfig);
  const SweepResult res = run_sweep(cfg);
  const std::string csv = sweep_csv(res);
  // parse the second data line back
  size_t pos = csv.find('\n') + 1;
  pos = csv.find('\n', pos) + 1;  // third line = rows[1]
  const std::string line = csv.substr(pos, csv.find('\n', pos) - pos);
  double vals[3];
  char* end = nullptr;
  const char* s = line.c_str();
  for (int i = 0; i < 3; ++i) {
    vals[i] = std::strtod(s, &end);
    s = end + 1;
  }
  CHECK(vals[0] == res.rows[1].lambda_f);
  CHECK(vals[1] == res.rows[1].l_bar);
  CHECK(vals[2] == res.rows[1].eta);
  CHECK(format_float(0.1) == "0.10000000000000001");
}

TEST_CASE("ising_sweep_finite_and_continuum") {
  SweepConfig cfg;
  cfg.model = Model::ising;
  cfg.parameter = QuenchParameter::h;
  cfg.lambda_i = 100.0;
  cfg.grid = {0.0, 2.0, 21};
  cfg.size = 500;
  const SweepResult res = run_sweep(cfg, 2);
  CHECK(res.failed_count == 0);
  // plateau below h_c, decreasing beyond (Fig. 2(b) shape)
  const double plateau = std::log(8.0 / (3.0 + 2.0 * std::sqrt(2.0)));
  for (size_t j = 0; j < res.rows.size(); ++j) {
    const SweepRow& r = res.rows[j];
    if (r.lambda_f <= 1.0) CHECK(std::abs(r.eta - plateau) <= 0.01);
  }
  CHECK(res.rows.back().eta < plateau - 0.05);
  CHECK(res.rows[10].l_bar ==
        doctest::Approx(std::exp(-500.0 * res.rows[10].eta)));

  cfg.size = 0;  // thermodynamic-limit closed form
  const SweepResult cont = run_sweep(cfg);
  CHECK(cont.failed_count == 0);
  CHECK(std::isnan(cont.rows[0].l_bar));
  CHECK(std::abs(cont.rows[0].eta - plateau) <= 1e-6);
}

TEST_CASE("failed_rows_are_marked_and_kept") {
  SweepConfig cfg = SweepConfig::from_json_text(kAAConfig);
  cfg.grid = {-0.5, 0.5, 5};  // negative potentials are model errors
  const SweepResult res = run_sweep(cfg, 2);
  REQUIRE(res.rows.size() == 5);
  CHECK(res.failed_count == 2);
  CHECK(res.rows[0].failed);
  CHECK(res.rows[1].failed);
  CHECK_FALSE(res.rows[2].failed);
  CHECK_FALSE(res.rows[4].failed);
  CHECK(res.rows[0].error.find("potential") != std::string::npos);
  CHECK_FALSE(res.rows[2].has_chi);  // stencil needs three clean rows
  CHECK(res.rows[3].has_chi);        // rows 2..4 are all clean
  const std::string csv = sweep_csv(res);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);  // header + 5 rows
  CHECK(csv.find("nan") != std::string::npos);
  const auto meta = sweep_meta(cfg, res);
  CHECK(meta["failed_rows"].size() == 2);
  CHECK(meta["partial"] == false);
}

TEST_CASE("cancellation_flushes_completed_prefix") {
  SweepConfig cfg = SweepConfig::from_json_text(kAAConfig);
  std::atomic<bool> cancel(true);  // cancel before any row starts
  const SweepResult res = run_sweep(cfg, 1, &cancel);
  CHECK(res.partial);
  const auto meta = sweep_meta(cfg, res);
  CHECK(meta["partial"] == true);
  CHECK(sweep_csv(res) == "lambda_f,L_bar,eta,chi\n");
}

TEST_CASE("scaling_locates_growing_haldane_peak") {
  const SweepConfig cfg = haldane_mass_config(12, 16);
  const auto points = run_scaling(cfg, {12, 16}, 2);
  REQUIRE(points.size() == 2);
  CHECK(points[0].size == 12);
  CHECK(points[1].size == 16);
  for (const auto& p : points) {
    CHECK(p.peak_location > 4.5);
    CHECK(p.peak_location < 6.0);
  }
  CHECK(points[1].peak_height > points[0].peak_height);
}

TEST_CASE("scaling_peak_grows_within_a_commensuration_class") {
  // the midpoint k-grid approaches the critical Dirac point like 1/(6N) for
  // 3 nmid N but only 1/(2N) for 3 | N; the divergence trend is monotone
  // within one class
  const SweepConfig cfg = haldane_mass_config(16, 76);
  const auto points = run_scaling(cfg, {16, 32, 64}, 2);
  REQUIRE(points.size() == 3);
  CHECK(points[1].peak_height > points[0].peak_height);
  CHECK(points[2].peak_height > points[1].peak_height);
  const double boundary = 3.0 * std::sqrt(3.0);
  for (const auto& p : points)
    CHECK(std::abs(p.peak_location - boundary) <= 0.02);
}

TEST_CASE("scaling_rejects_ising_and_bad_sizes") {
  SweepConfig cfg;
  cfg.model = Model::ising;
  cfg.parameter = QuenchParameter::h;
  cfg.lambda_i = 0.0;
  cfg.grid = {0.0, 2.0, 11};
  cfg.size = 100;
  CHECK_THROWS_WITH_AS(run_scaling(cfg, {100, 200}),
                       doctest::Contains("scaling is undefined"),
                       std::invalid_argument);
  const SweepConfig h = haldane_mass_config(8);
  CHECK_THROWS_AS(run_scaling(h, {8}), std::invalid_argument);
  CHECK_THROWS_AS(run_scaling(h, {16, 8}), std::invalid_argument);
}

TEST_CASE("aa_scaling_uses_steepest_echo_descent") {
  SweepConfig cfg = SweepConfig::from_json_text(kAAConfig);
  cfg.grid = {0.0, 4.0, 41};
  const auto points = run_scaling(cfg, {32, 64}, 2);
  REQUIRE(points.size() == 2);
  // transition estimate stays near Delta_f = 2 and drifts little
  for (const auto& p : points) {
    CHECK(p.peak_location > 1.0);
    CHECK(p.peak_location < 3.0);
  }
}

TEST_CASE("fidelity_compare_columns_agree_on_both_models") {
  SweepConfig cfg = haldane_mass_config(8);
  cfg.grid = {1.0, 3.0, 3};
  const auto rows = run_fidelity_compare(cfg, 1e-5, 2);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.four_chi_f > 0.0);
    CHECK(std::abs(r.chi_delta - r.four_chi_f) / r.four_chi_f <= 1e-3);
  }
  const std::string csv = fidelity_csv(rows);
  CHECK(csv.substr(0, csv.find('\n')) == "lambda,chi_delta,four_chi_F");

  SweepConfig aa = SweepConfig::from_json_text(kAAConfig);
  aa.grid = {0.5, 1.5, 3};
  aa.size = 24;
  const auto aa_rows = run_fidelity_compare(aa, 1e-5, 2);
  for (const auto& r : aa_rows)
    CHECK(std::abs(r.chi_delta - r.four_chi_f) / r.four_chi_f <= 1e-3);
}

TEST_CASE("derivative_step_must_match_the_grid") {
  SweepConfig cfg = SweepConfig::from_json_text(kAAConfig);
  cfg.derivative_step = 0.5;  // equals the grid step: accepted
  CHECK_NOTHROW(run_sweep(cfg));
  cfg.derivative_step = 0.3;
  CHECK_THROWS_WITH_AS(run_sweep(cfg), doctest::Contains("derivative_step"),
                       std::invalid_argument);
}

TEST_CASE("selftest_passes") {
  std::ostringstream log;
  CHECK(run_selftest(log) == 0);
  CHECK(log.str().find("FAIL") == std::string::npos);
}

}  // TEST_SUITE
