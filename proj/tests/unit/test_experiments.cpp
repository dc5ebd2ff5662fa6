#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "mqcsim/error.hpp"
#include "mqcsim/experiments.hpp"
#include "support.hpp"

using namespace mqcsim;

namespace {

ExperimentConfig small(std::size_t n = 6) {
  ExperimentConfig cfg;
  cfg.geometry.sites = n;
  cfg.orientation = {0.4, 1.1, 2.0};
  cfg.schedule = {2, 4, 6, 8, 10, 12, 14, 16};
  cfg.tau_c = 0.1;
  cfg.workers = 1;
  return cfg;
}

std::string growth_text(const std::vector<GrowthCurve>& curves) {
  std::ostringstream out;
  write_growth_csv(out, curves, 0.5);
  write_spectra_csv(out, curves);
  return out.str();
}

ErrorKind kind_of(const ExperimentConfig& cfg) {
  try {
    cfg.validate();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("config unexpectedly valid");
  return ErrorKind::invariant;
}

}  // namespace

TEST_CASE("growth starts from an uncorrelated state") {
  ExperimentConfig cfg = small();
  cfg.schedule = {0, 5, 10};
  const auto curves = growth_experiment(cfg);
  REQUIRE(curves.size() == 1);
  const GrowthCurve& c = curves[0];
  CHECK(c.estimates[0].k == 1.0);
  CHECK(c.estimates[0].below_resolution);
  CHECK(c.k0 == 1.0);
  CHECK(c.estimates[2].k > 1.5);
  CHECK(c.times[1] == doctest::Approx(0.5));
  for (double e : c.echo) CHECK(e == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("unperturbed spectra keep a constant total") {
  ExperimentConfig cfg = small(8);
  cfg.normalization = Normalization::raw;
  const auto c = growth_experiment(cfg).front();
  const double first = c.spectra.front().total();
  for (const auto& s : c.spectra) CHECK(std::abs(s.total() - first) < 1e-10 * first);
}

TEST_CASE("p = 0 runs collapse onto the growth experiment") {
  const ExperimentConfig cfg = small();
  const std::string grow = growth_text(growth_experiment(cfg));
  CHECK(growth_text(perturbed_growth(cfg)) == grow);
  CHECK(growth_text(equilibrium_experiment(cfg)) == grow);
}

TEST_CASE("N0 = 0 equilibrium equals perturbed growth") {
  ExperimentConfig cfg = small();
  cfg.p_values = {0.3};
  CHECK(growth_text(equilibrium_experiment(cfg)) == growth_text(perturbed_growth(cfg)));
}

TEST_CASE("echo equals the phase-zero protocol signal") {
  ExperimentConfig cfg = small(5);
  cfg.p_values = {0.35};
  cfg.schedule = {3, 9};
  const auto c = perturbed_growth(cfg).front();

  const SiteSet sites = cfg.geometry.build(cfg.seed);
  const CouplingTable table = couplings(sites, cfg.orientation, prefactor_for_nearest_neighbor(sites, 1.0));
  const HilbertSpace space(5);
  const Operator h0 = build_h0(table, space);
  const Operator heff = mix_hamiltonians(h0, build_hdd(table, space), 0.35);
  for (std::size_t i = 0; i < c.cycles.size(); ++i) {
    const double t = static_cast<double>(c.cycles[i]) * cfg.tau_c;
    const DensityOperator act = evolve(thermal_state(space), propagator(heff, t));
    const auto samples = phase_encoded_signal(act, propagator(h0, -0.65 * t), 16);
    CHECK(std::abs(c.echo[i] - samples[0].signal) < 1e-10);
    CHECK(std::abs(c.spectra[i].total() - c.echo[i]) < 1e-12);
  }
}

TEST_CASE("pulsed and effective cycles agree for short periods") {
  ExperimentConfig cfg = small(4);
  cfg.p_values = {0.3};
  cfg.tau_c = 0.01;
  cfg.schedule = {50, 100};
  const auto eff = perturbed_growth(cfg).front();
  cfg.mode = CycleMode::pulsed;
  const auto pul = perturbed_growth(cfg).front();
  for (std::size_t i = 0; i < eff.echo.size(); ++i) CHECK(std::abs(eff.echo[i] - pul.echo[i]) < 1e-3);
}

TEST_CASE("echo decay") {
  ExperimentConfig cfg = small();
  for (double e : echo_decay(cfg).values) CHECK(e == doctest::Approx(1.0).epsilon(1e-10));

  cfg.error_model = ErrorModel::z_field;
  cfg.error_strength = 0.5;
  cfg.realizations = 4;
  const EchoCurve curve = echo_decay(cfg);
  CHECK(curve.values.size() == cfg.schedule.size());
  for (std::size_t i = 1; i < curve.values.size(); ++i) CHECK(curve.values[i] < curve.values[i - 1]);
  CHECK(curve.values.front() < 1.0);

  cfg.error_model = ErrorModel::coupling;
  cfg.error_strength = 0.2;
  CHECK(echo_decay(cfg).values.back() < 1.0);
}

TEST_CASE("prepared clusters record their initial size") {
  ExperimentConfig cfg = small();
  cfg.p_values = {0.3};
  cfg.prep_cycles = {0, 10, 30};
  const auto curves = equilibrium_experiment(cfg);
  REQUIRE(curves.size() == 3);
  CHECK(curves[0].k0 == 1.0);
  CHECK(curves[1].k0 > 1.5);
  CHECK(curves[2].prep_cycles == 30);
}

TEST_CASE("results do not depend on the worker count") {
  ExperimentConfig cfg = small(5);
  cfg.orientation_mode = OrientationMode::powder;
  cfg.powder_count = 3;
  cfg.p_values = {0.0, 0.2};
  cfg.error_model = ErrorModel::z_field;
  cfg.error_strength = 0.3;
  cfg.realizations = 2;
  CHECK(cfg.members() == 6);
  const std::string serial = growth_text(perturbed_growth(cfg));
  cfg.workers = 4;
  CHECK(growth_text(perturbed_growth(cfg)) == serial);
  CHECK(growth_text(perturbed_growth(cfg)) == serial);
  CHECK(cfg.orientation_id() == "powder:3");
}

TEST_CASE("configuration validation") {
  ExperimentConfig cfg = small();
  CHECK_NOTHROW(cfg.validate());
  auto with = [&](auto edit) {
    ExperimentConfig c = cfg;
    edit(c);
    return kind_of(c);
  };
  CHECK(with([](auto& c) { c.p_values = {1.2}; }) == ErrorKind::config);
  CHECK(with([](auto& c) { c.p_values = {1.0}; }) == ErrorKind::config);
  CHECK(with([](auto& c) { c.schedule = {3, 3}; }) == ErrorKind::config);
  CHECK(with([](auto& c) { c.prep_cycles = {-1}; }) == ErrorKind::config);
  CHECK(with([](auto& c) { c.tau_c = 0.0; }) == ErrorKind::config);
  CHECK(with([](auto& c) { c.geometry.sites = 16; c.geometry.max_sites = 19; }) == ErrorKind::resource_cap);
  CHECK(with([](auto& c) { c.geometry.sites = 20; }) == ErrorKind::config);
  for (auto m : {ErrorModel::none, ErrorModel::z_field, ErrorModel::coupling}) CHECK(parse_error_model(to_string(m)) == m);
  for (auto m : {OrientationMode::single, OrientationMode::powder}) CHECK(parse_orientation_mode(to_string(m)) == m);
}

TEST_CASE("experiment preconditions") {
  ExperimentConfig cfg = small();
  cfg.p_values = {0.2};
  CHECK_THROWS_AS((void)growth_experiment(cfg), Error);
  cfg.p_values = {0.0};
  cfg.prep_cycles = {4};
  CHECK_THROWS_AS((void)perturbed_growth(cfg), Error);
  CHECK_THROWS_AS((void)echo_decay(cfg), Error);
}

TEST_CASE("stationary size") {
  const StationaryEstimate flat = stationary_size(std::vector<double>(16, 7.5));
  CHECK(flat.mean == 7.5);
  CHECK(flat.spread == 0.0);
  CHECK(flat.converged);
  CHECK(flat.points == 4);

  std::vector<double> rising;
  for (int i = 0; i < 16; ++i) rising.push_back(1.0 + i);
  CHECK_FALSE(stationary_size(rising).converged);

  std::vector<double> settled{1, 3, 6, 9, 10, 10.2, 9.9, 10.1, 10.0};
  const StationaryEstimate s = stationary_size(settled, 0.5);
  CHECK(s.points == 5);
  CHECK(s.converged);
  CHECK(s.mean == doctest::Approx(10.04));

  CHECK_THROWS_AS((void)stationary_size(std::vector<double>(8, 1.0)), Error);
  std::vector<double> with_nan(16, 3.0);
  with_nan.back() = std::numeric_limits<double>::quiet_NaN();
  const StationaryEstimate bad = stationary_size(with_nan);
  CHECK(std::isnan(bad.mean));
  CHECK_FALSE(bad.converged);
}

TEST_CASE("power law fit") {
  std::vector<double> p{0.05, 0.1, 0.2, 0.4}, k;
  for (double x : p) k.push_back(3.0 / (x * x));
  const PowerLawFit fit = power_law_fit(p, k);
  CHECK(fit.available);
  CHECK(fit.slope == doctest::Approx(-2.0).epsilon(0.005));
  CHECK(fit.slope_error < 0.01);
  CHECK(fit.points == 4);

  const PowerLawFit two = power_law_fit({0.1, 0.3}, {50.0, 9.0});
  CHECK(two.available);
  CHECK(two.slope_error == 0.0);
  CHECK(two.slope == doctest::Approx(std::log(9.0 / 50.0) / std::log(3.0)));

  const PowerLawFit none = power_law_fit({0.0, 0.1}, {12.0, 5.0});
  CHECK_FALSE(none.available);
  CHECK_FALSE(none.reason.empty());
}

TEST_CASE("sweep summary withholds the slope when nothing converged") {
  GrowthCurve c;
  c.p = 0.2;
  c.spins = 6;
  for (int i = 0; i < 8; ++i) {
    ClusterEstimate e;
    e.k = 1.0 + i;
    c.estimates.push_back(e);
  }
  const SweepResult r = summarize_sweep({c, c}, 0.5);
  CHECK(r.rows.size() == 2);
  CHECK_FALSE(r.fit.available);
  std::ostringstream ksat, slope;
  write_ksat_csv(ksat, r);
  write_slope_csv(slope, r);
  CHECK(ksat.str().rfind("p,K_sat,spread,converged\n", 0) == 0);
  CHECK(slope.str().find("no p value") != std::string::npos);
}
