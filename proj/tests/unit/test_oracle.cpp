#include <doctest.h>

#include <cmath>
#include <memory>
#include <sstream>

#include "mqcsim/error.hpp"
#include "mqcsim/evolve.hpp"
#include "mqcsim/oracle.hpp"
#include "support.hpp"

using namespace mqcsim;
using test::fcc_table;
using test::max_abs;

namespace {

// Double-quantum amplitude of a coupled pair from the main evolution path.
class PairAmplitude {
 public:
  explicit PairAmplitude(double d)
      : space_(2),
        dec_(std::make_shared<SpectralDecomposition>(SpectralDecomposition::of_hamiltonian(
            build_h0(couplings(build_chain(1.0, 2, {1, 0, 0}, 2), {}, d), space_)))),
        traj_(dec_, thermal_state(space_)) {}

  double operator()(double t) const {
    const Matrix rho = traj_.matrix_at(t);
    return spectrum_direct(rho, rho, space_).at(2);
  }

 private:
  HilbertSpace space_;
  std::shared_ptr<const SpectralDecomposition> dec_;
  Trajectory traj_;
};

}  // namespace

TEST_CASE("two-spin closed form") {
  const auto zero = oracle::two_spin(0.7, 0.0);
  CHECK(zero.a2 == 0.0);
  CHECK(zero.a0 == 0.5);
  for (double t : {0.3, 1.0, 2.2, 5.0}) {
    const auto r = oracle::two_spin(0.7, t);
    CHECK(r.a0 + 2.0 * r.a2 == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(max_abs(r.rho - r.rho.adjoint()) == 0.0);
  }
}

TEST_CASE("two-spin state matches the main evolution path") {
  const double d = 0.7;
  const HilbertSpace space(2);
  const Operator h0 = build_h0(couplings(build_chain(1.0, 2, {1, 0, 0}, 2), {}, d), space);
  for (double t : {0.2, 1.9, 4.4}) {
    const DensityOperator rho = evolve(thermal_state(space), propagator(h0, t));
    CHECK(max_abs(rho.matrix() - oracle::two_spin(d, t).rho) < 1e-14);
  }
}

TEST_CASE("first double-quantum maximum: scan agrees with the closed form") {
  const double d = 1.3;
  const PairAmplitude a2(d);
  // Bracket the first local maximum on a dense grid, then bisect on the
  // symmetric difference a2(t + h) - a2(t - h), which changes sign there.
  const double dt = 1e-3;
  double t = dt;
  while (!(a2(t + dt) < a2(t))) t += dt;
  const double h = 0.05;
  auto slope = [&](double x) { return a2(x + h) - a2(x - h); };
  double lo = t - dt, hi = t + dt;
  REQUIRE(slope(lo) > 0.0);
  REQUIRE(slope(hi) < 0.0);
  for (int k = 0; k < 60; ++k) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) > 0.0 ? lo : hi) = mid;
  }
  CHECK(std::abs(0.5 * (lo + hi) - oracle::two_spin_first_maximum(d)) < 1e-9);
  CHECK(oracle::two_spin_first_maximum(-d) == oracle::two_spin_first_maximum(d));
  CHECK_THROWS_AS((void)oracle::two_spin_first_maximum(0.0), Error);
}

TEST_CASE("series exponential examples") {
  const Matrix zero = Matrix::Zero(8, 8);
  CHECK(max_abs(oracle::matrix_exp(zero, 3.0) - Matrix::Identity(8, 8)) == 0.0);
  Matrix diag = Matrix::Zero(4, 4);
  diag.diagonal() << 0.5, -1.0, 2.0, 0.0;
  const Matrix u = oracle::matrix_exp(diag, 0.7);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(u(k, k) - std::polar(1.0, -0.7 * diag(k, k).real())) < 1e-14);
  CHECK_THROWS_AS((void)oracle::matrix_exp(Matrix::Zero(128, 128), 1.0), Error);
}

TEST_CASE("Kronecker-product Hamiltonians match the bitmask builders") {
  for (int n : {2, 3, 5, 6}) {
    const CouplingTable t = fcc_table(static_cast<std::size_t>(n));
    const HilbertSpace space(n);
    CHECK(max_abs(build_hdd(t, space).matrix() - oracle::dipolar_hamiltonian(t)) < 1e-15);
    CHECK(max_abs(build_h0(t, space).matrix() - oracle::double_quantum_hamiltonian(t)) < 1e-15);
  }
  CHECK_THROWS_AS((void)oracle::dipolar_hamiltonian(fcc_table(7)), Error);
}

TEST_CASE("oracle spectrum examples and guard") {
  const HilbertSpace space(3);
  const DensityOperator rho0 = thermal_state(space);
  const MqcSpectrum s = oracle::spectrum(rho0, rho0);
  for (int m = -3; m <= 3; ++m) CHECK((m == 0) == (s.at(m) != 0.0));
  const HilbertSpace nine(9);
  CHECK_THROWS_AS((void)oracle::spectrum(thermal_state(nine), thermal_state(nine)), Error);
}

TEST_CASE("oracle spectrum agrees with the protocol on grown four-spin states") {
  const HilbertSpace space(4);
  const CouplingTable t = fcc_table(4);
  const Operator h0 = build_h0(t, space);
  const DensityOperator rho0 = thermal_state(space);
  for (double time : {0.5, 2.5}) {
    const DensityOperator rho = evolve(rho0, propagator(h0, time));
    const MqcSpectrum protocol = spectrum_from_signal(phase_encoded_signal(rho, propagator(h0, -time), 16), 4);
    const MqcSpectrum brute = normalized(oracle::spectrum(rho, rho), Normalization::echo, rho0.purity());
    for (int m = -4; m <= 4; ++m) CHECK(std::abs(protocol.at(m) - brute.at(m)) < 1e-12);
  }
}

TEST_CASE("reports") {
  const auto ok = oracle::OracleReport::compare("x", {1.0, 2.0}, {1.0, 2.0 + 1e-13}, 1e-12);
  CHECK(ok.pass);
  CHECK(ok.deviation == doctest::Approx(1e-13).epsilon(0.01));
  const auto bad = oracle::OracleReport::compare("y", {1.0}, {1.1}, 1e-3);
  CHECK_FALSE(bad.pass);
  CHECK_FALSE(oracle::OracleReport::compare("z", {1.0}, {1.0, 2.0}, 1.0).pass);
  std::ostringstream out;
  oracle::print(out, ok);
  oracle::print(out, bad);
  CHECK(out.str().find("PASS") != std::string::npos);
  CHECK(out.str().find("FAIL") != std::string::npos);
}
