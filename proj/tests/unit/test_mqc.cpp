#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "mqcsim/error.hpp"
#include "mqcsim/mqc.hpp"
#include "mqcsim/oracle.hpp"
#include "support.hpp"

using namespace mqcsim;
using test::fcc_table;
using test::max_abs;

namespace {

std::vector<PhaseSample> synthetic_signal(std::size_t grid, double (*f)(double)) {
  std::vector<PhaseSample> out(grid);
  for (std::size_t k = 0; k < grid; ++k) {
    const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(grid);
    out[k] = {phi, f(phi), 0.0};
  }
  return out;
}

MqcSpectrum gaussian(double k, int max_order) {
  MqcSpectrum s = MqcSpectrum::zeros(max_order, Normalization::unit_sum);
  for (int m = -max_order; m <= max_order; m += 2) s.at(m) = std::exp(-m * m / k);
  return s;
}

MqcSpectrum binomial(int k) {
  const std::vector<double> counts = binomial_counts(k);
  MqcSpectrum s = MqcSpectrum::zeros(k, Normalization::raw);
  for (int m = -k; m <= k; m += 2) s.at(m) = counts[static_cast<std::size_t>(m + k)];
  return s;
}

DensityOperator grown(const HilbertSpace& space, const Operator& h, double t) {
  return evolve(thermal_state(space), propagator(h, t));
}

}  // namespace

TEST_CASE("coherence decomposition partitions the matrix") {
  const HilbertSpace space(4);
  RandomStream rng(2);
  const DensityOperator rho(space, test::random_hermitian(4, rng), false);
  const auto parts = decompose_by_coherence(rho);
  Matrix sum = Matrix::Zero(16, 16);
  double squares = 0.0;
  for (const auto& [m, part] : parts) {
    sum += part;
    squares += part.squaredNorm();
    CHECK(max_abs(part.adjoint() - parts.at(-m)) == 0.0);
  }
  CHECK(max_abs(sum - rho.matrix()) == 0.0);
  CHECK(squares == doctest::Approx(rho.purity()).epsilon(1e-14));

  const auto diag = decompose_by_coherence(thermal_state(space));
  for (const auto& [m, part] : diag) CHECK((m == 0) == (max_abs(part) > 0.0));

  Matrix dq = Matrix::Zero(4, 4);
  dq(3, 0) = 1.0;
  dq(0, 3) = 1.0;
  const auto two = decompose_by_coherence(DensityOperator(HilbertSpace(2), dq, true));
  CHECK(two.at(2)(3, 0) == Complex(1.0));
  CHECK(max_abs(two.at(0)) == 0.0);
  CHECK_THROWS_AS((void)decompose_by_coherence(rho, 1024), Error);
}

TEST_CASE("direct spectrum examples") {
  const HilbertSpace space(4);
  const DensityOperator rho0 = thermal_state(space);
  const MqcSpectrum s = spectrum_direct(rho0, rho0);
  CHECK(s.at(0) == doctest::Approx(rho0.purity()));
  for (int m = -4; m <= 4; ++m)
    if (m != 0) CHECK(s.at(m) == 0.0);

  Matrix dq = Matrix::Zero(16, 16);
  dq(0b0011, 0) = Complex(0.3, 0.4);
  dq(0, 0b0011) = Complex(0.3, -0.4);
  const DensityOperator pure(space, dq, true);
  const MqcSpectrum sp = spectrum_direct(pure, pure);
  CHECK(sp.at(2) == doctest::Approx(0.25));
  CHECK(sp.at(-2) == doctest::Approx(0.25));
  CHECK(sp.at(0) == 0.0);

  Matrix other = Matrix::Zero(16, 16);
  other(0b1100, 0) = 1.0;
  other(0, 0b1100) = 1.0;
  const MqcSpectrum orth = spectrum_direct(pure, DensityOperator(space, other, true));
  for (double a : orth.amplitudes) CHECK(a == 0.0);
}

TEST_CASE("direct spectrum matches the brute-force loop on random matrices") {
  RandomStream rng(99);
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + trial % 5;
    const HilbertSpace space(n);
    const DensityOperator a(space, test::random_hermitian(n, rng), false);
    const DensityOperator b(space, test::random_hermitian(n, rng), false);
    const MqcSpectrum x = spectrum_direct(a, b);
    const MqcSpectrum y = oracle::spectrum(a, b);
    for (std::size_t k = 0; k < x.amplitudes.size(); ++k) worst = std::max(worst, std::abs(x.amplitudes[k] - y.amplitudes[k]));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("spectrum symmetry, normalization and selection rule for grown states") {
  for (int n : {4, 6}) {
    const HilbertSpace space(n);
    const CouplingTable t = fcc_table(static_cast<std::size_t>(n));
    const Operator heff = mix_hamiltonians(build_h0(t, space), build_hdd(t, space), 0.3);
    const DensityOperator ref = grown(space, build_h0(t, space), 1.4);
    const DensityOperator act = grown(space, heff, 2.0);
    const MqcSpectrum raw = spectrum_direct(ref, act);
    CHECK(raw.asymmetry() < 1e-10);
    CHECK(raw.odd_weight() < 1e-12 * std::abs(raw.total()));
    const MqcSpectrum unit = normalized(raw, Normalization::unit_sum, 0.0);
    CHECK(unit.total() == doctest::Approx(1.0).epsilon(1e-12));
    const MqcSpectrum self = spectrum_direct(ref, ref);
    CHECK(self.total() == doctest::Approx(ref.purity()).epsilon(1e-12));
    for (double a : self.amplitudes) CHECK(a >= 0.0);
  }
  CHECK_THROWS_AS((void)normalized(MqcSpectrum::zeros(2, Normalization::echo), Normalization::unit_sum, 1.0), Error);
}

TEST_CASE("signal to spectrum on synthetic signals") {
  const MqcSpectrum flat = spectrum_from_signal(synthetic_signal(16, [](double) { return 1.0; }), 6);
  CHECK(flat.at(0) == doctest::Approx(1.0));
  for (int m = 1; m <= 6; ++m) CHECK(std::abs(flat.at(m)) < 1e-15);
  const MqcSpectrum cosine = spectrum_from_signal(synthetic_signal(16, [](double p) { return std::cos(2.0 * p); }), 6);
  CHECK(cosine.at(2) == doctest::Approx(0.5));
  CHECK(cosine.at(-2) == doctest::Approx(0.5));
  CHECK(std::abs(cosine.at(0)) < 1e-15);
  CHECK_FALSE(cosine.residue_flag);
  CHECK_THROWS_AS((void)spectrum_from_signal(synthetic_signal(8, [](double) { return 1.0; }), 4), Error);
}

TEST_CASE("phase protocol") {
  SUBCASE("no evolution gives a flat unit signal") {
    const HilbertSpace space(4);
    const auto dim = static_cast<Eigen::Index>(space.dim());
    const auto samples = phase_encoded_signal(thermal_state(space), Propagator(space, Matrix::Identity(dim, dim)), 16);
    for (const auto& s : samples) CHECK(s.signal == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("grid below the Nyquist bound is refused") {
    const HilbertSpace space(4);
    const auto dim = static_cast<Eigen::Index>(space.dim());
    CHECK_THROWS_AS((void)phase_encoded_signal(thermal_state(space), Propagator(space, Matrix::Identity(dim, dim)), 9),
                    Error);
    CHECK(default_phase_grid(4) == 16);
    CHECK(default_phase_grid(7) == 16);
    CHECK(default_phase_grid(8) == 32);
  }
  SUBCASE("two spins: a + b cos(2 phi) from the closed form") {
    const double d = 1.0;
    const CouplingTable t = couplings(build_chain(1.0, 2, {1, 0, 0}, 2), {}, d);
    const HilbertSpace space(2);
    const Operator h0 = build_h0(t, space);
    for (double time : {0.3, 1.1}) {
      const auto samples = phase_encoded_signal(grown(space, h0, time), propagator(h0, -time), 8);
      const auto o = oracle::two_spin(d, time);
      const double purity0 = thermal_state(space).purity();
      for (const auto& s : samples) {
        const double expected = (o.a0 + 2.0 * o.a2 * std::cos(2.0 * s.phi)) / purity0;
        CHECK(s.signal == doctest::Approx(expected).epsilon(1e-12));
        CHECK(std::abs(s.imaginary) < 1e-12);
      }
    }
  }
  SUBCASE("Fourier-extracted spectrum equals the direct spectrum") {
    for (int n : {3, 4, 5, 6}) {
      const HilbertSpace space(n);
      const CouplingTable t = fcc_table(static_cast<std::size_t>(n));
      const Operator h0 = build_h0(t, space);
      const Operator hdd = build_hdd(t, space);
      const DensityOperator rho0 = thermal_state(space);
      for (double p : {0.0, 0.4}) {
        const double tc = 1.3;
        const double t0 = (1.0 - p) * tc;
        const DensityOperator act = grown(space, mix_hamiltonians(h0, hdd, p), tc);
        const auto samples = phase_encoded_signal(act, propagator(h0, -t0), default_phase_grid(n));
        const MqcSpectrum protocol = spectrum_from_signal(samples, n);
        const MqcSpectrum direct = normalized(spectrum_direct(grown(space, h0, t0), act), Normalization::echo, rho0.purity());
        for (int m = -n; m <= n; ++m) CHECK(std::abs(protocol.at(m) - direct.at(m)) < 1e-10);
        CHECK(protocol.total() == doctest::Approx(samples[0].signal).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("binomial counts") {
  CHECK(binomial_counts(1) == std::vector<double>{1, 2, 1});
  const auto c = binomial_counts(12);
  for (int m = 0; m <= 12; ++m) CHECK(c[static_cast<std::size_t>(12 + m)] == c[static_cast<std::size_t>(12 - m)]);
  CHECK(c[12] == 2704156.0);
  const auto g = binomial_counts(30);
  for (int m = 0; m * m <= 30; ++m) {
    const double ratio = g[static_cast<std::size_t>(30 + m)] / g[30];
    CHECK(ratio == doctest::Approx(std::exp(-m * m / 30.0)).epsilon(0.05));
  }
  CHECK(std::isfinite(binomial_counts(500)[500]));
}

TEST_CASE("cluster size fit") {
  const ClusterEstimate g = fit_cluster_size(gaussian(16.0, 30));
  CHECK(g.k == doctest::Approx(16.0).epsilon(0.01 / 16.0));
  CHECK(g.sigma == doctest::Approx(4.0).epsilon(1e-3));
  CHECK(g.points >= 3);
  CHECK_FALSE(g.below_resolution);

  MqcSpectrum lone = MqcSpectrum::zeros(6, Normalization::raw);
  lone.at(0) = 1.0;
  const ClusterEstimate one = fit_cluster_size(lone);
  CHECK(one.below_resolution);
  CHECK(one.k == 1.0);

  const ClusterEstimate b = fit_cluster_size(binomial(16));
  CHECK(b.k == doctest::Approx(16.0).epsilon(0.10));

  MqcSpectrum rising = MqcSpectrum::zeros(6, Normalization::raw);
  for (int m = -6; m <= 6; m += 2) rising.at(m) = 1.0 + m * m;
  const ClusterEstimate bad = fit_cluster_size(rising);
  CHECK(bad.non_gaussian);
  CHECK(std::isnan(bad.k));
}

TEST_CASE("spectrum text round-trips") {
  MqcSpectrum s = gaussian(9.0, 6);
  s.metadata = {6, 1.5, 0.3, 15, 2, 0.07, 0.03, 4.25, 77, "powder:8"};
  s.imaginary_residue = 1e-17;
  std::stringstream io;
  write_spectrum(io, s);
  const MqcSpectrum back = read_spectrum(io);
  CHECK(back.amplitudes == s.amplitudes);
  CHECK(back.normalization == s.normalization);
  CHECK(back.metadata.time == 1.5);
  CHECK(back.metadata.k0 == 4.25);
  CHECK(back.metadata.seed == 77);
  CHECK(back.metadata.orientation == "powder:8");
  CHECK(back.metadata.prep_cycles == 2);
  for (auto n : {Normalization::raw, Normalization::echo, Normalization::unit_sum}) CHECK(parse_normalization(to_string(n)) == n);
}
