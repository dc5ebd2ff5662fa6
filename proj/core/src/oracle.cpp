#include "mqcsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "mqcsim/error.hpp"

namespace mqcsim::oracle {
namespace {

using C = std::complex<double>;

struct Dense {
  std::size_t n = 0;
  std::vector<C> a;  // row-major

  explicit Dense(std::size_t size) : n(size), a(size * size) {}
  C& operator()(std::size_t r, std::size_t c) { return a[r * n + c]; }
  C operator()(std::size_t r, std::size_t c) const { return a[r * n + c]; }

  static Dense identity(std::size_t size) {
    Dense m(size);
    for (std::size_t i = 0; i < size; ++i) m(i, i) = 1.0;
    return m;
  }
};

Dense multiply(const Dense& x, const Dense& y) {
  Dense out(x.n);
  for (std::size_t i = 0; i < x.n; ++i)
    for (std::size_t k = 0; k < x.n; ++k) {
      const C xik = x(i, k);
      if (xik == C{}) continue;
      for (std::size_t j = 0; j < x.n; ++j) out(i, j) += xik * y(k, j);
    }
  return out;
}

Dense kron(const Dense& x, const Dense& y) {
  Dense out(x.n * y.n);
  for (std::size_t i = 0; i < x.n; ++i)
    for (std::size_t j = 0; j < x.n; ++j)
      for (std::size_t k = 0; k < y.n; ++k)
        for (std::size_t l = 0; l < y.n; ++l) out(i * y.n + k, j * y.n + l) = x(i, j) * y(k, l);
  return out;
}

double one_norm(const Dense& m) {
  double best = 0.0;
  for (std::size_t c = 0; c < m.n; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < m.n; ++r) s += std::abs(m(r, c));
    best = std::max(best, s);
  }
  return best;
}

Dense from_eigen(const Matrix& m) {
  Dense d(static_cast<std::size_t>(m.rows()));
  for (std::size_t r = 0; r < d.n; ++r)
    for (std::size_t c = 0; c < d.n; ++c) d(r, c) = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  return d;
}

Matrix to_eigen(const Dense& d) {
  const auto n = static_cast<Eigen::Index>(d.n);
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = d(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  return m;
}

int bits_set(std::size_t x) {
  int count = 0;
  for (; x != 0; x >>= 1) count += static_cast<int>(x & 1U);
  return count;
}

// Single-spin operators in the (down, up) basis, index 1 = up.
Dense spin_x() {
  Dense s(2);
  s(0, 1) = 0.5;
  s(1, 0) = 0.5;
  return s;
}
Dense spin_y() {
  Dense s(2);
  s(1, 0) = C(0.0, -0.5);  // <up| Iy |down> = 1 / (2i)
  s(0, 1) = C(0.0, 0.5);
  return s;
}
Dense spin_z() {
  Dense s(2);
  s(0, 0) = -0.5;
  s(1, 1) = 0.5;
  return s;
}

// Operator `op` acting on spin `site` of n. Site 0 is the least significant
// bit, so it is the rightmost Kronecker factor.
Dense embed(const Dense& op, std::size_t site, std::size_t n) {
  Dense out = Dense::identity(1);
  for (std::size_t k = n; k-- > 0;) out = kron(out, k == site ? op : Dense::identity(2));
  return out;
}

Dense add(const Dense& x, const Dense& y, C scale) {
  Dense out = x;
  for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] += scale * y.a[i];
  return out;
}

Matrix pair_sum(const CouplingTable& table, double zz, double xx, double yy) {
  const std::size_t n = table.site_count;
  require(n >= 1 && n <= static_cast<std::size_t>(kMaxExponentialSpins), "oracle Hamiltonians are limited to 6 spins");
  const std::size_t dim = std::size_t{1} << n;
  std::vector<Dense> ix, iy, iz;
  for (std::size_t s = 0; s < n; ++s) {
    ix.push_back(embed(spin_x(), s, n));
    iy.push_back(embed(spin_y(), s, n));
    iz.push_back(embed(spin_z(), s, n));
  }
  Dense h(dim);
  for (const auto& c : table.entries) {
    if (c.d == 0.0) continue;
    h = add(h, multiply(iz[c.i], iz[c.j]), zz * c.d);
    h = add(h, multiply(ix[c.i], ix[c.j]), xx * c.d);
    h = add(h, multiply(iy[c.i], iy[c.j]), yy * c.d);
  }
  return to_eigen(h);
}

}  // namespace

OracleReport OracleReport::compare(std::string quantity, std::vector<double> main_values,
                                   std::vector<double> oracle_values, double tolerance) {
  OracleReport r;
  r.quantity = std::move(quantity);
  r.tolerance = tolerance;
  if (main_values.size() != oracle_values.size()) {
    r.deviation = std::numeric_limits<double>::infinity();
  } else {
    for (std::size_t i = 0; i < main_values.size(); ++i) {
      const double d = std::abs(main_values[i] - oracle_values[i]);
      r.deviation = std::isnan(d) ? std::numeric_limits<double>::infinity() : std::max(r.deviation, d);
    }
  }
  r.main_values = std::move(main_values);
  r.oracle_values = std::move(oracle_values);
  r.pass = r.deviation <= r.tolerance;
  return r;
}

void print(std::ostream& out, const OracleReport& r) {
  const auto flags = out.flags();
  out << std::left << std::setw(44) << r.quantity << std::right << " values=" << std::setw(5) << r.main_values.size()
      << " deviation=" << std::scientific << std::setprecision(3) << std::setw(10) << r.deviation
      << " tolerance=" << std::setw(10) << r.tolerance << "  " << (r.pass ? "PASS" : "FAIL") << '\n';
  out.flags(flags);
}

MqcSpectrum spectrum(const DensityOperator& ref, const DensityOperator& actual) {
  const int n = ref.space().spins();
  require(n <= kMaxSpectrumSpins, "oracle spectrum is limited to 8 spins");
  require(actual.space().spins() == n, "oracle spectrum inputs differ in size");
  const std::size_t dim = std::size_t{1} << n;
  std::vector<double> bins(static_cast<std::size_t>(2 * n + 1), 0.0);
  for (std::size_t row = 0; row < dim; ++row)
    for (std::size_t col = 0; col < dim; ++col) {
      const auto r = static_cast<Eigen::Index>(row);
      const auto c = static_cast<Eigen::Index>(col);
      const C x = ref.matrix()(r, c);
      const C y = actual.matrix()(r, c);
      // Re(conj(x) y) written out.
      const double product = x.real() * y.real() + x.imag() * y.imag();
      const int order = bits_set(row) - bits_set(col);
      bins[static_cast<std::size_t>(order + n)] += product;
    }
  MqcSpectrum s;
  s.amplitudes = std::move(bins);
  s.normalization = Normalization::raw;
  s.metadata.spins = n;
  return s;
}

TwoSpinResult two_spin(double d, double t) {
  const double c = std::cos(d * t);
  const double s = std::sin(d * t);
  TwoSpinResult r;
  r.rho = Matrix::Zero(4, 4);
  // Basis index 3 = up up, 0 = down down. sigma_y in (up up, down down) order
  // has <upup|sigma_y|downdown> = -i.
  r.rho(3, 3) = 0.5 * c;
  r.rho(0, 0) = -0.5 * c;
  r.rho(3, 0) = C(0.0, -0.5 * s);
  r.rho(0, 3) = C(0.0, 0.5 * s);
  r.a0 = 0.5 * c * c;
  r.a2 = 0.25 * s * s;
  return r;
}

double two_spin_first_maximum(double d) {
  require(d != 0.0, "an uncoupled pair never develops double-quantum coherence");
  return std::numbers::pi / (2.0 * std::abs(d));
}

Matrix matrix_exp(const Matrix& h, double t) {
  require(h.rows() == h.cols(), "matrix exponential needs a square matrix");
  require(h.rows() <= (Eigen::Index{1} << kMaxExponentialSpins), "oracle exponential is limited to 6 spins");
  Dense x = from_eigen(h);
  for (auto& v : x.a) v *= C(0.0, -t);
  int squarings = 0;
  const double norm = one_norm(x);
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const double scale = std::ldexp(1.0, -squarings);
  for (auto& v : x.a) v *= scale;
  // ||x|| <= 1/2, so 30 terms leave a remainder far below 1e-16.
  Dense result = Dense::identity(x.n);
  Dense term = Dense::identity(x.n);
  for (int k = 1; k <= 30; ++k) {
    term = multiply(term, x);
    for (auto& v : term.a) v /= static_cast<double>(k);
    result = add(result, term, 1.0);
  }
  for (int s = 0; s < squarings; ++s) result = multiply(result, result);
  return to_eigen(result);
}

Matrix dipolar_hamiltonian(const CouplingTable& table) { return pair_sum(table, 2.0, -1.0, -1.0); }

Matrix double_quantum_hamiltonian(const CouplingTable& table) { return pair_sum(table, 0.0, -1.0, 1.0); }

}  // namespace mqcsim::oracle
