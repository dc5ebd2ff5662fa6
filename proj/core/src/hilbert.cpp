#include "mqcsim/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "mqcsim/error.hpp"
#include "mqcsim/text_format.hpp"

namespace mqcsim {
namespace {

constexpr double kHermitianTolerance = 1e-12;

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void require_same_space(const HilbertSpace& a, const HilbertSpace& b) {
  if (!(a == b)) fail(ErrorKind::invalid_argument, "operators live on different Hilbert spaces");
}

void require_table_matches(const CouplingTable& table, const HilbertSpace& space) {
  if (table.site_count != static_cast<std::size_t>(space.spins())) {
    fail(ErrorKind::invalid_argument, "coupling table has " + std::to_string(table.site_count) +
                                          " sites but the Hilbert space has " + std::to_string(space.spins()));
  }
}

bool is_hermitian(const Matrix& m) {
  const double scale = max_abs(m);
  if (scale == 0.0) return true;
  const double limit = kHermitianTolerance * scale;
  // Tiled so that both the tile and its transpose stay in cache.
  constexpr Eigen::Index tile = 64;
  const Eigen::Index n = m.rows();
  for (Eigen::Index c0 = 0; c0 < n; c0 += tile)
    for (Eigen::Index r0 = 0; r0 <= c0; r0 += tile) {
      const Eigen::Index rows = std::min(tile, n - r0);
      const Eigen::Index cols = std::min(tile, n - c0);
      const double dev = (m.block(r0, c0, rows, cols) - m.block(c0, r0, cols, rows).adjoint()).cwiseAbs().maxCoeff();
      if (dev > limit) return false;
    }
  return true;
}

// Both pair Hamiltonians are sums over pairs of a two-spin flip. With
// `dipolar` set this builds Hdd (Iz Iz diagonal plus antiparallel flips),
// otherwise H0 (parallel flips only).
Matrix pair_hamiltonian(const CouplingTable& table, const HilbertSpace& space, bool dipolar) {
  const std::size_t dim = space.dim();
  Matrix h = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& c : table.entries) {
    if (c.d == 0.0) continue;
    const std::size_t mask = (std::size_t{1} << c.i) | (std::size_t{1} << c.j);
    for (std::size_t b = 0; b < dim; ++b) {
      const bool up_i = (b >> c.i) & 1U;
      const bool up_j = (b >> c.j) & 1U;
      const auto col = static_cast<Eigen::Index>(b);
      const auto row = static_cast<Eigen::Index>(b ^ mask);
      if (dipolar) {
        // 2 Iz Iz = +1/2 for parallel spins, -1/2 for antiparallel.
        h(col, col) += (up_i == up_j ? 0.5 : -0.5) * c.d;
        // -(IxIx + IyIy) = -(I+I- + I-I+)/2 flips antiparallel pairs.
        if (up_i != up_j) h(row, col) += -0.5 * c.d;
      } else if (up_i == up_j) {
        // -(IxIx - IyIy) = -(I+I+ + I-I-)/2 flips parallel pairs.
        h(row, col) += -0.5 * c.d;
      }
    }
  }
  return h;
}

}  // namespace

std::size_t dense_matrix_bytes(int spins) {
  const std::size_t dim = std::size_t{1} << spins;
  return dim * dim * sizeof(Complex);
}

HilbertSpace::HilbertSpace(int spins, int max_spins) : spins_(spins) {
  require(spins >= 1, "a Hilbert space needs at least one spin");
  if (spins > max_spins) {
    const double gib = static_cast<double>(dense_matrix_bytes(spins)) / (1024.0 * 1024.0 * 1024.0);
    fail(ErrorKind::resource_cap, std::to_string(spins) + " spins exceed the cap of " + std::to_string(max_spins) +
                                      " (one dense operator needs " + format_double(gib) + " GiB)");
  }
}

Operator::Operator(HilbertSpace space, Matrix matrix, bool hermitian)
    : space_(space), matrix_(std::move(matrix)), hermitian_(hermitian) {
  const auto dim = static_cast<Eigen::Index>(space_.dim());
  if (matrix_.rows() != dim || matrix_.cols() != dim) {
    fail(ErrorKind::invalid_argument, "operator matrix does not match the Hilbert space dimension");
  }
  if (hermitian_ && !is_hermitian(matrix_)) {
    fail(ErrorKind::invalid_argument, "operator flagged Hermitian is not Hermitian");
  }
  const int n = space_.spins();
  std::vector<char> seen(static_cast<std::size_t>(2 * n + 1), 0);
  for (Eigen::Index c = 0; c < dim; ++c)
    for (Eigen::Index r = 0; r < dim; ++r)
      if (matrix_(r, c) != Complex{}) {
        seen[static_cast<std::size_t>(space_.coherence_order(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) + n)] = 1;
      }
  for (int m = -n; m <= n; ++m)
    if (seen[static_cast<std::size_t>(m + n)]) profile_.push_back(m);
}

bool Operator::is_real() const { return matrix_.imag().cwiseAbs().maxCoeff() == 0.0; }

DensityOperator::DensityOperator(HilbertSpace space, Matrix matrix, bool traceless)
    : space_(space), matrix_(std::move(matrix)), traceless_(traceless) {
  const auto dim = static_cast<Eigen::Index>(space_.dim());
  if (matrix_.rows() != dim || matrix_.cols() != dim) {
    fail(ErrorKind::invalid_argument, "density matrix does not match the Hilbert space dimension");
  }
  if (!is_hermitian(matrix_)) fail(ErrorKind::invariant, "density operator is not Hermitian");
  if (traceless_ && std::abs(matrix_.trace()) >= 1e-12 * std::max(matrix_.norm(), 1e-300)) {
    fail(ErrorKind::invariant, "density operator flagged traceless has nonzero trace");
  }
}

double DensityOperator::purity() const { return matrix_.squaredNorm(); }

double relative_difference(const Matrix& a, const Matrix& b) {
  const double scale = std::max(a.norm(), b.norm());
  if (scale == 0.0) return 0.0;
  return (a - b).norm() / scale;
}

double commutator_norm(const Matrix& a, const Matrix& b) {
  Matrix ab = a * b;
  ab.noalias() -= b * a;
  return ab.norm();
}

Operator build_iz(const HilbertSpace& space) {
  const auto dim = static_cast<Eigen::Index>(space.dim());
  Matrix m = Matrix::Zero(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) m(b, b) = space.mz(static_cast<std::size_t>(b));
  return Operator(space, std::move(m), true);
}

Operator build_hdd(const CouplingTable& table, const HilbertSpace& space) {
  require_table_matches(table, space);
  return Operator(space, pair_hamiltonian(table, space, true), true);
}

Operator build_h0(const CouplingTable& table, const HilbertSpace& space) {
  require_table_matches(table, space);
  return Operator(space, pair_hamiltonian(table, space, false), true);
}

Operator build_heff(const CouplingTable& table, double p, const HilbertSpace& space) {
  require(p >= 0.0 && p <= 1.0, "perturbation strength p must lie in [0, 1]");
  return mix_hamiltonians(build_h0(table, space), build_hdd(table, space), p);
}

Operator mix_hamiltonians(const Operator& h0, const Operator& hdd, double p) {
  require(p >= 0.0 && p <= 1.0, "perturbation strength p must lie in [0, 1]");
  return linear_combination(1.0 - p, h0, p, hdd);
}

Operator build_local_fields(std::span<const double> fields, const HilbertSpace& space) {
  require(fields.size() == static_cast<std::size_t>(space.spins()), "one local field per spin is required");
  const auto dim = static_cast<Eigen::Index>(space.dim());
  Matrix m = Matrix::Zero(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    double e = 0.0;
    for (std::size_t i = 0; i < fields.size(); ++i) e += fields[i] * (((b >> i) & 1) ? 0.5 : -0.5);
    m(b, b) = e;
  }
  return Operator(space, std::move(m), true);
}

Operator linear_combination(double a, const Operator& lhs, double b, const Operator& rhs) {
  require_same_space(lhs.space(), rhs.space());
  Matrix m = a * lhs.matrix() + b * rhs.matrix();
  return Operator(lhs.space(), std::move(m), lhs.hermitian() && rhs.hermitian());
}

Operator rotation_z(const HilbertSpace& space, double phi) {
  const auto dim = static_cast<Eigen::Index>(space.dim());
  Matrix m = Matrix::Zero(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) m(b, b) = std::polar(1.0, -phi * space.mz(static_cast<std::size_t>(b)));
  return Operator(space, std::move(m), false);
}

DensityOperator thermal_state(const HilbertSpace& space) {
  const double norm = static_cast<double>(space.spins()) * static_cast<double>(space.dim()) / 4.0;
  const auto dim = static_cast<Eigen::Index>(space.dim());
  Matrix m = Matrix::Zero(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) m(b, b) = space.mz(static_cast<std::size_t>(b)) / norm;
  return DensityOperator(space, std::move(m), true);
}

std::uint64_t degeneracy(int spins, double mz) {
  require(spins >= 0, "spin count must be nonnegative");
  const double up = spins / 2.0 + mz;
  if (std::abs(mz) > spins / 2.0 || up != std::floor(up)) {
    fail(ErrorKind::invalid_argument,
         "M_z = " + format_double(mz) + " is incompatible with " + std::to_string(spins) + " spins");
  }
  require(spins <= 62, "degeneracy overflows 64 bits beyond 62 spins");
  const auto k = static_cast<std::uint64_t>(up);
  const auto n = static_cast<std::uint64_t>(spins);
  std::uint64_t result = 1;
  // C(n, k) built incrementally; each partial product is itself a binomial.
  for (std::uint64_t i = 1; i <= std::min(k, n - k); ++i) result = result * (n - std::min(k, n - k) + i) / i;
  return result;
}

void write_matrix(std::ostream& out, const Matrix& m) {
  out << "# matrix dim=" << m.rows() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_double(m(r, c).real()) << ',' << format_double(m(r, c).imag());
    }
    out << '\n';
  }
}

Matrix read_matrix(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "empty matrix stream");
  const std::string prefix = "# matrix dim=";
  require(line.rfind(prefix, 0) == 0, "missing matrix header");
  const auto dim = static_cast<Eigen::Index>(std::stoll(line.substr(prefix.size())));
  Matrix m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    require(static_cast<bool>(std::getline(in, line)), "truncated matrix stream");
    const auto fields = split(line, ',');
    require(static_cast<Eigen::Index>(fields.size()) == 2 * dim, "matrix row has the wrong number of fields");
    for (Eigen::Index c = 0; c < dim; ++c) {
      m(r, c) = Complex(parse_double(fields[2 * c]), parse_double(fields[2 * c + 1]));
    }
  }
  return m;
}

}  // namespace mqcsim
