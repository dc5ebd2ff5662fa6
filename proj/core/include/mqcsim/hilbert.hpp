#pragma once

#include <bit>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mqcsim/geometry.hpp"

namespace mqcsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Default cap on the spin count. A dense 2^14 x 2^14 complex matrix is 4 GiB.
inline constexpr int kDefaultMaxSpins = 14;

/// Bytes held by one dense complex 2^n x 2^n matrix.
std::size_t dense_matrix_bytes(int spins);

/// Zeeman product basis of n spin-1/2 particles.
///
/// Basis index b is a bitstring: bit i set means spin i is up, with bit 0
/// (site 0) least significant. M_z(b) = popcount(b) - n/2.
class HilbertSpace {
 public:
  explicit HilbertSpace(int spins, int max_spins = kDefaultMaxSpins);

  [[nodiscard]] int spins() const { return spins_; }
  [[nodiscard]] std::size_t dim() const { return std::size_t{1} << spins_; }
  [[nodiscard]] int twice_mz(std::size_t b) const { return 2 * std::popcount(b) - spins_; }
  [[nodiscard]] double mz(std::size_t b) const { return 0.5 * twice_mz(b); }
  /// Coherence order of element (row, col): M_z(row) - M_z(col).
  [[nodiscard]] int coherence_order(std::size_t row, std::size_t col) const {
    return std::popcount(row) - std::popcount(col);
  }

  friend bool operator==(const HilbertSpace&, const HilbertSpace&) = default;

 private:
  int spins_;
};

/// Dense operator on the Zeeman basis plus the set of coherence orders its
/// nonzero elements connect. The profile is computed from the matrix on
/// construction, so it always matches the stored elements.
class Operator {
 public:
  /// Throws if `hermitian` is claimed but the matrix is not Hermitian to
  /// 1e-12 of its largest element.
  Operator(HilbertSpace space, Matrix matrix, bool hermitian);

  [[nodiscard]] const HilbertSpace& space() const { return space_; }
  [[nodiscard]] const Matrix& matrix() const { return matrix_; }
  [[nodiscard]] bool hermitian() const { return hermitian_; }
  /// Sorted coherence orders with at least one nonzero element.
  [[nodiscard]] const std::vector<int>& coherence_profile() const { return profile_; }
  /// True when every element has zero imaginary part.
  [[nodiscard]] bool is_real() const;

 private:
  HilbertSpace space_;
  Matrix matrix_;
  bool hermitian_;
  std::vector<int> profile_;
};

/// Hermitian density operator. With the traceless flag it is a
/// high-temperature deviation from the identity.
class DensityOperator {
 public:
  DensityOperator(HilbertSpace space, Matrix matrix, bool traceless);

  [[nodiscard]] const HilbertSpace& space() const { return space_; }
  [[nodiscard]] const Matrix& matrix() const { return matrix_; }
  [[nodiscard]] bool traceless() const { return traceless_; }
  /// Tr{rho^2}.
  [[nodiscard]] double purity() const;

 private:
  HilbertSpace space_;
  Matrix matrix_;
  bool traceless_;
};

/// ||A - B||_F / max(||A||_F, ||B||_F), or 0 when both vanish.
double relative_difference(const Matrix& a, const Matrix& b);
/// ||A B - B A||_F.
double commutator_norm(const Matrix& a, const Matrix& b);

Operator build_iz(const HilbertSpace& space);

/// Secular dipolar Hamiltonian sum_{i<j} d_ij [2 Iz^i Iz^j - (Ix^i Ix^j + Iy^i Iy^j)].
Operator build_hdd(const CouplingTable& table, const HilbertSpace& space);

/// Double-quantum Hamiltonian -sum_{i<j} d_ij [Ix^i Ix^j - Iy^i Iy^j]. In the
/// Zeeman basis it only connects |..up..up..> with |..down..down..> for each
/// pair, with element -d_ij / 2.
Operator build_h0(const CouplingTable& table, const HilbertSpace& space);

/// (1 - p) H0 + p Hdd.
Operator build_heff(const CouplingTable& table, double p, const HilbertSpace& space);
Operator mix_hamiltonians(const Operator& h0, const Operator& hdd, double p);

/// sum_i h_i Iz^i, a static local-field term.
Operator build_local_fields(std::span<const double> fields, const HilbertSpace& space);

/// a A + b B for operators on the same space.
Operator linear_combination(double a, const Operator& lhs, double b, const Operator& rhs);

/// exp(-i phi Iz): diagonal with entries exp(-i phi M_z(b)).
Operator rotation_z(const HilbertSpace& space, double phi);

/// Iz / Tr{Iz^2}, so that Tr{rho0 Iz} = 1. Tr{Iz^2} = n 2^n / 4.
DensityOperator thermal_state(const HilbertSpace& space);

/// Number of Zeeman states of K spins with total magnetization mz:
/// K! / ((K/2 - mz)! (K/2 + mz)!). Requires K/2 +- mz to be integers.
std::uint64_t degeneracy(int spins, double mz);

/// Dense matrix text: "# matrix dim=D", then D rows of "re,im" pairs.
void write_matrix(std::ostream& out, const Matrix& m);
Matrix read_matrix(std::istream& in);

}  // namespace mqcsim
