#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mqcsim/hilbert.hpp"
#include "mqcsim/sectors.hpp"

namespace mqcsim {

/// Eigenpairs of one sector block. Eigenvectors are real when the block is
/// real symmetric, complex otherwise; exactly one of the two is filled.
struct SpectralBlock {
  Eigen::VectorXd frequencies;
  Eigen::MatrixXd real_vectors;
  Eigen::MatrixXcd complex_vectors;

  [[nodiscard]] bool real() const { return complex_vectors.size() == 0; }
  [[nodiscard]] Eigen::Index size() const { return frequencies.size(); }
  [[nodiscard]] Eigen::MatrixXcd vectors() const;
};

/// Generator of a unitary family U(t) = sum_k |v_k> exp(-i w_k t) <v_k|,
/// split into sectors.
///
/// For a Hamiltonian the w_k are its eigenvalues. For a one-period unitary
/// (Floquet mode) they are quasi-energies -arg(mu_k) / period, so U(m period)
/// is exact for integer m only.
class SpectralDecomposition {
 public:
  static SpectralDecomposition of_hamiltonian(const Operator& h, SymmetryPolicy policy = SymmetryPolicy::automatic);
  static SpectralDecomposition of_hamiltonian(const Operator& h, const SectorBasis& basis);
  /// Eigendecomposition of the unitary, block by block.
  static SpectralDecomposition of_unitary(const Matrix& u, double period, const SectorBasis& basis);

  [[nodiscard]] const HilbertSpace& space() const { return basis_.space(); }
  [[nodiscard]] const SectorBasis& basis() const { return basis_; }
  [[nodiscard]] const std::vector<SpectralBlock>& blocks() const { return blocks_; }
  [[nodiscard]] bool floquet() const { return period_ > 0.0; }
  [[nodiscard]] double period() const { return period_; }

  /// U restricted to sector s at time t.
  [[nodiscard]] Matrix block_unitary(std::size_t s, double t) const;
  /// Dense exp(-i H t) on the full space.
  [[nodiscard]] Matrix unitary(double t) const;

 private:
  SpectralDecomposition(SectorBasis basis, std::vector<SpectralBlock> blocks, double period)
      : basis_(std::move(basis)), blocks_(std::move(blocks)), period_(period) {}

  SectorBasis basis_;
  std::vector<SpectralBlock> blocks_;
  double period_ = 0.0;
};

/// Dense unitary, checked on construction: ||U^dagger U - 1||_max < 1e-10.
class Propagator {
 public:
  Propagator(HilbertSpace space, Matrix unitary);

  [[nodiscard]] const HilbertSpace& space() const { return space_; }
  [[nodiscard]] const Matrix& matrix() const { return unitary_; }
  [[nodiscard]] Propagator inverse() const;
  /// this * other: apply `other` first.
  [[nodiscard]] Propagator then_after(const Propagator& other) const;

 private:
  HilbertSpace space_;
  Matrix unitary_;
};

/// ||U^dagger U - 1||_max.
double unitarity_error(const Matrix& u);

/// exp(-i H t). Decomposes H every call; reuse a SpectralDecomposition for
/// repeated times.
Propagator propagator(const Operator& h, double t);
Propagator propagator(const SpectralDecomposition& decomposition, double t);

/// U rho U^dagger.
DensityOperator evolve(const DensityOperator& rho, const Propagator& u);

enum class CycleMode { effective, pulsed };

std::string_view to_string(CycleMode mode);
CycleMode parse_cycle_mode(std::string_view text);

/// One period of the interleaved sequence: tau0 under H0, then tau_sigma
/// under Hdd. In effective mode the period is replaced by
/// exp(-i Heff(p) tau_c) with p = tau_sigma / tau_c.
struct CycleSpec {
  double tau0 = 0.0;
  double tau_sigma = 0.0;
  CycleMode mode = CycleMode::effective;

  [[nodiscard]] double tau_c() const { return tau0 + tau_sigma; }
  [[nodiscard]] double p() const { return tau_sigma / tau_c(); }
  void validate() const;

  static CycleSpec from_period(double tau_c, double p, CycleMode mode);
};

/// Unitary of one cycle. Pulsed mode is exp(-i Hdd tau_sigma) exp(-i H0 tau0)
/// and short-circuits to exp(-i H0 tau0) when tau_sigma is zero.
Propagator cycle_unitary(const CycleSpec& cycle, const Operator& h0, const Operator& hdd);

/// U_c^N rho (U_c^dagger)^N.
DensityOperator run_cycles(const DensityOperator& rho, const Propagator& cycle, int cycles);

/// Spectral decomposition of one cycle on a shared sector basis. Effective
/// mode decomposes Heff + extra; pulsed mode composes the sector blocks of
/// exp(-i (Hdd + extra) tau_sigma) exp(-i (H0 + extra) tau0) and diagonalizes
/// the product. `extra` may be null.
SpectralDecomposition cycle_decomposition(const CycleSpec& cycle, const Operator& h0, const Operator& hdd,
                                          const Operator* extra, const SectorBasis& basis);

/// rho(t) = U(t) rho0 U(t)^dagger from a cached decomposition.
///
/// The initial state is rotated into the eigenbasis once per sector pair;
/// each query is then two matrix products per nonzero pair. Sector pairs in
/// which rho0 vanishes are skipped.
class Trajectory {
 public:
  Trajectory(std::shared_ptr<const SpectralDecomposition> decomposition, const DensityOperator& initial);

  [[nodiscard]] const HilbertSpace& space() const { return decomposition_->space(); }
  [[nodiscard]] bool traceless() const { return traceless_; }
  /// Unvalidated state matrix at time t.
  [[nodiscard]] Matrix matrix_at(double t) const;
  [[nodiscard]] DensityOperator at(double t) const;
  [[nodiscard]] std::size_t active_pairs() const { return pairs_.size(); }

 private:
  struct PairBlock {
    std::size_t row = 0;
    std::size_t col = 0;
    Eigen::MatrixXcd rotated;  // V_row^dagger B V_col
  };

  std::shared_ptr<const SpectralDecomposition> decomposition_;
  std::vector<PairBlock> pairs_;
  bool traceless_ = false;
};

}  // namespace mqcsim
