#include "mqcsim/evolve.hpp"

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Eigenvalues>

#include "mqcsim/error.hpp"
#include "mqcsim/text_format.hpp"

namespace mqcsim {
namespace {

constexpr double kUnitarityTolerance = 1e-10;
constexpr double kSchurNormalityTolerance = 1e-9;
constexpr double kPairSkipTolerance = 1e-15;

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

SpectralBlock diagonalize(const Matrix& block) {
  SpectralBlock out;
  if (block.rows() == 0) {
    out.frequencies.resize(0);
    return out;
  }
  if (block.imag().cwiseAbs().maxCoeff() == 0.0) {
    const Eigen::MatrixXd a = block.real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
    if (solver.info() != Eigen::Success) fail(ErrorKind::invariant, "real symmetric eigensolver did not converge");
    out.frequencies = solver.eigenvalues();
    out.real_vectors = solver.eigenvectors();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(block);
    if (solver.info() != Eigen::Success) fail(ErrorKind::invariant, "Hermitian eigensolver did not converge");
    out.frequencies = solver.eigenvalues();
    out.complex_vectors = solver.eigenvectors();
  }
  return out;
}

double eigen_residual(const Matrix& u, const Matrix& v, const Eigen::VectorXcd& mu) {
  Matrix r = u * v;
  r -= v * mu.asDiagonal();
  return max_abs(r);
}

// Eigenpairs of a unitary block through the Cayley transform
// H = i (1 - W)(1 + W)^-1 with W = exp(i a) U. H is Hermitian with the same
// eigenvectors and eigenvalues tan(theta / 2), a monotone map, so a
// Hermitian solver separates them. The shift a keeps -1 out of the spectrum
// of W; a few shifts are tried before falling back to a complex Schur form.
SpectralBlock eigen_of_unitary(const Matrix& block, double period) {
  const auto n = block.rows();
  SpectralBlock out;
  out.frequencies.resize(n);
  if (n == 0) {
    out.complex_vectors.resize(0, 0);
    return out;
  }
  const Matrix identity = Matrix::Identity(n, n);
  Matrix vectors;
  Eigen::VectorXcd mu(n);
  bool solved = false;
  for (const double shift : {0.0, 0.7548776662466927, 2.2459278666587353, -1.3090169943749475}) {
    const Matrix w = std::polar(1.0, shift) * block;
    const Eigen::PartialPivLU<Matrix> lu(identity + w);
    Matrix h = Complex(0.0, 1.0) * lu.solve(identity - w);  // (1 + W) and (1 - W) commute
    h = 0.5 * (h + h.adjoint()).eval();
    if (!h.allFinite()) continue;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success) continue;
    vectors = solver.eigenvectors();
    for (Eigen::Index k = 0; k < n; ++k) mu[k] = vectors.col(k).dot(block * vectors.col(k));
    for (Eigen::Index k = 0; k < n; ++k) mu[k] /= std::abs(mu[k]);
    if (eigen_residual(block, vectors, mu) <= kSchurNormalityTolerance) {
      solved = true;
      break;
    }
  }
  if (!solved) {
    Eigen::ComplexSchur<Matrix> schur(block);
    if (schur.info() != Eigen::Success) fail(ErrorKind::invariant, "complex Schur decomposition did not converge");
    const Matrix& t = schur.matrixT();
    double off = 0.0;
    for (Eigen::Index c = 0; c < n; ++c)
      for (Eigen::Index r = 0; r < c; ++r) off = std::max(off, std::abs(t(r, c)));
    // For a unitary (normal) matrix the Schur form is diagonal.
    if (off > kSchurNormalityTolerance) {
      fail(ErrorKind::invariant, "cycle unitary is not normal (Schur off-diagonal " + format_double(off) + ")");
    }
    vectors = schur.matrixU();
    mu = t.diagonal();
  }
  for (Eigen::Index k = 0; k < n; ++k) out.frequencies[k] = -std::arg(mu[k]) / period;
  out.complex_vectors = std::move(vectors);
  return out;
}

Matrix phases(const Eigen::VectorXd& w, double t) {
  Matrix d(w.size(), 1);
  for (Eigen::Index k = 0; k < w.size(); ++k) d(k, 0) = std::polar(1.0, -w[k] * t);
  return d;
}

}  // namespace

Eigen::MatrixXcd SpectralBlock::vectors() const {
  if (real()) return real_vectors.cast<Complex>();
  return complex_vectors;
}

SpectralDecomposition SpectralDecomposition::of_hamiltonian(const Operator& h, SymmetryPolicy policy) {
  const Operator* ops[] = {&h};
  return of_hamiltonian(h, SectorBasis::build(h.space(), ops, policy));
}

SpectralDecomposition SpectralDecomposition::of_hamiltonian(const Operator& h, const SectorBasis& basis) {
  require(h.hermitian(), "a Hamiltonian must be Hermitian");
  require(h.space() == basis.space(), "sector basis lives on a different Hilbert space");
  std::vector<SpectralBlock> blocks;
  blocks.reserve(basis.sectors().size());
  for (const auto& s : basis.sectors()) {
    Matrix b = project(h.matrix(), s, s);
    b = 0.5 * (b + b.adjoint()).eval();
    blocks.push_back(diagonalize(b));
  }
  return SpectralDecomposition(basis, std::move(blocks), 0.0);
}

SpectralDecomposition SpectralDecomposition::of_unitary(const Matrix& u, double period, const SectorBasis& basis) {
  require(period > 0.0, "Floquet period must be positive");
  std::vector<SpectralBlock> blocks;
  blocks.reserve(basis.sectors().size());
  for (const auto& s : basis.sectors()) blocks.push_back(eigen_of_unitary(project(u, s, s), period));
  return SpectralDecomposition(basis, std::move(blocks), period);
}

Matrix SpectralDecomposition::block_unitary(std::size_t s, double t) const {
  const SpectralBlock& b = blocks_.at(s);
  const Matrix v = b.vectors();
  const Matrix d = phases(b.frequencies, t);
  return v * d.col(0).asDiagonal() * v.adjoint();
}

Matrix SpectralDecomposition::unitary(double t) const {
  const auto dim = static_cast<Eigen::Index>(space().dim());
  Matrix u = Matrix::Zero(dim, dim);
  for (std::size_t s = 0; s < blocks_.size(); ++s) {
    const Sector& sector = basis_.sectors()[s];
    scatter_add(u, block_unitary(s, t), sector, sector);
  }
  return u;
}

double unitarity_error(const Matrix& u) {
  Matrix g = u.adjoint() * u;
  g -= Matrix::Identity(u.rows(), u.cols());
  return max_abs(g);
}

Propagator::Propagator(HilbertSpace space, Matrix unitary) : space_(space), unitary_(std::move(unitary)) {
  const auto dim = static_cast<Eigen::Index>(space_.dim());
  require(unitary_.rows() == dim && unitary_.cols() == dim, "propagator does not match the Hilbert space dimension");
  const double err = unitarity_error(unitary_);
  if (!(err < kUnitarityTolerance)) {
    fail(ErrorKind::invariant, "propagator is not unitary (deviation " + format_double(err) + ")");
  }
}

Propagator Propagator::inverse() const { return Propagator(space_, unitary_.adjoint()); }

Propagator Propagator::then_after(const Propagator& other) const {
  require(space_ == other.space_, "propagators live on different Hilbert spaces");
  return Propagator(space_, unitary_ * other.unitary_);
}

Propagator propagator(const Operator& h, double t) {
  return propagator(SpectralDecomposition::of_hamiltonian(h), t);
}

Propagator propagator(const SpectralDecomposition& decomposition, double t) {
  return Propagator(decomposition.space(), decomposition.unitary(t));
}

DensityOperator evolve(const DensityOperator& rho, const Propagator& u) {
  require(rho.space() == u.space(), "state and propagator live on different Hilbert spaces");
  Matrix tmp = u.matrix() * rho.matrix();
  Matrix out = tmp * u.matrix().adjoint();
  return DensityOperator(rho.space(), std::move(out), rho.traceless());
}

std::string_view to_string(CycleMode mode) { return mode == CycleMode::effective ? "effective" : "pulsed"; }

CycleMode parse_cycle_mode(std::string_view text) {
  if (text == "effective") return CycleMode::effective;
  if (text == "pulsed") return CycleMode::pulsed;
  fail(ErrorKind::invalid_argument, "unknown cycle mode '" + std::string(text) + "'");
}

void CycleSpec::validate() const {
  require(std::isfinite(tau0) && std::isfinite(tau_sigma), "cycle durations must be finite");
  require(tau0 >= 0.0 && tau_sigma >= 0.0, "cycle durations must be nonnegative");
  require(tau_c() > 0.0, "cycle period must be positive");
}

CycleSpec CycleSpec::from_period(double tau_c, double p, CycleMode mode) {
  require(p >= 0.0 && p <= 1.0, "perturbation strength p must lie in [0, 1]");
  CycleSpec c{(1.0 - p) * tau_c, p * tau_c, mode};
  c.validate();
  return c;
}

Propagator cycle_unitary(const CycleSpec& cycle, const Operator& h0, const Operator& hdd) {
  cycle.validate();
  if (cycle.mode == CycleMode::effective) {
    return propagator(mix_hamiltonians(h0, hdd, cycle.p()), cycle.tau_c());
  }
  const Propagator u0 = propagator(h0, cycle.tau0);
  if (cycle.tau_sigma == 0.0) return u0;
  return propagator(hdd, cycle.tau_sigma).then_after(u0);
}

DensityOperator run_cycles(const DensityOperator& rho, const Propagator& cycle, int cycles) {
  require(cycles >= 0, "cycle count must be nonnegative");
  require(rho.space() == cycle.space(), "state and propagator live on different Hilbert spaces");
  Matrix m = rho.matrix();
  for (int k = 0; k < cycles; ++k) {
    Matrix tmp = cycle.matrix() * m;
    m.noalias() = tmp * cycle.matrix().adjoint();
  }
  return DensityOperator(rho.space(), std::move(m), rho.traceless());
}

SpectralDecomposition cycle_decomposition(const CycleSpec& cycle, const Operator& h0, const Operator& hdd,
                                          const Operator* extra, const SectorBasis& basis) {
  cycle.validate();
  const auto with_extra = [extra](const Operator& h) { return extra ? linear_combination(1.0, h, 1.0, *extra) : h; };
  if (cycle.mode == CycleMode::effective) {
    return SpectralDecomposition::of_hamiltonian(with_extra(mix_hamiltonians(h0, hdd, cycle.p())), basis);
  }
  const SpectralDecomposition d0 = SpectralDecomposition::of_hamiltonian(with_extra(h0), basis);
  if (cycle.tau_sigma == 0.0) {
    return SpectralDecomposition::of_unitary(d0.unitary(cycle.tau0), cycle.tau_c(), basis);
  }
  const SpectralDecomposition dd = SpectralDecomposition::of_hamiltonian(with_extra(hdd), basis);
  const auto dim = static_cast<Eigen::Index>(basis.space().dim());
  Matrix u = Matrix::Zero(dim, dim);
  for (std::size_t s = 0; s < basis.sectors().size(); ++s) {
    const Sector& sector = basis.sectors()[s];
    scatter_add(u, dd.block_unitary(s, cycle.tau_sigma) * d0.block_unitary(s, cycle.tau0), sector, sector);
  }
  return SpectralDecomposition::of_unitary(u, cycle.tau_c(), basis);
}

Trajectory::Trajectory(std::shared_ptr<const SpectralDecomposition> decomposition, const DensityOperator& initial)
    : decomposition_(std::move(decomposition)), traceless_(initial.traceless()) {
  require(decomposition_ != nullptr, "trajectory needs a decomposition");
  require(initial.space() == decomposition_->space(), "state and decomposition live on different Hilbert spaces");
  const auto& sectors = decomposition_->basis().sectors();
  const auto& blocks = decomposition_->blocks();
  const double scale = max_abs(initial.matrix());
  for (std::size_t i = 0; i < sectors.size(); ++i) {
    for (std::size_t j = i; j < sectors.size(); ++j) {
      const Matrix b = project(initial.matrix(), sectors[i], sectors[j]);
      if (b.size() == 0 || max_abs(b) <= kPairSkipTolerance * scale) continue;
      PairBlock pair{i, j, {}};
      if (blocks[i].real() && blocks[j].real()) {
        const Eigen::MatrixXd re = blocks[i].real_vectors.transpose() * b.real() * blocks[j].real_vectors;
        const Eigen::MatrixXd im = blocks[i].real_vectors.transpose() * b.imag() * blocks[j].real_vectors;
        pair.rotated = re.cast<Complex>() + Complex(0.0, 1.0) * im.cast<Complex>();
      } else {
        pair.rotated = blocks[i].vectors().adjoint() * b * blocks[j].vectors();
      }
      pairs_.push_back(std::move(pair));
    }
  }
}

Matrix Trajectory::matrix_at(double t) const {
  const auto dim = static_cast<Eigen::Index>(space().dim());
  const auto& sectors = decomposition_->basis().sectors();
  const auto& blocks = decomposition_->blocks();
  Matrix out = Matrix::Zero(dim, dim);
  for (const auto& pair : pairs_) {
    const SpectralBlock& bi = blocks[pair.row];
    const SpectralBlock& bj = blocks[pair.col];
    const Matrix ui = phases(bi.frequencies, t);
    const Matrix uj = phases(bj.frequencies, t);
    const Matrix z = ui.col(0).asDiagonal() * pair.rotated * uj.col(0).conjugate().asDiagonal();
    Matrix block;
    if (bi.real() && bj.real()) {
      const Eigen::MatrixXd left_re = bi.real_vectors * z.real();
      const Eigen::MatrixXd left_im = bi.real_vectors * z.imag();
      const Eigen::MatrixXd re = left_re * bj.real_vectors.transpose();
      const Eigen::MatrixXd im = left_im * bj.real_vectors.transpose();
      block = re.cast<Complex>() + Complex(0.0, 1.0) * im.cast<Complex>();
    } else {
      block = bi.vectors() * z * bj.vectors().adjoint();
    }
    scatter_add(out, block, sectors[pair.row], sectors[pair.col]);
    if (pair.row != pair.col) scatter_add(out, block.adjoint(), sectors[pair.col], sectors[pair.row]);
  }
  return out;
}

DensityOperator Trajectory::at(double t) const {
  return DensityOperator(space(), matrix_at(t), traceless_);
}

}  // namespace mqcsim
