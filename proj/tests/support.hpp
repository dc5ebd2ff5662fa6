#pragma once

#include <cmath>
#include <vector>

#include "mqcsim/geometry.hpp"
#include "mqcsim/hilbert.hpp"
#include "mqcsim/random.hpp"

namespace mqcsim::test {

inline Matrix random_hermitian(int spins, RandomStream& rng) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << spins);
  Matrix m(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c)
    for (Eigen::Index r = 0; r < dim; ++r) m(r, c) = Complex(rng.normal(), rng.normal());
  return 0.5 * (m + m.adjoint());
}

/// FCC fragment of n sites at an arbitrary tilted orientation, so that no
/// coupling vanishes by symmetry.
inline CouplingTable fcc_table(std::size_t n, EulerAngles angles = {0.4, 1.1, 2.0}) {
  const SiteSet sites = build_fcc(1.0, n, 19);
  return couplings(sites, angles, prefactor_for_nearest_neighbor(sites, 1.0));
}

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace mqcsim::test
