#include "mqcsim/sectors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "mqcsim/error.hpp"

namespace mqcsim {
namespace {

constexpr double kSymmetryTolerance = 1e-14;

struct Embedding {
  std::span<const std::uint64_t> first;
  std::span<const std::uint64_t> second;
  double c1;
  double c2;
  bool paired;
};

Embedding embedding(const Sector& s) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  if (!s.paired()) return {s.first(), s.first(), 1.0, 0.0, false};
  return {s.first(), s.second(), inv_sqrt2, s.sign() * inv_sqrt2, true};
}

bool even_orders_only(const Operator& op) {
  return std::all_of(op.coherence_profile().begin(), op.coherence_profile().end(),
                     [](int m) { return m % 2 == 0; });
}

}  // namespace

Sector Sector::states(std::vector<std::uint64_t> states) {
  Sector s;
  s.second_ = states;
  s.first_ = std::move(states);
  return s;
}

Sector Sector::flip_pairs(std::vector<std::uint64_t> representatives, std::uint64_t all_spins_mask, double sign) {
  require(sign == 1.0 || sign == -1.0, "flip sector sign must be +1 or -1");
  Sector s;
  s.second_.reserve(representatives.size());
  for (auto r : representatives) s.second_.push_back(r ^ all_spins_mask);
  s.first_ = std::move(representatives);
  s.sign_ = sign;
  s.paired_ = true;
  return s;
}

Matrix project(const Matrix& m, const Sector& row, const Sector& col) {
  const Embedding r = embedding(row);
  const Embedding c = embedding(col);
  const auto rows = static_cast<Eigen::Index>(row.size());
  const auto cols = static_cast<Eigen::Index>(col.size());
  Matrix block(rows, cols);
  for (Eigen::Index l = 0; l < cols; ++l) {
    const auto f = static_cast<Eigen::Index>(c.first[l]);
    const auto s = static_cast<Eigen::Index>(c.second[l]);
    for (Eigen::Index k = 0; k < rows; ++k) {
      const auto rf = static_cast<Eigen::Index>(r.first[k]);
      const auto rs = static_cast<Eigen::Index>(r.second[k]);
      Complex v = r.c1 * c.c1 * m(rf, f);
      if (c.paired) v += r.c1 * c.c2 * m(rf, s);
      if (r.paired) v += r.c2 * c.c1 * m(rs, f);
      if (r.paired && c.paired) v += r.c2 * c.c2 * m(rs, s);
      block(k, l) = v;
    }
  }
  return block;
}

void scatter_add(Matrix& out, const Matrix& block, const Sector& row, const Sector& col) {
  const Embedding r = embedding(row);
  const Embedding c = embedding(col);
  for (Eigen::Index l = 0; l < block.cols(); ++l) {
    const auto f = static_cast<Eigen::Index>(c.first[l]);
    const auto s = static_cast<Eigen::Index>(c.second[l]);
    for (Eigen::Index k = 0; k < block.rows(); ++k) {
      const Complex v = block(k, l);
      if (v == Complex{}) continue;
      const auto rf = static_cast<Eigen::Index>(r.first[k]);
      const auto rs = static_cast<Eigen::Index>(r.second[k]);
      out(rf, f) += r.c1 * c.c1 * v;
      if (c.paired) out(rf, s) += r.c1 * c.c2 * v;
      if (r.paired) out(rs, f) += r.c2 * c.c1 * v;
      if (r.paired && c.paired) out(rs, s) += r.c2 * c.c2 * v;
    }
  }
}

bool commutes_with_global_flip(const Operator& op) {
  const Matrix& m = op.matrix();
  const auto dim = m.rows();
  const double scale = m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return true;
  const auto mask = static_cast<Eigen::Index>(op.space().dim() - 1);
  for (Eigen::Index c = 0; c < dim; ++c)
    for (Eigen::Index r = 0; r < dim; ++r)
      if (std::abs(m(r, c) - m(r ^ mask, c ^ mask)) > kSymmetryTolerance * scale) return false;
  return true;
}

SectorBasis SectorBasis::whole_space(const HilbertSpace& space) {
  std::vector<std::uint64_t> all(space.dim());
  for (std::size_t b = 0; b < all.size(); ++b) all[b] = b;
  return SectorBasis(space, {Sector::states(std::move(all))}, false, false);
}

SectorBasis SectorBasis::build(const HilbertSpace& space, std::span<const Operator* const> operators,
                               SymmetryPolicy policy) {
  for (const Operator* op : operators) {
    require(op != nullptr, "null operator passed to the sector builder");
    require(op->space() == space, "operator lives on a different Hilbert space");
  }
  if (policy == SymmetryPolicy::none) return whole_space(space);

  const bool parity = std::all_of(operators.begin(), operators.end(), [](const Operator* op) { return even_orders_only(*op); });
  if (!parity) return whole_space(space);

  const bool flip = policy == SymmetryPolicy::automatic && space.spins() % 2 == 0 &&
                    std::all_of(operators.begin(), operators.end(),
                                [](const Operator* op) { return commutes_with_global_flip(*op); });

  std::vector<Sector> sectors;
  const std::uint64_t mask = space.dim() - 1;
  for (int parity_bit = 0; parity_bit < 2; ++parity_bit) {
    std::vector<std::uint64_t> states;
    for (std::uint64_t b = 0; b < space.dim(); ++b) {
      if (std::popcount(b) % 2 != parity_bit) continue;
      if (flip && b > (b ^ mask)) continue;
      states.push_back(b);
    }
    if (states.empty()) continue;
    if (flip) {
      sectors.push_back(Sector::flip_pairs(states, mask, 1.0));
      sectors.push_back(Sector::flip_pairs(std::move(states), mask, -1.0));
    } else {
      sectors.push_back(Sector::states(std::move(states)));
    }
  }
  return SectorBasis(space, std::move(sectors), true, flip);
}

}  // namespace mqcsim
