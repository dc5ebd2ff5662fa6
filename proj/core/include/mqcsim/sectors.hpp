#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mqcsim/hilbert.hpp"

namespace mqcsim {

/// One invariant block of the Zeeman basis.
///
/// Unpaired sectors are plain lists of basis states. Paired sectors hold the
/// spin-flip combinations (|b> + sign |~b>) / sqrt(2), with ~b the bitwise
/// complement of b; they exist only for an even spin count, where b and ~b
/// share the same number-parity.
class Sector {
 public:
  static Sector states(std::vector<std::uint64_t> states);
  static Sector flip_pairs(std::vector<std::uint64_t> representatives, std::uint64_t all_spins_mask, double sign);

  [[nodiscard]] std::size_t size() const { return first_.size(); }
  [[nodiscard]] bool paired() const { return paired_; }
  [[nodiscard]] double sign() const { return sign_; }
  [[nodiscard]] std::span<const std::uint64_t> first() const { return first_; }
  [[nodiscard]] std::span<const std::uint64_t> second() const { return second_; }

  friend bool operator==(const Sector&, const Sector&) = default;

 private:
  std::vector<std::uint64_t> first_;
  std::vector<std::uint64_t> second_;
  double sign_ = 1.0;
  bool paired_ = false;
};

/// E_row^dagger M E_col for the embeddings of two sectors.
Matrix project(const Matrix& m, const Sector& row, const Sector& col);
/// out += E_row B E_col^dagger.
void scatter_add(Matrix& out, const Matrix& block, const Sector& row, const Sector& col);

enum class SymmetryPolicy {
  automatic,    // use every symmetry the operators share
  parity_only,  // split by number-parity only
  none,         // one sector holding the whole space
};

/// Orthonormal decomposition of the Zeeman space into sectors that every
/// operator in a given set leaves invariant.
///
/// Number-parity is used when all operators only connect even coherence
/// orders. The global spin flip is added when, in addition, the spin count is
/// even and every operator commutes with it (H0, Hdd and their mixtures do;
/// local z fields do not).
class SectorBasis {
 public:
  static SectorBasis build(const HilbertSpace& space, std::span<const Operator* const> operators,
                           SymmetryPolicy policy = SymmetryPolicy::automatic);
  static SectorBasis whole_space(const HilbertSpace& space);

  [[nodiscard]] const HilbertSpace& space() const { return space_; }
  [[nodiscard]] const std::vector<Sector>& sectors() const { return sectors_; }
  [[nodiscard]] bool uses_parity() const { return parity_; }
  [[nodiscard]] bool uses_flip() const { return flip_; }

  friend bool operator==(const SectorBasis&, const SectorBasis&) = default;

 private:
  SectorBasis(HilbertSpace space, std::vector<Sector> sectors, bool parity, bool flip)
      : space_(space), sectors_(std::move(sectors)), parity_(parity), flip_(flip) {}

  HilbertSpace space_;
  std::vector<Sector> sectors_;
  bool parity_ = false;
  bool flip_ = false;
};

/// True when the operator commutes with the global spin flip to 1e-14 of its
/// largest element.
bool commutes_with_global_flip(const Operator& op);

}  // namespace mqcsim
