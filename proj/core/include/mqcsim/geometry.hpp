#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace mqcsim {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

enum class GeometryKind { fcc, chain, random_cluster };

std::string_view to_string(GeometryKind kind);
GeometryKind parse_geometry_kind(std::string_view text);

/// Site positions (Angstrom) of one spin network.
struct SiteSet {
  std::vector<Vec3> positions;
  GeometryKind kind = GeometryKind::chain;

  [[nodiscard]] std::size_t size() const { return positions.size(); }
};

/// Crystal orientation as intrinsic Z-Y-Z Euler angles (radians). The
/// rotation R = Rz(alpha) Ry(beta) Rz(gamma) is applied to site coordinates;
/// the magnetic field stays along lab z.
struct EulerAngles {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  friend bool operator==(const EulerAngles&, const EulerAngles&) = default;
};

Mat3 rotation_matrix(const EulerAngles& angles);
Vec3 rotate(const Mat3& rotation, const Vec3& v);
Mat3 transpose(const Mat3& m);

struct Coupling {
  std::size_t i = 0;
  std::size_t j = 0;    // i < j
  double distance = 0.0;
  double cos_theta = 0.0;  // angle between the rotated pair vector and the field
  double d = 0.0;       // rad/s in physical units, 1/time in natural units
};

/// Secular dipolar couplings d_ij for every pair i < j (row-major pair order).
/// Pairs beyond the cutoff are kept with d = 0 so the table always has
/// n(n-1)/2 rows.
struct CouplingTable {
  std::size_t site_count = 0;
  std::vector<Coupling> entries;
  double prefactor = 1.0;
  EulerAngles orientation;
  double cutoff = std::numeric_limits<double>::infinity();

  [[nodiscard]] double at(std::size_t i, std::size_t j) const;
  /// Largest |d_ij| in the table (0 for a single site).
  [[nodiscard]] double max_abs() const;
};

/// Sites of a face-centred cubic lattice sorted by distance from a central
/// site at the origin (ties broken by coordinates). The first shell sits at
/// lattice_constant / sqrt(2).
SiteSet build_fcc(double lattice_constant, std::size_t budget, std::size_t max_sites);

/// n collinear sites, `spacing` apart, starting at the origin along `axis`.
SiteSet build_chain(double spacing, std::size_t n, const Vec3& axis, std::size_t max_sites);

/// n sites drawn uniformly inside a sphere of the given radius, rejecting
/// draws closer than min_distance to an existing site.
SiteSet build_random_cluster(std::size_t n, double radius, double min_distance, std::uint64_t seed,
                             std::size_t max_sites);

/// d_ij = prefactor (1 - 3 cos^2 theta_ij) / r_ij^3, theta measured between
/// the rotated pair vector and lab z.
CouplingTable couplings(const SiteSet& sites, const EulerAngles& orientation, double prefactor,
                        double cutoff = std::numeric_limits<double>::infinity());

/// Prefactor that gives a perpendicular nearest-neighbour pair the coupling
/// `target` (target * r_min^3).
double prefactor_for_nearest_neighbor(const SiteSet& sites, double target);

/// Uniform orientations over the sphere: alpha, gamma uniform in [0, 2pi),
/// cos(beta) uniform in [-1, 1]. Orientation k is drawn from its own stream
/// derived from (seed, "orientation", k).
std::vector<EulerAngles> powder_orientations(std::size_t count, std::uint64_t seed);

/// Text tables: a '#' metadata line, a header row, then one row per site or
/// pair with full-precision decimals.
void write_sites(std::ostream& out, const SiteSet& sites);
void write_couplings(std::ostream& out, const CouplingTable& table);
SiteSet read_sites(std::istream& in);
CouplingTable read_couplings(std::istream& in);

}  // namespace mqcsim
