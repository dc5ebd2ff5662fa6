#include "mqcsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <tuple>

#include "mqcsim/error.hpp"
#include "mqcsim/random.hpp"
#include "mqcsim/text_format.hpp"

namespace mqcsim {
namespace {

void check_budget(std::size_t count, std::size_t max_sites) {
  if (count > max_sites) {
    fail(ErrorKind::resource_cap, "site budget " + std::to_string(count) + " exceeds the cap of " +
                                      std::to_string(max_sites) + " spins");
  }
}

double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

Mat3 rz(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {{{c, -s, 0.0}, {s, c, 0.0}, {0.0, 0.0, 1.0}}};
}

Mat3 ry(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {{{c, 0.0, s}, {0.0, 1.0, 0.0}, {-s, 0.0, c}}};
}

Mat3 multiply(const Mat3& a, const Mat3& b) {
  Mat3 out{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      for (int k = 0; k < 3; ++k) out[r][c] += a[r][k] * b[k][c];
  return out;
}

// Parses "key=value" tokens from a '#' metadata line.
std::map<std::string, std::string> parse_metadata(const std::string& line) {
  std::map<std::string, std::string> meta;
  std::istringstream tokens(line.substr(1));
  std::string token;
  while (tokens >> token) {
    const auto eq = token.find('=');
    if (eq != std::string::npos) meta[token.substr(0, eq)] = token.substr(eq + 1);
  }
  return meta;
}

std::string read_line(std::istream& in, std::string_view what) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::invalid_argument, "truncated " + std::string(what) + " table");
  return line;
}

}  // namespace

std::string_view to_string(GeometryKind kind) {
  switch (kind) {
    case GeometryKind::fcc: return "fcc";
    case GeometryKind::chain: return "chain";
    case GeometryKind::random_cluster: return "random-cluster";
  }
  return "unknown";
}

GeometryKind parse_geometry_kind(std::string_view text) {
  if (text == "fcc") return GeometryKind::fcc;
  if (text == "chain") return GeometryKind::chain;
  if (text == "random-cluster") return GeometryKind::random_cluster;
  fail(ErrorKind::invalid_argument, "unknown geometry kind '" + std::string(text) + "'");
}

Mat3 rotation_matrix(const EulerAngles& angles) {
  return multiply(multiply(rz(angles.alpha), ry(angles.beta)), rz(angles.gamma));
}

Vec3 rotate(const Mat3& rotation, const Vec3& v) {
  Vec3 out{};
  for (int r = 0; r < 3; ++r) out[r] = rotation[r][0] * v[0] + rotation[r][1] * v[1] + rotation[r][2] * v[2];
  return out;
}

Mat3 transpose(const Mat3& m) {
  Mat3 out{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out[r][c] = m[c][r];
  return out;
}

double CouplingTable::at(std::size_t i, std::size_t j) const {
  require(i != j && i < site_count && j < site_count, "coupling index out of range");
  if (i > j) std::swap(i, j);
  // Row-major upper triangle: rows before i hold sum_{k<i} (n-1-k) pairs.
  const std::size_t n = site_count;
  const std::size_t offset = i * (2 * n - i - 1) / 2 + (j - i - 1);
  return entries[offset].d;
}

double CouplingTable::max_abs() const {
  double m = 0.0;
  for (const auto& e : entries) m = std::max(m, std::abs(e.d));
  return m;
}

SiteSet build_fcc(double lattice_constant, std::size_t budget, std::size_t max_sites) {
  require(lattice_constant > 0.0, "lattice constant must be positive");
  require(budget >= 1, "site budget must be at least 1");
  check_budget(budget, max_sites);

  // Half-lattice integer coordinates: FCC points are (a/2)(x, y, z) with x+y+z even.
  // A cube of half-width L holds about L^3/2 points; pad generously so the
  // closest `budget` points are all inside.
  const auto half_width = static_cast<int>(std::ceil(std::cbrt(static_cast<double>(budget)) * 2.0)) + 2;
  std::vector<std::array<int, 3>> points;
  for (int x = -half_width; x <= half_width; ++x)
    for (int y = -half_width; y <= half_width; ++y)
      for (int z = -half_width; z <= half_width; ++z)
        if (((x + y + z) & 1) == 0) points.push_back({x, y, z});

  auto key = [](const std::array<int, 3>& p) {
    return std::make_tuple(p[0] * p[0] + p[1] * p[1] + p[2] * p[2], p[0], p[1], p[2]);
  };
  std::partial_sort(points.begin(), points.begin() + static_cast<std::ptrdiff_t>(budget), points.end(),
                    [&](const auto& a, const auto& b) { return key(a) < key(b); });

  SiteSet sites;
  sites.kind = GeometryKind::fcc;
  sites.positions.reserve(budget);
  const double half = lattice_constant / 2.0;
  for (std::size_t k = 0; k < budget; ++k) {
    const auto& p = points[k];
    sites.positions.push_back({half * p[0], half * p[1], half * p[2]});
  }
  return sites;
}

SiteSet build_chain(double spacing, std::size_t n, const Vec3& axis, std::size_t max_sites) {
  require(spacing > 0.0, "chain spacing must be positive");
  require(n >= 1, "chain needs at least one site");
  check_budget(n, max_sites);
  const double length = norm(axis);
  require(length > 0.0, "chain axis must be nonzero");
  SiteSet sites;
  sites.kind = GeometryKind::chain;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = spacing * static_cast<double>(k) / length;
    sites.positions.push_back({s * axis[0], s * axis[1], s * axis[2]});
  }
  return sites;
}

SiteSet build_random_cluster(std::size_t n, double radius, double min_distance, std::uint64_t seed,
                             std::size_t max_sites) {
  require(n >= 1, "cluster needs at least one site");
  require(radius > 0.0 && min_distance > 0.0, "cluster radius and minimum distance must be positive");
  check_budget(n, max_sites);
  SiteSet sites;
  sites.kind = GeometryKind::random_cluster;
  RandomStream rng(seed, "random-cluster", 0);
  constexpr int kMaxAttempts = 100000;
  for (int attempt = 0; sites.size() < n; ++attempt) {
    if (attempt >= kMaxAttempts) {
      fail(ErrorKind::invalid_argument, "could not place random cluster sites; radius too small for min_distance");
    }
    const Vec3 p{rng.uniform(-radius, radius), rng.uniform(-radius, radius), rng.uniform(-radius, radius)};
    if (norm(p) > radius) continue;
    const bool clear = std::all_of(sites.positions.begin(), sites.positions.end(), [&](const Vec3& q) {
      return norm({p[0] - q[0], p[1] - q[1], p[2] - q[2]}) >= min_distance;
    });
    if (clear) sites.positions.push_back(p);
  }
  return sites;
}

CouplingTable couplings(const SiteSet& sites, const EulerAngles& orientation, double prefactor, double cutoff) {
  require(cutoff > 0.0, "cutoff must be positive");
  const Mat3 rotation = rotation_matrix(orientation);
  std::vector<Vec3> rotated;
  rotated.reserve(sites.size());
  for (const auto& p : sites.positions) rotated.push_back(rotate(rotation, p));

  CouplingTable table;
  table.site_count = sites.size();
  table.prefactor = prefactor;
  table.orientation = orientation;
  table.cutoff = cutoff;
  table.entries.reserve(sites.size() * (sites.size() - 1) / 2);
  for (std::size_t i = 0; i < rotated.size(); ++i) {
    for (std::size_t j = i + 1; j < rotated.size(); ++j) {
      const Vec3 v{rotated[j][0] - rotated[i][0], rotated[j][1] - rotated[i][1], rotated[j][2] - rotated[i][2]};
      const double r = norm(v);
      if (!(r > 0.0)) {
        fail(ErrorKind::invalid_argument,
             "sites " + std::to_string(i) + " and " + std::to_string(j) + " coincide (zero distance)");
      }
      Coupling c{i, j, r, v[2] / r, 0.0};
      if (r <= cutoff) c.d = prefactor * (1.0 - 3.0 * c.cos_theta * c.cos_theta) / (r * r * r);
      table.entries.push_back(c);
    }
  }
  return table;
}

double prefactor_for_nearest_neighbor(const SiteSet& sites, double target) {
  require(sites.size() >= 2, "nearest-neighbour coupling needs at least two sites");
  double r_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sites.size(); ++i)
    for (std::size_t j = i + 1; j < sites.size(); ++j) {
      const auto& a = sites.positions[i];
      const auto& b = sites.positions[j];
      r_min = std::min(r_min, norm({b[0] - a[0], b[1] - a[1], b[2] - a[2]}));
    }
  require(r_min > 0.0, "coincident sites");
  return target * r_min * r_min * r_min;
}

std::vector<EulerAngles> powder_orientations(std::size_t count, std::uint64_t seed) {
  require(count >= 1, "orientation count must be at least 1");
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  std::vector<EulerAngles> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    RandomStream rng(seed, "orientation", k);
    EulerAngles e;
    e.alpha = kTwoPi * rng.uniform();
    e.beta = std::acos(rng.uniform(-1.0, 1.0));
    e.gamma = kTwoPi * rng.uniform();
    out.push_back(e);
  }
  return out;
}

void write_sites(std::ostream& out, const SiteSet& sites) {
  out << "# sites kind=" << to_string(sites.kind) << " count=" << sites.size() << '\n';
  out << "index,x,y,z\n";
  for (std::size_t k = 0; k < sites.size(); ++k) {
    const auto& p = sites.positions[k];
    out << k << ',' << format_double(p[0]) << ',' << format_double(p[1]) << ',' << format_double(p[2]) << '\n';
  }
}

void write_couplings(std::ostream& out, const CouplingTable& table) {
  out << "# couplings sites=" << table.site_count << " prefactor=" << format_double(table.prefactor)
      << " alpha=" << format_double(table.orientation.alpha) << " beta=" << format_double(table.orientation.beta)
      << " gamma=" << format_double(table.orientation.gamma) << " cutoff=" << format_double(table.cutoff) << '\n';
  out << "i,j,r,cos_theta,d\n";
  for (const auto& e : table.entries) {
    out << e.i << ',' << e.j << ',' << format_double(e.distance) << ',' << format_double(e.cos_theta) << ','
        << format_double(e.d) << '\n';
  }
}

SiteSet read_sites(std::istream& in) {
  const auto meta = parse_metadata(read_line(in, "sites"));
  require(meta.count("kind") && meta.count("count"), "sites table lacks kind/count metadata");
  SiteSet sites;
  sites.kind = parse_geometry_kind(meta.at("kind"));
  const auto count = static_cast<std::size_t>(std::stoull(meta.at("count")));
  require(trim(read_line(in, "sites")) == "index,x,y,z", "unexpected sites header");
  for (std::size_t k = 0; k < count; ++k) {
    const std::string line = read_line(in, "sites");
    const auto fields = split(line, ',');
    require(fields.size() == 4, "malformed sites row: " + line);
    sites.positions.push_back({parse_double(fields[1]), parse_double(fields[2]), parse_double(fields[3])});
  }
  return sites;
}

CouplingTable read_couplings(std::istream& in) {
  const auto meta = parse_metadata(read_line(in, "couplings"));
  for (const char* key : {"sites", "prefactor", "alpha", "beta", "gamma", "cutoff"}) {
    require(meta.count(key) == 1, std::string("couplings table lacks metadata '") + key + "'");
  }
  CouplingTable table;
  table.site_count = static_cast<std::size_t>(std::stoull(meta.at("sites")));
  table.prefactor = parse_double(meta.at("prefactor"));
  table.orientation = {parse_double(meta.at("alpha")), parse_double(meta.at("beta")), parse_double(meta.at("gamma"))};
  table.cutoff = parse_double(meta.at("cutoff"));
  require(trim(read_line(in, "couplings")) == "i,j,r,cos_theta,d", "unexpected couplings header");
  const std::size_t rows = table.site_count * (table.site_count - (table.site_count > 0 ? 1 : 0)) / 2;
  for (std::size_t k = 0; k < rows; ++k) {
    const std::string line = read_line(in, "couplings");
    const auto fields = split(line, ',');
    require(fields.size() == 5, "malformed couplings row: " + line);
    table.entries.push_back({static_cast<std::size_t>(std::stoull(std::string(fields[0]))),
                             static_cast<std::size_t>(std::stoull(std::string(fields[1]))), parse_double(fields[2]),
                             parse_double(fields[3]), parse_double(fields[4])});
  }
  return table;
}

}  // namespace mqcsim
