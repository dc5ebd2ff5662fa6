#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "mqcsim/evolve.hpp"
#include "mqcsim/geometry.hpp"
#include "mqcsim/mqc.hpp"

namespace mqcsim {

struct GeometrySpec {
  GeometryKind kind = GeometryKind::fcc;
  std::size_t sites = 12;
  double lattice_constant = 1.0;  // fcc
  double spacing = 1.0;           // chain
  Vec3 axis{1.0, 0.0, 0.0};       // chain
  double radius = 2.0;            // random cluster
  double min_distance = 0.5;      // random cluster
  std::size_t max_sites = 19;
  /// Couplings are scaled so that a perpendicular nearest-neighbour pair has
  /// this value, which sets the unit of time.
  double nearest_coupling = 1.0;
  double cutoff = std::numeric_limits<double>::infinity();

  /// Random clusters draw from the stream (seed, "geometry", 0).
  [[nodiscard]] SiteSet build(std::uint64_t seed) const;

  friend bool operator==(const GeometrySpec&, const GeometrySpec&) = default;
};

enum class OrientationMode { single, powder };
enum class ErrorModel {
  none,
  z_field,   // static local fields h_i ~ N(0, strength)
  coupling,  // H0 built from delta_ij = strength |d_ij| g_ij, g ~ N(0, 1)
};

std::string_view to_string(OrientationMode mode);
OrientationMode parse_orientation_mode(std::string_view text);
std::string_view to_string(ErrorModel model);
ErrorModel parse_error_model(std::string_view text);

struct ExperimentConfig {
  GeometrySpec geometry;
  OrientationMode orientation_mode = OrientationMode::single;
  EulerAngles orientation;       // single mode
  std::size_t powder_count = 1;  // powder mode
  std::vector<double> p_values{0.0};
  std::vector<long> schedule{0};      // cycle counts N, strictly increasing
  std::vector<long> prep_cycles{0};   // N0 values, one curve each
  double tau_c = 0.1;
  CycleMode mode = CycleMode::effective;
  Normalization normalization = Normalization::echo;
  ErrorModel error_model = ErrorModel::none;
  double error_strength = 0.0;
  std::size_t realizations = 1;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  int max_spins = kDefaultMaxSpins;
  double fit_floor = kDefaultFitFloor;
  double tail_fraction = 0.25;

  /// Throws Error(config) on the first violated constraint.
  void validate() const;
  [[nodiscard]] std::size_t members() const;
  [[nodiscard]] std::string orientation_id() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct GrowthCurve {
  double p = 0.0;
  long prep_cycles = 0;
  double k0 = 1.0;
  int spins = 0;
  std::vector<long> cycles;
  std::vector<double> times;  // N tau_c
  std::vector<MqcSpectrum> spectra;
  std::vector<ClusterEstimate> estimates;
  std::vector<double> echo;  // sum of the echo-normalized mean spectrum
};

struct EchoCurve {
  std::vector<long> cycles;
  std::vector<double> times;
  std::vector<double> values;  // E(0) = 1
};

/// Progress hook: (finished members, total members).
using Progress = std::function<void(std::size_t, std::size_t)>;

/// Every (p, N0) curve of a configuration.
///
/// For each ensemble member (orientation x error realization) the reference
/// state is rho0 evolved for (N0 + N) tau0 under H0 - He and the actual state
/// is rho0 evolved for N0 tau0 under H0 + He, then N cycles of the forward
/// sequence (Heff(p) + He, or the pulsed cycle with He in both blocks), with
/// tau0 = (1 - p) tau_c. Spectra are echo-normalized, averaged over members
/// in member order, renormalized if requested, and only then fitted.
std::vector<GrowthCurve> run_experiment(const ExperimentConfig& cfg, const Progress& progress = {});

/// Unperturbed growth: requires p = 0 only.
std::vector<GrowthCurve> growth_experiment(const ExperimentConfig& cfg, const Progress& progress = {});
/// One curve per p without preparation.
std::vector<GrowthCurve> perturbed_growth(const ExperimentConfig& cfg, const Progress& progress = {});
/// One curve per N0 (and p).
std::vector<GrowthCurve> equilibrium_experiment(const ExperimentConfig& cfg, const Progress& progress = {});
/// E(N) for the single configured p, normalized to E(N = 0) = 1 by construction.
EchoCurve echo_decay(const ExperimentConfig& cfg, const Progress& progress = {});

struct StationaryEstimate {
  double mean = 0.0;
  double spread = 0.0;  // max - min over the tail
  std::size_t points = 0;
  bool converged = false;
};

/// Mean and range of K over the last `tail_fraction` of the curve (at least
/// four points). Converged when the range is below 10% of the mean; a NaN
/// in the tail makes the estimate NaN and unconverged.
StationaryEstimate stationary_size(const std::vector<double>& k_values, double tail_fraction = 0.25);
StationaryEstimate stationary_size(const GrowthCurve& curve, double tail_fraction = 0.25);

struct PowerLawFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double slope_error = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  std::size_t points = 0;
  bool available = false;
  std::string reason;
};

/// Least squares of ln K = a + b ln p; the slope standard error is zero for
/// two points. Needs two distinct positive p.
PowerLawFit power_law_fit(const std::vector<double>& p, const std::vector<double>& k);

struct SweepRow {
  double p = 0.0;
  StationaryEstimate stationary;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  PowerLawFit fit;  // converged rows with p > 0 only
};

SweepResult summarize_sweep(const std::vector<GrowthCurve>& curves, double tail_fraction);

/// CSV writers (comma separated, header row, full precision).
void write_spectra_csv(std::ostream& out, const std::vector<GrowthCurve>& curves);
void write_growth_csv(std::ostream& out, const std::vector<GrowthCurve>& curves, double tail_fraction);
void write_echo_csv(std::ostream& out, const EchoCurve& curve);
void write_ksat_csv(std::ostream& out, const SweepResult& sweep);
void write_slope_csv(std::ostream& out, const SweepResult& sweep);

}  // namespace mqcsim
