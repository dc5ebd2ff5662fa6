#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "mqcsim/evolve.hpp"
#include "mqcsim/hilbert.hpp"

namespace mqcsim {

/// raw: A(dM) = Re Tr{ref_dM^dagger act_dM} as computed.
/// echo: raw divided by Tr{ref^2}, so identical inputs sum to 1 and the sum
///       of a perturbed spectrum is the echo amplitude.
/// unit_sum: rescaled so that sum_dM A(dM) = 1.
enum class Normalization { raw, echo, unit_sum };

std::string_view to_string(Normalization n);
Normalization parse_normalization(std::string_view text);

struct SpectrumMetadata {
  int spins = 0;
  double time = 0.0;
  double p = 0.0;
  long cycles = 0;
  long prep_cycles = 0;
  double tau0 = 0.0;
  double tau_sigma = 0.0;
  double k0 = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  std::string orientation = "single";
};

/// A(dM) for dM = -n..n.
struct MqcSpectrum {
  std::vector<double> amplitudes;  // index dM + n
  Normalization normalization = Normalization::raw;
  SpectrumMetadata metadata;
  /// max |Im| / max |Re| of the extracted coefficients; zero for direct spectra.
  double imaginary_residue = 0.0;
  bool residue_flag = false;

  [[nodiscard]] int max_order() const { return static_cast<int>(amplitudes.size() / 2); }
  [[nodiscard]] double at(int order) const;
  [[nodiscard]] double& at(int order);
  [[nodiscard]] double total() const;
  /// Sum of |A(odd)|.
  [[nodiscard]] double odd_weight() const;
  /// max |A(dM) - A(-dM)|.
  [[nodiscard]] double asymmetry() const;

  static MqcSpectrum zeros(int max_order, Normalization normalization = Normalization::raw);
};

/// Rescale a raw spectrum. `echo` needs the reference purity Tr{ref^2}.
MqcSpectrum normalized(const MqcSpectrum& raw, Normalization target, double reference_purity);

/// Component of `m` with coherence order `order`; all other elements zeroed.
Matrix coherence_component(const Matrix& m, const HilbertSpace& space, int order);

/// All 2n + 1 components. Refuses (resource cap) when they would need more
/// than `max_bytes` in total.
std::map<int, Matrix> decompose_by_coherence(const DensityOperator& rho, std::size_t max_bytes = std::size_t{1} << 31);

/// A(dM) = Re Tr{(ref_dM)^dagger act_dM} in raw normalization.
MqcSpectrum spectrum_direct(const DensityOperator& ref, const DensityOperator& actual);
/// Same on bare matrices, skipping the density-operator checks.
MqcSpectrum spectrum_direct(const Matrix& ref, const Matrix& actual, const HilbertSpace& space);

/// Smallest power of two >= 2n + 2.
std::size_t default_phase_grid(int spins);

/// Sample k of the phase-encoded measurement.
struct PhaseSample {
  double phi = 0.0;
  double signal = 0.0;
  double imaginary = 0.0;  // Im Tr{Iz rho_f}, zero up to rounding
};

/// For phi_k = 2 pi k / grid: rotate the forward state by exp(-i phi Iz),
/// apply `back`, and record Tr{Iz rho_f}. With rho0 = Iz / Tr{Iz^2} the
/// unevolved value is 1. Throws when grid < 2n + 2.
std::vector<PhaseSample> phase_encoded_signal(const DensityOperator& forward, const Propagator& back,
                                              std::size_t grid);

/// A(dM) = (1/N) sum_k s_k exp(+i dM phi_k) for dM = -max_order..max_order.
/// The result carries echo normalization when the samples do. Residues above
/// 1e-8 of the largest amplitude set residue_flag.
MqcSpectrum spectrum_from_signal(const std::vector<PhaseSample>& samples, int max_order,
                                 Normalization normalization = Normalization::echo);

/// n(dM, K) = (2K)! / ((K + dM)! (K - dM)!) for |dM| <= K, as doubles
/// evaluated through lgamma. Index dM + K. Central counts overflow to inf
/// beyond K = 511.
std::vector<double> binomial_counts(int k);

struct ClusterEstimate {
  double k = 1.0;
  double sigma = 1.0;  // half width at 1/e, sqrt(K)
  double residual = 0.0;
  std::size_t points = 0;
  bool below_resolution = false;
  bool non_gaussian = false;
};

inline constexpr double kDefaultFitFloor = 1e-3;

/// Weighted least squares of ln A(dM) = ln A0 - dM^2 / K over even dM >= 0
/// with A(dM) > floor * A(0); weights sqrt(A(dM) / A(0)). Fewer than three points
/// give K = 1 with below_resolution set. A nonnegative slope gives K = NaN
/// with non_gaussian set. `residual` is the weighted RMS of ln A.
ClusterEstimate fit_cluster_size(const MqcSpectrum& spectrum, double floor = kDefaultFitFloor);

/// '#' metadata lines then "dM,A" rows.
void write_spectrum(std::ostream& out, const MqcSpectrum& spectrum);
MqcSpectrum read_spectrum(std::istream& in);

}  // namespace mqcsim
