#include "mqcsim/mqc.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>

#include "mqcsim/error.hpp"
#include "mqcsim/text_format.hpp"

namespace mqcsim {
namespace {

constexpr double kResidueTolerance = 1e-8;

std::size_t index_of(const MqcSpectrum& s, int order) {
  const int n = s.max_order();
  if (order < -n || order > n) {
    fail(ErrorKind::invalid_argument, "coherence order " + std::to_string(order) + " outside -" +
                                          std::to_string(n) + ".." + std::to_string(n));
  }
  return static_cast<std::size_t>(order + n);
}

}  // namespace

std::string_view to_string(Normalization n) {
  switch (n) {
    case Normalization::raw: return "raw";
    case Normalization::echo: return "echo";
    case Normalization::unit_sum: return "unit-sum";
  }
  return "raw";
}

Normalization parse_normalization(std::string_view text) {
  if (text == "raw") return Normalization::raw;
  if (text == "echo") return Normalization::echo;
  if (text == "unit-sum" || text == "unit_sum") return Normalization::unit_sum;
  fail(ErrorKind::invalid_argument, "unknown normalization '" + std::string(text) + "'");
}

double MqcSpectrum::at(int order) const { return amplitudes[index_of(*this, order)]; }
double& MqcSpectrum::at(int order) { return amplitudes[index_of(*this, order)]; }

double MqcSpectrum::total() const {
  double s = 0.0;
  for (double a : amplitudes) s += a;
  return s;
}

double MqcSpectrum::odd_weight() const {
  double s = 0.0;
  for (int m = -max_order(); m <= max_order(); ++m)
    if (m % 2 != 0) s += std::abs(at(m));
  return s;
}

double MqcSpectrum::asymmetry() const {
  double worst = 0.0;
  for (int m = 1; m <= max_order(); ++m) worst = std::max(worst, std::abs(at(m) - at(-m)));
  return worst;
}

MqcSpectrum MqcSpectrum::zeros(int max_order, Normalization normalization) {
  require(max_order >= 0, "maximum coherence order must be nonnegative");
  MqcSpectrum s;
  s.amplitudes.assign(static_cast<std::size_t>(2 * max_order + 1), 0.0);
  s.normalization = normalization;
  s.metadata.spins = max_order;
  return s;
}

MqcSpectrum normalized(const MqcSpectrum& raw, Normalization target, double reference_purity) {
  require(raw.normalization == Normalization::raw, "only raw spectra can be renormalized");
  MqcSpectrum out = raw;
  out.normalization = target;
  double divisor = 1.0;
  if (target == Normalization::echo) divisor = reference_purity;
  if (target == Normalization::unit_sum) divisor = raw.total();
  require(divisor != 0.0 && std::isfinite(divisor), "cannot normalize by a zero total");
  for (double& a : out.amplitudes) a /= divisor;
  return out;
}

Matrix coherence_component(const Matrix& m, const HilbertSpace& space, int order) {
  const auto dim = static_cast<Eigen::Index>(space.dim());
  require(m.rows() == dim && m.cols() == dim, "matrix does not match the Hilbert space dimension");
  Matrix out = Matrix::Zero(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c)
    for (Eigen::Index r = 0; r < dim; ++r)
      if (space.coherence_order(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) == order) out(r, c) = m(r, c);
  return out;
}

std::map<int, Matrix> decompose_by_coherence(const DensityOperator& rho, std::size_t max_bytes) {
  const HilbertSpace& space = rho.space();
  const int n = space.spins();
  const std::size_t needed = static_cast<std::size_t>(2 * n + 1) * dense_matrix_bytes(n);
  if (needed > max_bytes) {
    fail(ErrorKind::resource_cap, "coherence decomposition needs " + std::to_string(needed) + " bytes, cap is " +
                                      std::to_string(max_bytes));
  }
  const auto dim = static_cast<Eigen::Index>(space.dim());
  std::map<int, Matrix> parts;
  for (int m = -n; m <= n; ++m) parts.emplace(m, Matrix::Zero(dim, dim));
  for (Eigen::Index c = 0; c < dim; ++c)
    for (Eigen::Index r = 0; r < dim; ++r) {
      const int m = space.coherence_order(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
      parts[m](r, c) = rho.matrix()(r, c);
    }
  return parts;
}

MqcSpectrum spectrum_direct(const DensityOperator& ref, const DensityOperator& actual) {
  require(ref.space() == actual.space(), "reference and actual states live on different Hilbert spaces");
  return spectrum_direct(ref.matrix(), actual.matrix(), ref.space());
}

MqcSpectrum spectrum_direct(const Matrix& a, const Matrix& b, const HilbertSpace& space) {
  const int n = space.spins();
  const auto dim = static_cast<Eigen::Index>(space.dim());
  require(a.rows() == dim && a.cols() == dim && b.rows() == dim && b.cols() == dim,
          "state matrices do not match the Hilbert space dimension");
  std::vector<Complex> sums(static_cast<std::size_t>(2 * n + 1));
  for (Eigen::Index c = 0; c < dim; ++c) {
    const int pc = std::popcount(static_cast<std::size_t>(c));
    for (Eigen::Index r = 0; r < dim; ++r) {
      const int order = std::popcount(static_cast<std::size_t>(r)) - pc;
      sums[static_cast<std::size_t>(order + n)] += std::conj(a(r, c)) * b(r, c);
    }
  }
  MqcSpectrum s = MqcSpectrum::zeros(n);
  for (std::size_t k = 0; k < sums.size(); ++k) s.amplitudes[k] = sums[k].real();
  s.metadata.spins = n;
  return s;
}

std::size_t default_phase_grid(int spins) {
  std::size_t g = 1;
  while (g < static_cast<std::size_t>(2 * spins + 2)) g <<= 1;
  return g;
}

std::vector<PhaseSample> phase_encoded_signal(const DensityOperator& forward, const Propagator& back,
                                              std::size_t grid) {
  const HilbertSpace& space = forward.space();
  require(space == back.space(), "state and propagator live on different Hilbert spaces");
  const auto minimum = static_cast<std::size_t>(2 * space.spins() + 2);
  if (grid < minimum) {
    fail(ErrorKind::invalid_argument, "phase grid of " + std::to_string(grid) + " points aliases coherence orders; at least " +
                                          std::to_string(minimum) + " are needed");
  }
  const auto dim = static_cast<Eigen::Index>(space.dim());
  const Matrix& u = back.matrix();
  std::vector<PhaseSample> out(grid);
  for (std::size_t k = 0; k < grid; ++k) {
    const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(grid);
    const Operator rot = rotation_z(space, phi);
    const auto d = rot.matrix().diagonal();
    Matrix encoded = d.asDiagonal() * forward.matrix() * d.conjugate().asDiagonal();
    const Matrix left = u * encoded;
    // Tr{Iz U X U^dagger} only needs the diagonal of U X U^dagger.
    Complex value{};
    for (Eigen::Index b = 0; b < dim; ++b) {
      // dot() conjugates its first argument.
      const Complex diag = std::conj(left.row(b).dot(u.row(b)));
      value += space.mz(static_cast<std::size_t>(b)) * diag;
    }
    out[k] = {phi, value.real(), value.imag()};
  }
  return out;
}

MqcSpectrum spectrum_from_signal(const std::vector<PhaseSample>& samples, int max_order, Normalization normalization) {
  require(!samples.empty(), "empty phase signal");
  const auto grid = samples.size();
  if (grid < static_cast<std::size_t>(2 * max_order + 2)) {
    fail(ErrorKind::invalid_argument, "phase grid too small for coherence order " + std::to_string(max_order));
  }
  MqcSpectrum s = MqcSpectrum::zeros(max_order, normalization);
  double max_re = 0.0;
  double max_im = 0.0;
  for (int m = -max_order; m <= max_order; ++m) {
    Complex acc{};
    for (std::size_t k = 0; k < grid; ++k) {
      // Use the exact grid angle so integer frequencies land on exact bins.
      const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(grid);
      acc += Complex(samples[k].signal, samples[k].imaginary) * std::polar(1.0, m * phi);
    }
    acc /= static_cast<double>(grid);
    s.at(m) = acc.real();
    max_re = std::max(max_re, std::abs(acc.real()));
    max_im = std::max(max_im, std::abs(acc.imag()));
  }
  s.imaginary_residue = max_re > 0.0 ? max_im / max_re : max_im;
  s.residue_flag = s.imaginary_residue >= kResidueTolerance;
  return s;
}

std::vector<double> binomial_counts(int k) {
  require(k >= 1, "cluster size K must be at least 1");
  std::vector<double> counts(static_cast<std::size_t>(2 * k + 1));
  const double log_top = std::lgamma(2.0 * k + 1.0);
  for (int m = -k; m <= k; ++m) {
    const double v = log_top - std::lgamma(k + m + 1.0) - std::lgamma(k - m + 1.0);
    // Exact integers stay exact while they fit in the mantissa.
    counts[static_cast<std::size_t>(m + k)] = v < 36.0 ? std::round(std::exp(v)) : std::exp(v);
  }
  return counts;
}

ClusterEstimate fit_cluster_size(const MqcSpectrum& spectrum, double floor) {
  require(floor > 0.0 && floor < 1.0, "fit floor must lie in (0, 1)");
  ClusterEstimate est;
  const double a0 = spectrum.at(0);
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> w;
  if (a0 > 0.0) {
    for (int m = 0; m <= spectrum.max_order(); m += 2) {
      const double a = spectrum.at(m);
      if (!(a > floor * a0)) continue;
      x.push_back(static_cast<double>(m) * m);
      y.push_back(std::log(a));
      w.push_back(std::sqrt(a / a0));
    }
  }
  est.points = x.size();
  if (x.size() < 3) {
    est.below_resolution = true;
    return est;
  }
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    ss += w[i] * r * r;
  }
  est.residual = std::sqrt(ss / sw);
  if (!(slope < 0.0)) {
    est.non_gaussian = true;
    est.k = std::numeric_limits<double>::quiet_NaN();
    est.sigma = est.k;
    return est;
  }
  est.k = -1.0 / slope;
  est.sigma = std::sqrt(est.k);
  return est;
}

void write_spectrum(std::ostream& out, const MqcSpectrum& s) {
  const auto& m = s.metadata;
  out << "# spins=" << m.spins << " time=" << format_double(m.time) << " p=" << format_double(m.p)
      << " N=" << m.cycles << " N0=" << m.prep_cycles << " tau0=" << format_double(m.tau0)
      << " tau_sigma=" << format_double(m.tau_sigma) << " K0=" << format_double(m.k0) << " seed=" << m.seed
      << " orientation=" << m.orientation << '\n';
  out << "# normalization=" << to_string(s.normalization) << " max_order=" << s.max_order()
      << " imaginary_residue=" << format_double(s.imaginary_residue) << '\n';
  out << "dM,A\n";
  for (int k = -s.max_order(); k <= s.max_order(); ++k) out << k << ',' << format_double(s.at(k)) << '\n';
}

MqcSpectrum read_spectrum(std::istream& in) {
  std::string line;
  SpectrumMetadata meta;
  Normalization norm = Normalization::raw;
  int max_order = -1;
  double residue = 0.0;
  while (std::getline(in, line) && !line.empty() && line[0] == '#') {
    const std::string_view body = std::string_view(line).substr(1);
    for (const auto token : split(trim(body), ' ')) {
      const auto eq = token.find('=');
      if (eq == std::string_view::npos) continue;
      const std::string key(token.substr(0, eq));
      const std::string value(token.substr(eq + 1));
      if (key == "spins") meta.spins = std::stoi(value);
      else if (key == "time") meta.time = parse_double(value);
      else if (key == "p") meta.p = parse_double(value);
      else if (key == "N") meta.cycles = std::stol(value);
      else if (key == "N0") meta.prep_cycles = std::stol(value);
      else if (key == "tau0") meta.tau0 = parse_double(value);
      else if (key == "tau_sigma") meta.tau_sigma = parse_double(value);
      else if (key == "K0") meta.k0 = parse_double(value);
      else if (key == "seed") meta.seed = std::stoull(value);
      else if (key == "orientation") meta.orientation = value;
      else if (key == "normalization") norm = parse_normalization(value);
      else if (key == "max_order") max_order = std::stoi(value);
      else if (key == "imaginary_residue") residue = parse_double(value);
    }
  }
  require(max_order >= 0, "spectrum header lacks max_order");
  require(trim(line) == "dM,A", "spectrum table lacks its header row");
  MqcSpectrum s = MqcSpectrum::zeros(max_order, norm);
  s.metadata = meta;
  s.imaginary_residue = residue;
  s.residue_flag = residue >= kResidueTolerance;
  for (int k = -max_order; k <= max_order; ++k) {
    require(static_cast<bool>(std::getline(in, line)), "truncated spectrum table");
    const auto fields = split(line, ',');
    require(fields.size() == 2 && std::stoi(std::string(fields[0])) == k, "malformed spectrum row");
    s.at(k) = parse_double(fields[1]);
  }
  return s;
}

}  // namespace mqcsim
