#include "mqcsim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <ostream>

#include "mqcsim/error.hpp"
#include "mqcsim/parallel.hpp"
#include "mqcsim/random.hpp"
#include "mqcsim/text_format.hpp"

namespace mqcsim {
namespace {

void check(bool condition, const std::string& what) {
  if (!condition) fail(ErrorKind::config, what);
}

// Echo-normalized amplitudes of one member, indexed [curve][point]. Point 0
// is the N = 0 spectrum used for K0; schedule entries follow.
using MemberSpectra = std::vector<std::vector<std::vector<double>>>;

std::vector<EulerAngles> member_orientations(const ExperimentConfig& cfg) {
  if (cfg.orientation_mode == OrientationMode::single) return {cfg.orientation};
  return powder_orientations(cfg.powder_count, cfg.seed);
}

std::optional<Operator> error_hamiltonian(const ExperimentConfig& cfg, const CouplingTable& table,
                                          const HilbertSpace& space, std::size_t member) {
  if (cfg.error_model == ErrorModel::none) return std::nullopt;
  RandomStream rng(cfg.seed, "error", member);
  if (cfg.error_model == ErrorModel::z_field) {
    std::vector<double> fields(table.site_count);
    for (double& h : fields) h = cfg.error_strength * rng.normal();
    return build_local_fields(fields, space);
  }
  CouplingTable delta = table;
  for (auto& c : delta.entries) c.d = cfg.error_strength * std::abs(c.d) * rng.normal();
  return build_h0(delta, space);
}

std::vector<double> echo_amplitudes(const Matrix& ref, const Matrix& act, const HilbertSpace& space, double purity0) {
  const MqcSpectrum s = spectrum_direct(ref, act, space);
  std::vector<double> a = s.amplitudes;
  for (double& v : a) v /= purity0;
  return a;
}

MemberSpectra run_member(const ExperimentConfig& cfg, const SiteSet& sites, double prefactor,
                         const EulerAngles& orientation, std::size_t member) {
  const HilbertSpace space(static_cast<int>(sites.size()), cfg.max_spins);
  const CouplingTable table = couplings(sites, orientation, prefactor, cfg.geometry.cutoff);

  std::optional<Operator> he = error_hamiltonian(cfg, table, space, member);
  std::shared_ptr<const SpectralDecomposition> ref_dec;
  std::shared_ptr<const SpectralDecomposition> prep_dec;
  std::vector<std::shared_ptr<const SpectralDecomposition>> fwd_dec(cfg.p_values.size());
  {
    const Operator h0 = build_h0(table, space);
    const Operator hdd = build_hdd(table, space);
    std::vector<const Operator*> ops{&h0, &hdd};
    if (he) ops.push_back(&*he);
    const SectorBasis basis = SectorBasis::build(space, ops);
    if (he) {
      ref_dec = std::make_shared<SpectralDecomposition>(
          SpectralDecomposition::of_hamiltonian(linear_combination(1.0, h0, -1.0, *he), basis));
      prep_dec = std::make_shared<SpectralDecomposition>(
          SpectralDecomposition::of_hamiltonian(linear_combination(1.0, h0, 1.0, *he), basis));
    } else {
      ref_dec = std::make_shared<SpectralDecomposition>(SpectralDecomposition::of_hamiltonian(h0, basis));
      prep_dec = ref_dec;
    }
    for (std::size_t k = 0; k < cfg.p_values.size(); ++k) {
      const double p = cfg.p_values[k];
      if (p == 0.0) {
        fwd_dec[k] = prep_dec;
        continue;
      }
      const CycleSpec cycle = CycleSpec::from_period(cfg.tau_c, p, cfg.mode);
      fwd_dec[k] = std::make_shared<SpectralDecomposition>(
          cycle_decomposition(cycle, h0, hdd, he ? &*he : nullptr, basis));
    }
  }

  const DensityOperator rho0 = thermal_state(space);
  const double purity0 = spectrum_direct(rho0, rho0).total();
  const Trajectory ref_traj(ref_dec, rho0);
  const std::optional<Trajectory> prep_traj =
      he ? std::optional<Trajectory>(Trajectory(prep_dec, rho0)) : std::nullopt;
  const Trajectory& prep = prep_traj ? *prep_traj : ref_traj;

  std::vector<long> points{0};
  points.insert(points.end(), cfg.schedule.begin(), cfg.schedule.end());

  MemberSpectra out;
  for (std::size_t k = 0; k < cfg.p_values.size(); ++k) {
    const double p = cfg.p_values[k];
    const double tau0 = (1.0 - p) * cfg.tau_c;
    for (long n0 : cfg.prep_cycles) {
      const double t_prep = static_cast<double>(n0) * tau0;
      const Matrix prepared = n0 == 0 ? rho0.matrix() : prep.matrix_at(t_prep);
      std::optional<Trajectory> fwd;
      if (p != 0.0) fwd.emplace(fwd_dec[k], DensityOperator(space, prepared, true));
      std::vector<std::vector<double>> curve;
      curve.reserve(points.size());
      for (long n : points) {
        const Matrix ref = ref_traj.matrix_at(static_cast<double>(n0 + n) * tau0);
        if (p == 0.0 && !he) {
          // Perfect reversal: the actual state is the reference state.
          curve.push_back(echo_amplitudes(ref, ref, space, purity0));
        } else if (p == 0.0) {
          const Matrix act = prep.matrix_at(t_prep + static_cast<double>(n) * cfg.tau_c);
          curve.push_back(echo_amplitudes(ref, act, space, purity0));
        } else {
          const Matrix act = n == 0 ? prepared : fwd->matrix_at(static_cast<double>(n) * cfg.tau_c);
          curve.push_back(echo_amplitudes(ref, act, space, purity0));
        }
      }
      out.push_back(std::move(curve));
    }
  }
  return out;
}

MqcSpectrum make_spectrum(const std::vector<double>& echo_amps, Normalization target, double purity0) {
  MqcSpectrum s = MqcSpectrum::zeros(static_cast<int>(echo_amps.size() / 2), Normalization::raw);
  s.amplitudes = echo_amps;
  if (target == Normalization::echo) {
    s.normalization = Normalization::echo;
    return s;
  }
  for (double& a : s.amplitudes) a *= purity0;
  return target == Normalization::raw ? s : normalized(s, target, purity0);
}

}  // namespace

SiteSet GeometrySpec::build(std::uint64_t seed) const {
  switch (kind) {
    case GeometryKind::fcc: return build_fcc(lattice_constant, sites, max_sites);
    case GeometryKind::chain: return build_chain(spacing, sites, axis, max_sites);
    case GeometryKind::random_cluster:
      return build_random_cluster(sites, radius, min_distance, derive_seed(seed, "geometry", 0), max_sites);
  }
  fail(ErrorKind::invalid_argument, "unknown geometry kind");
}

std::string_view to_string(OrientationMode mode) { return mode == OrientationMode::single ? "single" : "powder"; }

OrientationMode parse_orientation_mode(std::string_view text) {
  if (text == "single") return OrientationMode::single;
  if (text == "powder") return OrientationMode::powder;
  fail(ErrorKind::config, "unknown orientation mode '" + std::string(text) + "'");
}

std::string_view to_string(ErrorModel model) {
  switch (model) {
    case ErrorModel::none: return "none";
    case ErrorModel::z_field: return "z-field";
    case ErrorModel::coupling: return "coupling";
  }
  return "none";
}

ErrorModel parse_error_model(std::string_view text) {
  if (text == "none") return ErrorModel::none;
  if (text == "z-field") return ErrorModel::z_field;
  if (text == "coupling") return ErrorModel::coupling;
  fail(ErrorKind::config, "unknown error model '" + std::string(text) + "'");
}

void ExperimentConfig::validate() const {
  check(geometry.sites >= 1, "geometry needs at least one site");
  check(geometry.sites <= geometry.max_sites,
        "geometry asks for " + std::to_string(geometry.sites) + " sites, above max_sites " +
            std::to_string(geometry.max_sites));
  check(std::isfinite(geometry.nearest_coupling) && geometry.nearest_coupling > 0.0,
        "nearest-neighbour coupling must be positive");
  check(!p_values.empty(), "p list is empty");
  for (double p : p_values) check(p >= 0.0 && p <= 1.0, "p = " + format_double(p) + " lies outside [0, 1]");
  for (double p : p_values) check(p < 1.0, "p = 1 leaves no H0 block to reverse");
  check(!schedule.empty(), "N schedule is empty");
  check(schedule.front() >= 0, "N schedule must start at a nonnegative count");
  for (std::size_t i = 1; i < schedule.size(); ++i) check(schedule[i] > schedule[i - 1], "N schedule must be strictly increasing");
  check(!prep_cycles.empty(), "N0 list is empty");
  for (long n0 : prep_cycles) check(n0 >= 0, "N0 must be nonnegative");
  check(std::isfinite(tau_c) && tau_c > 0.0, "tau_c must be positive");
  check(std::isfinite(error_strength) && error_strength >= 0.0, "error strength must be nonnegative");
  check(realizations >= 1, "at least one error realization is needed");
  check(powder_count >= 1, "at least one powder orientation is needed");
  check(fit_floor > 0.0 && fit_floor < 1.0, "fit floor must lie in (0, 1)");
  check(tail_fraction > 0.0 && tail_fraction <= 1.0, "tail fraction must lie in (0, 1]");
  // Refuses with a memory estimate when the spin count is above the cap.
  (void)HilbertSpace(static_cast<int>(geometry.sites), max_spins);
}

std::size_t ExperimentConfig::members() const {
  const std::size_t orientations = orientation_mode == OrientationMode::powder ? powder_count : 1;
  return orientations * (error_model == ErrorModel::none ? 1 : realizations);
}

std::string ExperimentConfig::orientation_id() const {
  if (orientation_mode == OrientationMode::powder) return "powder:" + std::to_string(powder_count);
  return "single:" + format_double(orientation.alpha) + ":" + format_double(orientation.beta) + ":" +
         format_double(orientation.gamma);
}

std::vector<GrowthCurve> run_experiment(const ExperimentConfig& cfg, const Progress& progress) {
  cfg.validate();
  const SiteSet sites = cfg.geometry.build(cfg.seed);
  const double prefactor = prefactor_for_nearest_neighbor(sites, cfg.geometry.nearest_coupling);
  const std::vector<EulerAngles> orientations = member_orientations(cfg);
  const std::size_t per_orientation = cfg.members() / orientations.size();
  const std::size_t members = cfg.members();

  std::vector<MemberSpectra> results(members);
  std::atomic<std::size_t> finished{0};
  parallel_for(members, cfg.workers, [&](std::size_t m) {
    results[m] = run_member(cfg, sites, prefactor, orientations[m / per_orientation], m);
    const std::size_t done = ++finished;
    if (progress) progress(done, members);
  });

  // Ensemble mean in member order.
  MemberSpectra mean = results.front();
  for (std::size_t m = 1; m < members; ++m)
    for (std::size_t c = 0; c < mean.size(); ++c)
      for (std::size_t i = 0; i < mean[c].size(); ++i)
        for (std::size_t j = 0; j < mean[c][i].size(); ++j) mean[c][i][j] += results[m][c][i][j];
  for (auto& curve : mean)
    for (auto& point : curve)
      for (double& a : point) a /= static_cast<double>(members);

  const int n = static_cast<int>(sites.size());
  const double purity0 = 4.0 / (static_cast<double>(n) * std::ldexp(1.0, n));
  std::vector<GrowthCurve> curves;
  std::size_t c = 0;
  for (double p : cfg.p_values) {
    const CycleSpec cycle = CycleSpec::from_period(cfg.tau_c, p, cfg.mode);
    for (long n0 : cfg.prep_cycles) {
      const auto& points = mean[c++];
      GrowthCurve curve;
      curve.p = p;
      curve.prep_cycles = n0;
      curve.spins = n;
      {
        const MqcSpectrum s0 = make_spectrum(points[0], Normalization::echo, purity0);
        const ClusterEstimate e0 = fit_cluster_size(s0, cfg.fit_floor);
        curve.k0 = e0.k;
      }
      for (std::size_t i = 0; i < cfg.schedule.size(); ++i) {
        const long cycles = cfg.schedule[i];
        const std::vector<double>& amps = points[i + 1];
        MqcSpectrum s = make_spectrum(amps, cfg.normalization, purity0);
        s.metadata.spins = n;
        s.metadata.time = static_cast<double>(cycles) * cfg.tau_c;
        s.metadata.p = p;
        s.metadata.cycles = cycles;
        s.metadata.prep_cycles = n0;
        s.metadata.tau0 = cycle.tau0;
        s.metadata.tau_sigma = cycle.tau_sigma;
        s.metadata.k0 = curve.k0;
        s.metadata.seed = cfg.seed;
        s.metadata.orientation = cfg.orientation_id();
        double echo = 0.0;
        for (double a : amps) echo += a;
        curve.cycles.push_back(cycles);
        curve.times.push_back(s.metadata.time);
        curve.estimates.push_back(fit_cluster_size(s, cfg.fit_floor));
        curve.echo.push_back(echo);
        curve.spectra.push_back(std::move(s));
      }
      curves.push_back(std::move(curve));
    }
  }
  return curves;
}

std::vector<GrowthCurve> growth_experiment(const ExperimentConfig& cfg, const Progress& progress) {
  for (double p : cfg.p_values) check(p == 0.0, "unperturbed growth needs p = 0");
  check(cfg.prep_cycles == std::vector<long>{0}, "unperturbed growth takes no preparation cycles");
  return run_experiment(cfg, progress);
}

std::vector<GrowthCurve> perturbed_growth(const ExperimentConfig& cfg, const Progress& progress) {
  check(cfg.prep_cycles == std::vector<long>{0}, "perturbed growth takes no preparation cycles");
  return run_experiment(cfg, progress);
}

std::vector<GrowthCurve> equilibrium_experiment(const ExperimentConfig& cfg, const Progress& progress) {
  return run_experiment(cfg, progress);
}

EchoCurve echo_decay(const ExperimentConfig& cfg, const Progress& progress) {
  check(cfg.p_values.size() == 1, "echo decay takes exactly one p value");
  check(cfg.prep_cycles == std::vector<long>{0}, "echo decay takes no preparation cycles");
  const std::vector<GrowthCurve> curves = run_experiment(cfg, progress);
  EchoCurve echo;
  echo.cycles = curves.front().cycles;
  echo.times = curves.front().times;
  echo.values = curves.front().echo;
  return echo;
}

StationaryEstimate stationary_size(const std::vector<double>& k, double tail_fraction) {
  require(tail_fraction > 0.0 && tail_fraction <= 1.0, "tail fraction must lie in (0, 1]");
  const auto tail = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(k.size()) - 1e-9));
  if (tail < 4) {
    fail(ErrorKind::invalid_argument, "stationary size needs at least 4 tail points, got " + std::to_string(tail));
  }
  StationaryEstimate est;
  est.points = tail;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  for (std::size_t i = k.size() - tail; i < k.size(); ++i) {
    if (std::isnan(k[i])) {
      est.mean = est.spread = std::numeric_limits<double>::quiet_NaN();
      return est;
    }
    sum += k[i];
    lo = std::min(lo, k[i]);
    hi = std::max(hi, k[i]);
  }
  est.mean = sum / static_cast<double>(tail);
  est.spread = hi - lo;
  est.converged = est.spread < 0.1 * est.mean;
  return est;
}

StationaryEstimate stationary_size(const GrowthCurve& curve, double tail_fraction) {
  std::vector<double> k;
  for (const auto& e : curve.estimates) k.push_back(e.k);
  return stationary_size(k, tail_fraction);
}

PowerLawFit power_law_fit(const std::vector<double>& p, const std::vector<double>& k) {
  require(p.size() == k.size(), "power-law fit needs matching p and K lists");
  PowerLawFit fit;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0 && k[i] > 0.0 && std::isfinite(k[i])) {
      x.push_back(std::log(p[i]));
      y.push_back(std::log(k[i]));
    }
  }
  fit.points = x.size();
  if (x.size() < 2) {
    fit.reason = "fewer than two converged points with p > 0";
    return fit;
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) {
    fit.reason = "all p values coincide";
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    ss += r * r;
  }
  fit.slope_error = x.size() > 2 ? std::sqrt(ss / (n - 2.0) / sxx) : 0.0;
  fit.available = true;
  return fit;
}

SweepResult summarize_sweep(const std::vector<GrowthCurve>& curves, double tail_fraction) {
  SweepResult out;
  std::vector<double> p, k;
  for (const auto& c : curves) {
    SweepRow row{c.p, stationary_size(c, tail_fraction)};
    if (row.stationary.converged) {
      p.push_back(row.p);
      k.push_back(row.stationary.mean);
    }
    out.rows.push_back(row);
  }
  out.fit = power_law_fit(p, k);
  if (!out.fit.available && p.empty()) out.fit.reason = "no p value reached a converged stationary size";
  return out;
}

void write_spectra_csv(std::ostream& out, const std::vector<GrowthCurve>& curves) {
  out << "p,N0,N,dM,A\n";
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.spectra.size(); ++i) {
      const MqcSpectrum& s = c.spectra[i];
      for (int m = -s.max_order(); m <= s.max_order(); ++m) {
        out << format_double(c.p) << ',' << c.prep_cycles << ',' << c.cycles[i] << ',' << m << ','
            << format_double(s.at(m)) << '\n';
      }
    }
}

void write_growth_csv(std::ostream& out, const std::vector<GrowthCurve>& curves, double tail_fraction) {
  out << "p,K0,N,t,K,sigma,residual,converged,K_over_n,points,below_resolution,non_gaussian,E\n";
  for (const auto& c : curves) {
    bool converged = false;
    if (c.estimates.size() >= 4) {
      const auto tail = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(c.estimates.size()) - 1e-9));
      if (tail >= 4) converged = stationary_size(c, tail_fraction).converged;
    }
    for (std::size_t i = 0; i < c.estimates.size(); ++i) {
      const ClusterEstimate& e = c.estimates[i];
      out << format_double(c.p) << ',' << format_double(c.k0) << ',' << c.cycles[i] << ',' << format_double(c.times[i])
          << ',' << format_double(e.k) << ',' << format_double(e.sigma) << ',' << format_double(e.residual) << ','
          << (converged ? 1 : 0) << ',' << format_double(e.k / c.spins) << ',' << e.points << ','
          << (e.below_resolution ? 1 : 0) << ',' << (e.non_gaussian ? 1 : 0) << ',' << format_double(c.echo[i]) << '\n';
    }
  }
}

void write_echo_csv(std::ostream& out, const EchoCurve& curve) {
  out << "N,t,E\n";
  for (std::size_t i = 0; i < curve.values.size(); ++i) {
    out << curve.cycles[i] << ',' << format_double(curve.times[i]) << ',' << format_double(curve.values[i]) << '\n';
  }
}

void write_ksat_csv(std::ostream& out, const SweepResult& sweep) {
  out << "p,K_sat,spread,converged\n";
  for (const auto& r : sweep.rows) {
    out << format_double(r.p) << ',' << format_double(r.stationary.mean) << ',' << format_double(r.stationary.spread)
        << ',' << (r.stationary.converged ? 1 : 0) << '\n';
  }
}

void write_slope_csv(std::ostream& out, const SweepResult& sweep) {
  out << "slope,slope_error,intercept,points,available,reason\n";
  out << format_double(sweep.fit.slope) << ',' << format_double(sweep.fit.slope_error) << ','
      << format_double(sweep.fit.intercept) << ',' << sweep.fit.points << ',' << (sweep.fit.available ? 1 : 0) << ','
      << sweep.fit.reason << '\n';
}

}  // namespace mqcsim
