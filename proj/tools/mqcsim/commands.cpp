#include "commands.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "config.hpp"
#include "manifest.hpp"
#include "mqcsim/error.hpp"
#include "mqcsim/experiments.hpp"
#include "mqcsim/oracle.hpp"
#include "mqcsim/random.hpp"
#include "mqcsim/text_format.hpp"

namespace mqcsim::cli {
namespace fs = std::filesystem;
namespace {

fs::path output_dir(const std::string& output) {
  const fs::path rel(output);
  if (rel.is_absolute()) fail(ErrorKind::config, "run.output must be a relative path, got " + output);
  for (const auto& part : rel) {
    if (part == "..") fail(ErrorKind::config, "run.output must not leave the output root: " + output);
  }
  const char* root = std::getenv("MQCSIM_OUTPUT_ROOT");
  const fs::path dir = fs::path(root && *root ? root : ".") / rel;
  fs::create_directories(dir);
  return dir;
}

class Writer {
 public:
  Writer(fs::path dir, RunManifest& manifest) : dir_(std::move(dir)), manifest_(manifest) {}

  template <typename F>
  void write(const std::string& name, F&& body) {
    {
      std::ofstream out(dir_ / name, std::ios::binary);
      if (!out) fail(ErrorKind::config, "cannot create " + (dir_ / name).string());
      body(out);
      if (!out) fail(ErrorKind::invariant, "failed to write " + (dir_ / name).string());
    }
    manifest_.add_file(dir_, name);
  }

  [[nodiscard]] const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  RunManifest& manifest_;
};

std::vector<SeedStream> seed_streams(const ExperimentConfig& x) {
  std::vector<SeedStream> streams;
  if (x.geometry.kind == GeometryKind::random_cluster) {
    streams.push_back({"geometry", 0, derive_seed(x.seed, "geometry", 0)});
  }
  if (x.orientation_mode == OrientationMode::powder) {
    for (std::size_t k = 0; k < x.powder_count; ++k) streams.push_back({"orientation", k, derive_seed(x.seed, "orientation", k)});
  }
  if (x.error_model != ErrorModel::none) {
    for (std::size_t m = 0; m < x.members(); ++m) streams.push_back({"error", m, derive_seed(x.seed, "error", m)});
  }
  return streams;
}

Progress progress_hook(bool quiet, std::ostream& err) {
  if (quiet) return {};
  return [&err](std::size_t done, std::size_t total) {
    err << "member " << done << "/" << total << " done\n" << std::flush;
  };
}

void summarize(std::ostream& out, const std::vector<GrowthCurve>& curves, double tail_fraction) {
  for (const auto& c : curves) {
    out << "p=" << format_double(c.p) << " N0=" << c.prep_cycles << " K0=" << format_double(c.k0);
    if (!c.estimates.empty()) out << " K_final=" << format_double(c.estimates.back().k) << " E_final=" << format_double(c.echo.back());
    const auto tail = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(c.estimates.size()) - 1e-9));
    if (tail >= 4) {
      const StationaryEstimate st = stationary_size(c, tail_fraction);
      out << " K_tail=" << format_double(st.mean) << " spread=" << format_double(st.spread)
          << (st.converged ? " converged" : " unconverged");
    }
    out << '\n';
  }
}

void warn_flags(std::ostream& err, const std::vector<GrowthCurve>& curves) {
  std::size_t non_gaussian = 0;
  for (const auto& c : curves)
    for (const auto& e : c.estimates) non_gaussian += e.non_gaussian ? 1 : 0;
  if (non_gaussian > 0) err << "warning: " << non_gaussian << " spectra did not fit a Gaussian (K reported as nan)\n";
}

void write_curves(Writer& w, const std::vector<GrowthCurve>& curves, double tail_fraction) {
  w.write("spectra.csv", [&](std::ostream& o) { write_spectra_csv(o, curves); });
  w.write("growth.csv", [&](std::ostream& o) { write_growth_csv(o, curves, tail_fraction); });
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->kind()) {
      case ErrorKind::invalid_argument:
      case ErrorKind::config: return 2;
      case ErrorKind::resource_cap: return 3;
      case ErrorKind::invariant: return 4;
    }
  }
  return 4;
}

void run_command(const std::string& command, const CommandOptions& options, std::ostream& out, std::ostream& err) {
  ConfigFile file = ConfigFile::load(options.config_path);
  for (const auto& o : options.overrides) file.set(o);
  std::vector<std::string> required;
  if (command != "lattice") required.push_back("experiment.N");
  if (command == "perturb" || command == "sweep" || command == "equilibrium") required.push_back("experiment.p");
  if (command == "equilibrium") required.push_back("experiment.N0");
  const RunConfig cfg = resolve(file, required);
  const ExperimentConfig& x = cfg.experiment;
  const std::string config_text = echo(cfg);

  RunManifest manifest;
  manifest.version = kVersion;
  manifest.command = command;
  manifest.config = config_text;
  manifest.root_seed = x.seed;
  manifest.streams = seed_streams(x);
  manifest.started = utc_now();

  if (command == "lattice") {
    if (x.geometry.sites > x.geometry.max_sites) {
      fail(ErrorKind::config, "geometry asks for " + std::to_string(x.geometry.sites) + " sites, above max_sites " +
                                  std::to_string(x.geometry.max_sites));
    }
  } else {
    x.validate();
  }
  Writer w(output_dir(cfg.output), manifest);
  w.write("config.echo", [&](std::ostream& o) { o << config_text; });
  const Progress progress = progress_hook(options.quiet, err);

  if (command == "lattice") {
    const SiteSet sites = x.geometry.build(x.seed);
    const double prefactor = prefactor_for_nearest_neighbor(sites, x.geometry.nearest_coupling);
    const CouplingTable table = couplings(sites, x.orientation, prefactor, x.geometry.cutoff);
    w.write("sites.csv", [&](std::ostream& o) { write_sites(o, sites); });
    w.write("couplings.csv", [&](std::ostream& o) { write_couplings(o, table); });
    out << "sites=" << sites.size() << " pairs=" << table.entries.size() << " prefactor=" << format_double(prefactor)
        << " max_coupling=" << format_double(table.max_abs()) << '\n';
  } else if (command == "grow" || command == "perturb" || command == "equilibrium") {
    std::vector<GrowthCurve> curves;
    if (command == "grow") curves = growth_experiment(x, progress);
    if (command == "perturb") curves = perturbed_growth(x, progress);
    if (command == "equilibrium") curves = equilibrium_experiment(x, progress);
    write_curves(w, curves, x.tail_fraction);
    warn_flags(err, curves);
    summarize(out, curves, x.tail_fraction);
  } else if (command == "echo") {
    const EchoCurve curve = echo_decay(x, progress);
    w.write("echo.csv", [&](std::ostream& o) { write_echo_csv(o, curve); });
    out << "E_final=" << format_double(curve.values.back()) << " at t=" << format_double(curve.times.back()) << '\n';
  } else if (command == "sweep") {
    if (x.p_values.size() < 2) fail(ErrorKind::config, "sweep needs at least two p values");
    const double tail = std::ceil(x.tail_fraction * static_cast<double>(x.schedule.size()) - 1e-9);
    if (tail < 4.0) {
      fail(ErrorKind::config, "sweep needs at least 4 tail points; experiment.N has " + std::to_string(x.schedule.size()) +
                                  " entries and tail_fraction " + format_double(x.tail_fraction));
    }
    const std::vector<GrowthCurve> curves = perturbed_growth(x, progress);
    const SweepResult sweep = summarize_sweep(curves, x.tail_fraction);
    write_curves(w, curves, x.tail_fraction);
    w.write("ksat.csv", [&](std::ostream& o) { write_ksat_csv(o, sweep); });
    w.write("slope.csv", [&](std::ostream& o) { write_slope_csv(o, sweep); });
    warn_flags(err, curves);
    summarize(out, curves, x.tail_fraction);
    if (sweep.fit.available) {
      out << "slope=" << format_double(sweep.fit.slope) << " +- " << format_double(sweep.fit.slope_error) << " from "
          << sweep.fit.points << " converged p values\n";
    } else {
      out << "slope withheld: " << sweep.fit.reason << '\n';
    }
  } else {
    fail(ErrorKind::config, "unknown command " + command);
  }

  manifest.finished = utc_now();
  manifest.write(w.dir());
}

bool selftest(std::ostream& out) {
  std::vector<oracle::OracleReport> reports;

  {
    // Random Hermitian pairs against the brute-force spectrum.
    RandomStream rng(7, "selftest", 0);
    std::vector<double> main_values, oracle_values;
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 1 + trial % 5;
      const HilbertSpace space(n);
      const auto dim = static_cast<Eigen::Index>(space.dim());
      const auto random_hermitian = [&] {
        Matrix m(dim, dim);
        for (Eigen::Index c = 0; c < dim; ++c)
          for (Eigen::Index r = 0; r < dim; ++r) m(r, c) = Complex(rng.normal(), rng.normal());
        return Matrix(0.5 * (m + m.adjoint()));
      };
      const DensityOperator a(space, random_hermitian(), false);
      const DensityOperator b(space, random_hermitian(), false);
      const MqcSpectrum s1 = spectrum_direct(a, b);
      const MqcSpectrum s2 = oracle::spectrum(a, b);
      main_values.insert(main_values.end(), s1.amplitudes.begin(), s1.amplitudes.end());
      oracle_values.insert(oracle_values.end(), s2.amplitudes.begin(), s2.amplitudes.end());
    }
    reports.push_back(oracle::OracleReport::compare("spectrum_direct vs brute force", main_values, oracle_values, 1e-12));
  }

  {
    const SiteSet pair = build_chain(1.0, 2, {1.0, 0.0, 0.0}, 2);
    const CouplingTable table = couplings(pair, {}, 1.0);
    const HilbertSpace space(2);
    const auto dec = std::make_shared<SpectralDecomposition>(SpectralDecomposition::of_hamiltonian(build_h0(table, space)));
    const Trajectory traj(dec, thermal_state(space));
    std::vector<double> main_values, oracle_values;
    for (int k = 0; k < 100; ++k) {
      const double t = 0.05 * k;
      const Matrix rho = traj.matrix_at(t);
      const MqcSpectrum s = spectrum_direct(rho, rho, space);
      const auto o = oracle::two_spin(table.entries[0].d, t);
      main_values.insert(main_values.end(), {s.at(2), s.at(-2), s.at(0)});
      oracle_values.insert(oracle_values.end(), {o.a2, o.a2, o.a0});
    }
    reports.push_back(oracle::OracleReport::compare("two-spin closed form", main_values, oracle_values, 1e-9));
  }

  {
    const SiteSet sites = build_fcc(1.0, 5, 19);
    const CouplingTable table = couplings(sites, {0.4, 1.1, 2.0}, prefactor_for_nearest_neighbor(sites, 1.0));
    const HilbertSpace space(5);
    const Operator h0 = build_h0(table, space);
    const Operator hdd = build_hdd(table, space);
    const auto flat = [](const Matrix& m) {
      std::vector<double> v;
      for (Eigen::Index i = 0; i < m.size(); ++i) v.insert(v.end(), {m.data()[i].real(), m.data()[i].imag()});
      return v;
    };
    reports.push_back(oracle::OracleReport::compare("H0 vs Kronecker products", flat(h0.matrix()),
                                                    flat(oracle::double_quantum_hamiltonian(table)), 1e-14));
    reports.push_back(oracle::OracleReport::compare("Hdd vs Kronecker products", flat(hdd.matrix()),
                                                    flat(oracle::dipolar_hamiltonian(table)), 1e-14));
    const Operator heff = mix_hamiltonians(h0, hdd, 0.3);
    reports.push_back(oracle::OracleReport::compare("exp(-iHt) vs series", flat(propagator(heff, 1.7).matrix()),
                                                    flat(oracle::matrix_exp(heff.matrix(), 1.7)), 1e-11));
  }

  {
    // Phase-encoded protocol against the direct spectrum.
    const SiteSet sites = build_fcc(1.0, 6, 19);
    const CouplingTable table = couplings(sites, {0.3, 0.9, 0.2}, prefactor_for_nearest_neighbor(sites, 1.0));
    const HilbertSpace space(6);
    const Operator h0 = build_h0(table, space);
    const Operator hdd = build_hdd(table, space);
    const DensityOperator rho0 = thermal_state(space);
    std::vector<double> main_values, oracle_values;
    for (double p : {0.0, 0.2}) {
      for (double t : {0.5, 1.5}) {
        const double t0 = (1.0 - p) * t;
        const DensityOperator ref = evolve(rho0, propagator(h0, t0));
        const DensityOperator act = evolve(rho0, propagator(mix_hamiltonians(h0, hdd, p), t));
        const MqcSpectrum protocol =
            spectrum_from_signal(phase_encoded_signal(act, propagator(h0, -t0), default_phase_grid(6)), 6);
        const MqcSpectrum direct = normalized(oracle::spectrum(ref, act), Normalization::echo, rho0.purity());
        main_values.insert(main_values.end(), protocol.amplitudes.begin(), protocol.amplitudes.end());
        oracle_values.insert(oracle_values.end(), direct.amplitudes.begin(), direct.amplitudes.end());
      }
    }
    reports.push_back(oracle::OracleReport::compare("phase protocol vs brute force", main_values, oracle_values, 1e-10));
  }

  bool ok = true;
  for (const auto& r : reports) {
    oracle::print(out, r);
    ok = ok && r.pass;
  }
  return ok;
}

}  // namespace mqcsim::cli
