#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Multiple-quantum coherence growth and localization simulator"};
  app.set_version_flag("--version", mqcsim::cli::kVersion);
  app.require_subcommand(1);

  mqcsim::cli::CommandOptions options;
  const char* descriptions[][2] = {
      {"lattice", "Write site and coupling tables"},
      {"grow", "Unperturbed cluster growth"},
      {"perturb", "Growth under the perturbed sequence, one curve per p"},
      {"echo", "Time-reversal echo decay"},
      {"equilibrium", "Evolution from prepared clusters, one curve per N0"},
      {"sweep", "Stationary cluster size against p"},
  };
  for (const auto& [name, text] : descriptions) {
    CLI::App* sub = app.add_subcommand(name, text);
    sub->add_option("config", options.config_path, "Config file")->required();
    sub->add_option("--set", options.overrides, "Override section.key=value")->take_all();
    sub->add_flag("-q,--quiet", options.quiet, "No progress on stderr");
  }
  app.add_subcommand("selftest", "Run the oracle equivalence checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* chosen = app.get_subcommands().front();
  try {
    if (chosen->get_name() == "selftest") return mqcsim::cli::selftest(std::cout) ? 0 : 4;
    mqcsim::cli::run_command(chosen->get_name(), options, std::cout, std::cerr);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return mqcsim::cli::exit_code_for(e);
  }
}
