// kdiflow: knowledge dispersion index and organizational flow analysis.
//
//   kdiflow <command> [--network PATH] [--metrics PATH] [--scenario PATH]
//           [--threshold F] [--quota F] [--capacity-factor F]
//           [--micro-weight F] [--seed N] [--out PATH] ...
//
// Reports go to stdout (or --out) as canonical JSON. Failures print a JSON
// object with code, message and hint, and exit with the status listed in
// --help.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <unistd.h>

#include "CLI11.hpp"
#include "kdiflow/report.hpp"

namespace {

bool use_color() {
  return std::getenv("KDIFLOW_NO_COLOR") == nullptr && ::isatty(STDERR_FILENO) != 0;
}

void status_line(bool ok, const std::string& text) {
  if (use_color()) {
    std::cerr << (ok ? "\033[32m" : "\033[31m") << text << "\033[0m\n";
  } else {
    std::cerr << text << '\n';
  }
}

int fail(const kdiflow::RunError& error) {
  std::cout << kdiflow::emit_error(error);
  status_line(false, std::string(kdiflow::to_string(error.kind())) + ": " + error.what());
  return kdiflow::exit_code(error.kind());
}

}  // namespace

int main(int argc, char** argv) {
  using kdiflow::RunError;
  using kdiflow::RunErrorKind;

  CLI::App app{"Knowledge dispersion index and organizational flow analysis"};
  app.footer(
      "Commands: validate, maxflow, kdi, simulate-onboard, simulate-damage,\n"
      "          simulate-dispersion, report\n"
      "Exit status: 0 success, 2 ConfigError, 3 IoError, 4 SchemaError,\n"
      "             5 DomainError (inputs valid but the analysis does not apply)\n"
      "Set KDIFLOW_NO_COLOR to disable ANSI colors on stderr.");

  std::string command;
  kdiflow::RunConfig config;
  auto& p = config.parameters;
  std::string out_path;

  app.add_option("command", command, "Command to run")->required();
  app.add_option("--network", config.network_path, "Network JSON file");
  app.add_option("--metrics", config.metrics_path, "Metrics CSV file");
  app.add_option("--scenario", config.scenario_path, "Dispersion scenario JSON file");
  app.add_option("--threshold", p.threshold, "Stress threshold in (0,1] (default 0.9)");
  app.add_option("--quota", p.quota, "Overload quota in (0,1] (default 0.2)");
  app.add_option("--capacity-factor", p.capacity_factor, "Overload capacity factor (default 1.5)");
  app.add_option("--micro-weight", p.micro_weight, "Composite micro weight in [0,1] (default 0.5)");
  app.add_option("--seed", p.seed, "Seed echoed into the report (default 0)");
  app.add_option("--level", p.level, "Hierarchy level to onboard at");
  app.add_option("--new-nodes", p.new_nodes, "Pseudo nodes to onboard (default 1)");
  app.add_option("--magnitude", p.magnitude, "Perturbation or attack magnitude");
  app.add_option("--attack-entry", p.attack_entry, "Node where an attack enters");
  app.add_option("--protected-clearance", p.protected_clearance,
                 "Clearance at or above which nodes are protected (default 0)");
  app.add_option("--objective", p.objective, "Interest tag used to pick a region");
  app.add_option("--out", out_path, "Write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(RunError(RunErrorKind::Config, e.what(), "run kdiflow --help"));
  }

  const auto parsed = kdiflow::parse_command(command);
  if (!parsed) {
    return fail(RunError(RunErrorKind::Config, "unknown command '" + command + "'",
                         "run kdiflow --help for the command list"));
  }
  config.command = *parsed;

  try {
    const std::string text = kdiflow::emit_report(kdiflow::run(config));
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!(out << text)) {
        throw RunError(RunErrorKind::Io, "cannot write '" + out_path + "'",
                       "check that the directory exists and is writable");
      }
    }
    status_line(true, "ok: " + command);
    return 0;
  } catch (const RunError& e) {
    return fail(e);
  } catch (const std::exception& e) {
    return fail(RunError(RunErrorKind::Domain, e.what(), "unexpected failure"));
  }
}
