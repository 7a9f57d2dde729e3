// jostctl <subcommand> <config> [--seed N]
// Worker threads come from JOST_THREADS.

#include "jost/cli/commands.hpp"

#include <CLI11.hpp>
#include <gsl/gsl_errno.h>

int main(int argc, char** argv) {
  // GSL failures surface as status codes checked by the library
  gsl_set_error_handler_off();

  CLI::App app{"Jost functions, phases and bound states from the Volterra scheme"};
  app.require_subcommand(1);
  std::string config;
  unsigned seed = 0;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"phase", "phase shifts on a real k grid, Volterra against the radial oracle"},
      {"jost-scan", "Jost function over a complex b rectangle"},
      {"bound-states", "bound-state roots from both methods"},
      {"amplitude", "Froissart-Gribov partial amplitudes against the half-off-shell OSJF"},
      {"kernel-dump", "Volterra kernel blocks on a u grid"},
      {"selftest", "invariant suite with measured errors"}};
  CLI::Option* seed_opt = nullptr;
  for (auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("config", config, "run configuration (key = value with [sections])")->required();
    auto* o = sub->add_option("--seed", seed, "seed of the fault-injection negative control");
    if (name == "selftest") seed_opt = o;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : jost::cli::ValidationFailure;
  }
  jost::cli::RunOptions opt;
  opt.threads = jost::cli::threads_from_env();
  if (seed_opt && seed_opt->count() > 0) opt.seed = seed;
  return jost::cli::run(app.get_subcommands().front()->get_name(), config, opt);
}
