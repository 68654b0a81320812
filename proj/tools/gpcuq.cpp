// Command-line front end: gpcuq <solve|project|sparsify|pod|pipeline> [options]
//
// The worker count is taken from, in increasing priority: the configuration
// file, the GPCUQ_WORKERS environment variable, the --workers flag.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gpcuq/errors.hpp"
#include "gpcuq/io/config.hpp"
#include "gpcuq/io/runner.hpp"

namespace {

constexpr const char* kWorkersEnv = "GPCUQ_WORKERS";

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output;
  int workers = 0;
};

gpcuq::io::RunConfig resolve(const Options& opt) {
  using namespace gpcuq::io;
  RunConfig cfg = opt.config_path.empty() ? RunConfig{} : load_config(opt.config_path);
  for (const auto& o : opt.overrides) apply_override(cfg, o);
  if (const char* env = std::getenv(kWorkersEnv); env && *env) apply_setting(cfg, "run.workers", env);
  if (opt.workers > 0) cfg.workers = static_cast<unsigned>(opt.workers);
  if (!opt.output.empty()) cfg.output = opt.output;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polynomial-chaos collocation, sparsification and POD on a field-circuit rectifier"};
  app.require_subcommand(1, 1);
  Options opt;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"solve", "run the model at every cubature node (cached)"},
      {"project", "compute chaos coefficients from the node cache"},
      {"sparsify", "tolerance sweep of sparse index sets"},
      {"pod", "POD of the coefficient snapshots"},
      {"pipeline", "solve, project, sparsify and pod in sequence"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", opt.config_path, "configuration file")->check(CLI::ExistingFile);
    sub->add_option("-s,--set", opt.overrides, "override, e.g. --set chaos.degree=2")->take_all();
    sub->add_option("-o,--output", opt.output, "output directory");
    sub->add_option("-w,--workers", opt.workers, "worker threads for model solves")->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? gpcuq::io::kExitOk : gpcuq::io::kExitConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  gpcuq::io::RunConfig cfg;
  try {
    cfg = resolve(opt);
  } catch (const gpcuq::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return gpcuq::io::kExitConfig;
  }
  return gpcuq::io::run_subcommand(name, cfg, std::cout, std::cerr);
}
