// evanspot: classification sweeps, Evans profiles, Khas'minskii potentials and single
// obstacle solves from key=value configs. Output is CSV on stdout or --out.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evanspot/cli/commands.hpp"

namespace {

struct Common {
  std::string config;
  std::string out;
  std::optional<double> tol;
  std::optional<double> rmax;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "key=value config file")->check(CLI::ExistingFile);
  sub->add_option("--out", c.out, "write CSV here instead of stdout");
  sub->add_option("--tol", c.tol, "tolerance override");
  sub->add_option("--rmax", c.rmax, "outer radius override");
  sub->add_option("overrides", c.overrides, "trailing key=value overrides (last wins)");
}

int log_level() {
  const char* v = std::getenv("EVANSPOT_LOG");
  if (!v) return 0;
  const std::string s(v);
  if (s == "info" || s == "1") return 1;
  if (s == "debug" || s == "2") return 2;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace evanspot;
  CLI::App app{"Potential-theoretic classification and construction on model manifolds"};
  app.require_subcommand(1);
  Common common;
  using Runner = int (*)(const io::RunConfig&, std::ostream&, std::ostream&, const cli::Logger&);
  const std::pair<const char*, Runner> commands[] = {
      {"classify", cli::run_classify},
      {"evans", cli::run_evans},
      {"khasminskii", cli::run_khasminskii},
      {"obstacle", cli::run_obstacle},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, fn] : commands) {
    auto* sub = app.add_subcommand(name);
    add_common(sub, common);
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::exit_code::error;
  }

  io::RunConfig cfg;
  try {
    if (!common.config.empty()) cfg = io::RunConfig::from_file(common.config);
    if (common.tol) cfg.set("tol", io::fmt(*common.tol));
    if (common.rmax) cfg.set("rmax", io::fmt(*common.rmax));
    for (const auto& kv : common.overrides) cfg.apply_override(kv);
  } catch (const io::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::exit_code::error;
  }

  const cli::Logger log{log_level(), &std::cerr};
  std::ofstream file;
  if (!common.out.empty()) {
    file.open(common.out);
    if (!file) {
      std::cerr << "error: cannot open " << common.out << '\n';
      return cli::exit_code::error;
    }
  }
  std::ostream& out = common.out.empty() ? std::cout : file;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) return commands[i].second(cfg, out, std::cerr, log);
  }
  return cli::exit_code::error;
}
