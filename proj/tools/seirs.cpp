#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "seirs/cli.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  unsigned threads = 1;
  bool force_general = false;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "Experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", f.out, "Output directory (overrides output.dir)");
  sub->add_option("--threads", f.threads, "Worker threads for sweeps")->check(CLI::Range(1u, 1024u));
  sub->add_flag("--force-general-path", f.force_general, "Disable closed-form shortcuts");
}

int execute(seirs::cli::Command command, const Flags& f) {
  std::ifstream in(f.config, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();

  seirs::cli::ExperimentConfig cfg;
  try {
    cfg = seirs::cli::parse_config(buf.str());
  } catch (const seirs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  cfg.command = command;

  seirs::cli::RunOptions ro;
  if (!f.out.empty()) ro.out_dir = f.out;
  ro.threads = f.threads;
  ro.force_general_path = f.force_general;
  const auto result = seirs::cli::run(cfg, ro);
  if (result.exit_code != 0) {
    std::cerr << (result.exit_code == 2 ? "config error: " : "numerical failure: ") << result.message << '\n';
    return result.exit_code;
  }
  for (const auto& file : result.files) std::cout << file << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-autonomous SEIRS threshold toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", seirs::cli::kToolVersion);

  Flags flags;
  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "Integrate the model and write trajectory.csv"},
      {"thresholds", "Compute threshold functionals and write report.csv"},
      {"sweep", "Classify a parameter plane and write region.csv"},
      {"robustness", "Perturbation scan written to robustness.csv"},
      {"verify-incidence", "Check incidence hypotheses and write hypotheses.csv"},
  };
  for (const auto& [name, help] : commands) add_flags(app.add_subcommand(name, help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  for (const auto* sub : app.get_subcommands()) {
    return execute(*seirs::cli::parse_command(sub->get_name()), flags);
  }
  return 2;
}
