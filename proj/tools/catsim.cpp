#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "catsim/cli.hpp"

namespace {

int threads_from_env() {
  const char* env = std::getenv("CATSIM_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw catsim::ValidationError("CATSIM_THREADS", "must be a positive integer");
  return static_cast<int>(v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Qubit-oscillator cat-state amplification simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string format;
  int threads = 0;

  auto* run = app.add_subcommand("run", "Run the scenario described by a config file");
  run->add_option("--config", config_path, "Config file")->required();
  run->add_option("--out", out_path, "Output file (stdout when omitted)");
  run->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  run->add_option("--threads", threads, "Worker threads (default: CATSIM_THREADS or 1)")->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "Check a config file without running it");
  validate->add_option("--config", config_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  catsim::cli::RunConfig config;
  try {
    config = catsim::cli::load_config(config_path);
  } catch (const catsim::Error& e) {
    std::cerr << "catsim: config error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*validate) {
      std::cout << "ok: " << catsim::cli::to_string(config.scenario) << ", "
                << (config.sweep ? config.sweep->values().size() : 1) << " grid point(s), n_trunc "
                << config.params.n_trunc << "\n";
      return 0;
    }
    if (threads == 0) threads = threads_from_env();
    const auto fmt = format.empty() ? config.format
                                    : (format == "json" ? catsim::cli::Format::json : catsim::cli::Format::csv);
    const auto result = catsim::cli::run(config, threads);
    if (!out_path.empty())
      catsim::cli::emit(result, fmt, out_path);
    else if (config.output_path)
      catsim::cli::emit(result, fmt, *config.output_path);
    else
      std::cout << catsim::cli::render(result, fmt);
    return 0;
  } catch (const catsim::ConvergenceError& e) {
    std::cerr << "catsim: not converged: " << e.what() << "\n";
    return 3;
  } catch (const catsim::IoError& e) {
    std::cerr << "catsim: " << e.what() << "\n";
    return 1;
  } catch (const catsim::Error& e) {
    std::cerr << "catsim: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "catsim: " << e.what() << "\n";
    return 1;
  }
}
