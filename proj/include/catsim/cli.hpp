#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "catsim/protocols.hpp"

namespace catsim::cli {

enum class Scenario {
  amplify_ideal,
  amplify_finite,
  sweep_fidelity,
  detect,
  sweep_detect,
  cohere,
  lindblad,
  two_mode,
  mrfm,
  saturation,
};

enum class Format { csv, json };

std::string to_string(Scenario s);
std::string to_string(Format f);
std::string to_string(DurationConvention c);
std::string to_string(PulseAlignment a);

struct SweepSpec {
  std::string variable;
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  /// start + k step for k = 0, 1, ... while the value stays within stop (1e-9 relative slack).
  std::vector<double> values() const;
};

struct RunConfig {
  Scenario scenario = Scenario::amplify_ideal;
  SystemParams params;
  bool n_trunc_auto = true;

  int n_pulses = 12;
  /// Pulse counts compared by sweep-fidelity, one column each.
  std::vector<int> n_list{4, 8, 12};
  int m = 1;
  double lambda01 = 0.2;
  double lambda02 = 0.2;
  PulseAlignment alignment = PulseAlignment::centered;
  DurationConvention duration_convention = DurationConvention::calibrated_pi_over_eps_d;
  /// Detection input: the ideal cat or the uncorrelated |+> (x) |2 n alpha0>.
  std::string detect_input = "cat";
  int lindblad_samples = 9;
  long max_kicks = 100'000'000;

  std::string energy_unit = "omega0";
  double omega0_mhz = 100.0;
  std::optional<double> temperature_mk;

  std::optional<SweepSpec> sweep;
  std::optional<std::filesystem::path> output_path;
  Format format = Format::csv;
};

struct SweepResult {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  nlohmann::ordered_json metadata;
};

/// INI-style document with sections [scenario], [params], [sweep], [output].
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Checks everything a run could reject up front: grid, schedules, truncation, drive frequency.
void validate(const RunConfig& config);

/// Largest coherent amplitude the scenario reaches over its grid.
double alpha_max(const RunConfig& config);

/// Evaluates every grid point, up to `threads` at a time; rows stay in grid order.
SweepResult run(const RunConfig& config, int threads = 1);

std::string render(const SweepResult& result, Format format);
void emit(const SweepResult& result, Format format, const std::filesystem::path& path);

}  // namespace catsim::cli
