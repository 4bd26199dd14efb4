#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <thread>

#include "cli_internal.hpp"

#ifndef CATSIM_VERSION
#define CATSIM_VERSION "0.0.0"
#endif

namespace catsim::cli {

namespace {

using detail::Point;

std::vector<std::string> observable_columns(const RunConfig& c) {
  switch (c.scenario) {
    case Scenario::amplify_ideal:
    case Scenario::amplify_finite:
      return {"amp_up_re", "amp_up_im", "amp_down_re", "amp_down_im", "fidelity", "qubit_entropy"};
    case Scenario::sweep_fidelity: {
      std::vector<std::string> cols;
      for (int n : c.n_list) cols.push_back("fidelity_n" + std::to_string(n));
      return cols;
    }
    case Scenario::detect:
    case Scenario::sweep_detect:
      return {"omega_d", "drive_duration", "p_plus", "p_minus", "analytic_p_plus", "analytic_p_minus"};
    case Scenario::cohere:
      return {"amplitude", "p_plus_coherent", "p_minus_coherent", "p_plus_mixture", "p_minus_mixture",
              "analytic_p_plus_coherent"};
    case Scenario::lindblad: return {"amplitude", "fitted_rate", "estimate_rate", "rate_ratio"};
    case Scenario::two_mode: return {"n1", "n2", "alpha1", "alpha2", "p_plus", "p_minus", "mode1_entropy_plus"};
    case Scenario::mrfm: return {"m", "amplitude", "resolution", "q_threshold", "n_s", "single_spin_resolvable"};
    case Scenario::saturation: return {"n_s_analytic", "n_s_simulated", "kicks", "saturated"};
  }
  return {};
}

std::vector<double> evaluate(const RunConfig& c, const Point& pt) {
  const SystemParams& p = pt.params;
  const int n = pt.n_pulses;
  switch (c.scenario) {
    case Scenario::amplify_ideal:
    case Scenario::amplify_finite: {
      const StateVector init = standard_initial_state(p);
      const AmplifyResult r = c.scenario == Scenario::amplify_ideal
                                  ? amplify_ideal(n, p, init)
                                  : amplify_finite(n, p.eps_perp_amp, p, init, c.alignment);
      const auto [up, down] = r.conditional_amplitudes;
      return {up.real(), up.imag(), down.real(), down.imag(), r.fidelity_vs_ideal, qubit_reduced(r.final_state).entropy};
    }
    case Scenario::sweep_fidelity: {
      std::vector<double> out;
      for (int k : c.n_list) out.push_back(amplify_finite(k, p.eps_perp_amp, p, standard_initial_state(p), c.alignment).fidelity_vs_ideal);
      return out;
    }
    case Scenario::detect:
    case Scenario::sweep_detect: {
      const StateVector input = c.detect_input == "cat"
                                    ? ideal_cat(n, p)
                                    : product_state(1.0, 1.0, coherent_state(2.0 * n * p.alpha0(), p.fock()));
      const DetectResult r = detect_spectroscopy(input, p, n, c.duration_convention);
      SystemParams drive = p;
      drive.omega_d = detection_frequency(p, n);
      return {drive.omega_d, detection_duration(drive, n, c.duration_convention), r.p_plus, r.p_minus,
              r.analytic_p_plus, r.analytic_p_minus};
    }
    case Scenario::cohere: {
      const StateVector cat = ideal_cat(n, p);
      const DetectResult coherent = coherence_probe(cat, p, n, true);
      const DetectResult mixture = coherence_probe(cat, p, n, false);
      return {2.0 * n * p.alpha0(), coherent.p_plus, coherent.p_minus, mixture.p_plus, mixture.p_minus,
              coherent.analytic_p_plus};
    }
    case Scenario::lindblad: {
      const CoherenceDecay d = cat_coherence_decay(n, p, c.lindblad_samples);
      return {d.amplitude, d.fitted_rate, d.estimate, d.fitted_rate / d.estimate};
    }
    case Scenario::two_mode: {
      const TwoModeResult r = two_mode_cat(n, c.lambda01, c.lambda02, p);
      return {double(r.n1), double(r.n2), r.alpha1.real(), r.alpha2.real(), r.p_plus, r.p_minus, r.mode1_entropy_plus};
    }
    case Scenario::mrfm: {
      const MrfmResult r = mrfm_amplitude(n, c.m, p);
      return {double(c.m), r.amplitude, r.resolution, r.q_threshold, r.n_s, r.single_spin_resolvable ? 1.0 : 0.0};
    }
    case Scenario::saturation: {
      const SaturationResult r = saturation(p, c.max_kicks);
      return {r.model.n_s, r.simulated_n_s, double(r.kicks), r.saturated ? 1.0 : 0.0};
    }
  }
  return {};
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

[[noreturn]] void rethrow_at(std::exception_ptr e, const std::string& where) {
  try {
    std::rethrow_exception(e);
  } catch (const ValidationError& x) {
    throw ValidationError(x.field(), where + ": " + x.what());
  } catch (const ConvergenceError& x) {
    throw ConvergenceError(where + ": " + x.what());
  } catch (const TruncationError& x) {
    throw TruncationError(where + ": " + x.what());
  } catch (const ScheduleOverlapError& x) {
    throw ScheduleOverlapError(where + ": " + x.what());
  } catch (const DimensionError& x) {
    throw DimensionError(where + ": " + x.what());
  } catch (const std::exception& x) {
    throw Error(where + ": " + x.what());
  }
}

nlohmann::ordered_json metadata(const RunConfig& c, const std::vector<std::string>& columns, std::size_t points) {
  nlohmann::ordered_json m;
  m["tool"] = "catsim";
  m["version"] = CATSIM_VERSION;
  m["scenario"] = to_string(c.scenario);
  const SystemParams& p = c.params;
  m["params"] = {{"omega0", p.omega0},
                 {"lambda0", p.lambda0},
                 {"alpha0", p.alpha0()},
                 {"eps_z", p.eps_z},
                 {"eps_perp", p.eps_perp_amp},
                 {"eps_d", p.eps_d},
                 {"omega_d", p.omega_d},
                 {"q_factor", p.q_factor},
                 {"temperature", p.temperature},
                 {"n_trunc", p.n_trunc},
                 {"n_trunc_auto", c.n_trunc_auto}};
  m["units"] = {{"energy_unit", c.energy_unit}, {"omega0_mhz", c.omega0_mhz}};
  m["units"]["temperature_mk"] = c.temperature_mk ? nlohmann::ordered_json(*c.temperature_mk) : nlohmann::ordered_json();
  m["options"] = {{"n_pulses", c.n_pulses},
                  {"n_list", c.n_list},
                  {"m", c.m},
                  {"lambda01", c.lambda01},
                  {"lambda02", c.lambda02},
                  {"alignment", to_string(c.alignment)},
                  {"duration_convention", to_string(c.duration_convention)},
                  {"input", c.detect_input},
                  {"samples", c.lindblad_samples},
                  {"max_kicks", c.max_kicks}};
  if (c.sweep)
    m["sweep"] = {{"variable", c.sweep->variable},
                  {"start", c.sweep->start},
                  {"stop", c.sweep->stop},
                  {"step", c.sweep->step},
                  {"points", points}};
  else
    m["sweep"] = nullptr;
  m["columns"] = columns;
  return m;
}

}  // namespace

SweepResult run(const RunConfig& config, int threads) {
  validate(config);
  const auto points = detail::grid(config);
  const std::string key = detail::key_column(config);

  std::vector<std::vector<double>> values(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        values[i] = evaluate(config, points[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t pool = std::min<std::size_t>(std::max(threads, 1), points.size());
  if (pool <= 1) {
    worker();
  } else {
    std::vector<std::jthread> workers;
    for (std::size_t t = 0; t < pool; ++t) workers.emplace_back(worker);
  }

  for (std::size_t i = 0; i < points.size(); ++i)
    if (errors[i]) rethrow_at(errors[i], "grid point " + key + "=" + format_number(points[i].key));

  SweepResult result;
  result.columns.push_back(key);
  for (auto& col : observable_columns(config)) result.columns.push_back(std::move(col));
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::vector<double> row{points[i].key};
    row.insert(row.end(), values[i].begin(), values[i].end());
    result.rows.push_back(std::move(row));
  }
  result.metadata = metadata(config, result.columns, points.size());
  return result;
}

std::string render(const SweepResult& result, Format format) {
  if (format == Format::csv) {
    std::string out;
    for (std::size_t j = 0; j < result.columns.size(); ++j) out += (j ? "," : "") + result.columns[j];
    out += '\n';
    for (const auto& row : result.rows) {
      for (std::size_t j = 0; j < row.size(); ++j) out += (j ? "," : "") + format_number(row[j]);
      out += '\n';
    }
    return out;
  }
  nlohmann::ordered_json doc;
  doc["metadata"] = result.metadata;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : result.rows) {
    nlohmann::ordered_json r;
    for (std::size_t j = 0; j < row.size(); ++j)
      r[result.columns[j]] = std::isfinite(row[j]) ? nlohmann::ordered_json(row[j]) : nlohmann::ordered_json();
    doc["rows"].push_back(std::move(r));
  }
  return doc.dump(2) + "\n";
}

void emit(const SweepResult& result, Format format, const std::filesystem::path& path) {
  const std::string text = render(result, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace catsim::cli
