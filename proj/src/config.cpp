#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "cli_internal.hpp"

namespace catsim::cli {

namespace {

struct Entry {
  std::string value;
  int line;
  int column;  // of the value
};

using Section = std::map<std::string, Entry>;
using Document = std::map<std::string, Section>;

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"scenario",
     {"name", "n_pulses", "n_list", "m", "lambda01", "lambda02", "alignment", "duration_convention", "input",
      "samples", "max_kicks"}},
    {"params",
     {"omega0", "lambda0", "eps_z", "eps_perp", "eps_d", "omega_d", "q_factor", "temperature", "temperature_mk",
      "energy_unit", "omega0_mhz", "n_trunc"}},
    {"sweep", {"variable", "start", "stop", "step"}},
    {"output", {"path", "format"}},
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

Document tokenize(std::string_view text) {
  Document doc;
  std::string current;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    std::string_view line = raw;
    if (const auto c = line.find_first_of("#;"); c != std::string_view::npos) line = line.substr(0, c);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    const int col = static_cast<int>(first) + 1;

    if (line[first] == '[') {
      const auto close = line.find(']', first);
      if (close == std::string_view::npos) throw ParseError(line_no, col, "unterminated section header");
      if (!trim(line.substr(close + 1)).empty())
        throw ParseError(line_no, static_cast<int>(close) + 2, "unexpected text after section header");
      current = trim(line.substr(first + 1, close - first - 1));
      if (!kKnownKeys.contains(current)) throw ParseError(line_no, col + 1, "unknown section [" + current + "]");
      if (doc.contains(current)) throw ParseError(line_no, col, "duplicate section [" + current + "]");
      doc[current];
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, col, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(line_no, static_cast<int>(eq) + 1, "missing key before '='");
    if (current.empty()) throw ParseError(line_no, col, "key '" + key + "' outside any section");
    const auto vstart = line.find_first_not_of(" \t", eq + 1);
    const int vcol = vstart == std::string_view::npos ? static_cast<int>(eq) + 2 : static_cast<int>(vstart) + 1;
    std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ParseError(line_no, vcol, "missing value for '" + key + "'");
    if (!kKnownKeys.at(current).contains(key)) throw ValidationError(current + "." + key, "unknown key");
    if (doc[current].contains(key)) throw ParseError(line_no, col, "duplicate key '" + key + "'");
    doc[current][key] = {std::move(value), line_no, vcol};
  }
  return doc;
}

double to_double(const std::string& field, const Entry& e) {
  const std::string& s = e.value;
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
    throw ValidationError(field, "not a number: '" + s + "'");
  return v;
}

long to_long(const std::string& field, const Entry& e) {
  const std::string& s = e.value;
  long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ValidationError(field, "not an integer: '" + s + "'");
  return v;
}

int to_int(const std::string& field, const Entry& e) {
  const long v = to_long(field, e);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw ValidationError(field, "out of range");
  return static_cast<int>(v);
}

Scenario parse_scenario(const Entry& e) {
  static const std::map<std::string, Scenario> names = {
      {"amplify-ideal", Scenario::amplify_ideal}, {"amplify-finite", Scenario::amplify_finite},
      {"sweep-fidelity", Scenario::sweep_fidelity}, {"detect", Scenario::detect},
      {"sweep-detect", Scenario::sweep_detect},   {"cohere", Scenario::cohere},
      {"lindblad", Scenario::lindblad},           {"two-mode", Scenario::two_mode},
      {"mrfm", Scenario::mrfm},                   {"saturation", Scenario::saturation},
  };
  const auto it = names.find(e.value);
  if (it == names.end()) throw ValidationError("scenario.name", "unknown scenario '" + e.value + "'");
  return it->second;
}

std::vector<std::string> allowed_sweep_variables(Scenario s) {
  switch (s) {
    case Scenario::amplify_ideal: return {"n_pulses", "lambda0"};
    case Scenario::amplify_finite: return {"eps_perp", "n_pulses", "lambda0"};
    case Scenario::sweep_fidelity: return {"eps_perp"};
    case Scenario::detect:
    case Scenario::sweep_detect: return {"eps_d", "eps_z", "n_pulses", "lambda0"};
    case Scenario::cohere:
    case Scenario::lindblad:
    case Scenario::mrfm: return {"n_pulses", "lambda0"};
    case Scenario::two_mode: return {"n_pulses"};
    case Scenario::saturation: return {"lambda0"};
  }
  return {};
}

bool is_energy(const std::string& variable) { return variable != "n_pulses"; }

int round_up(int value, int multiple) { return (value + multiple - 1) / multiple * multiple; }

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::amplify_ideal: return "amplify-ideal";
    case Scenario::amplify_finite: return "amplify-finite";
    case Scenario::sweep_fidelity: return "sweep-fidelity";
    case Scenario::detect: return "detect";
    case Scenario::sweep_detect: return "sweep-detect";
    case Scenario::cohere: return "cohere";
    case Scenario::lindblad: return "lindblad";
    case Scenario::two_mode: return "two-mode";
    case Scenario::mrfm: return "mrfm";
    case Scenario::saturation: return "saturation";
  }
  return "?";
}

std::string to_string(Format f) { return f == Format::csv ? "csv" : "json"; }

std::string to_string(DurationConvention c) {
  return c == DurationConvention::calibrated_pi_over_eps_d ? "calibrated-pi-over-epsd" : "pi-over-omegad";
}

std::string to_string(PulseAlignment a) { return a == PulseAlignment::centered ? "centered" : "leading"; }

std::vector<double> SweepSpec::values() const {
  std::vector<double> out;
  const double slack = 1e-9 * std::max(1.0, std::abs(stop));
  for (long k = 0;; ++k) {
    const double v = start + static_cast<double>(k) * step;
    if (v > stop + slack) break;
    out.push_back(v);
  }
  return out;
}

RunConfig parse_config(std::string_view text) {
  const Document doc = tokenize(text);
  RunConfig c;

  const auto section = [&](const std::string& name) -> const Section& {
    static const Section empty;
    const auto it = doc.find(name);
    return it == doc.end() ? empty : it->second;
  };
  const auto get = [](const Section& s, const std::string& key) -> const Entry* {
    const auto it = s.find(key);
    return it == s.end() ? nullptr : &it->second;
  };

  const Section& sc = section("scenario");
  const Entry* name = get(sc, "name");
  if (!name) throw ValidationError("scenario.name", "required");
  c.scenario = parse_scenario(*name);
  if (const Entry* e = get(sc, "n_pulses")) c.n_pulses = to_int("scenario.n_pulses", *e);
  if (const Entry* e = get(sc, "n_list")) {
    c.n_list.clear();
    std::stringstream ss(e->value);
    std::string item;
    while (std::getline(ss, item, ',')) c.n_list.push_back(to_int("scenario.n_list", {trim(item), e->line, e->column}));
    if (c.n_list.empty()) throw ValidationError("scenario.n_list", "empty list");
  }
  if (const Entry* e = get(sc, "m")) c.m = to_int("scenario.m", *e);
  if (const Entry* e = get(sc, "lambda01")) c.lambda01 = to_double("scenario.lambda01", *e);
  if (const Entry* e = get(sc, "lambda02")) c.lambda02 = to_double("scenario.lambda02", *e);
  if (const Entry* e = get(sc, "alignment")) {
    if (e->value == "centered") c.alignment = PulseAlignment::centered;
    else if (e->value == "leading") c.alignment = PulseAlignment::leading;
    else throw ValidationError("scenario.alignment", "expected centered or leading");
  }
  if (const Entry* e = get(sc, "duration_convention")) {
    if (e->value == "calibrated-pi-over-epsd") c.duration_convention = DurationConvention::calibrated_pi_over_eps_d;
    else if (e->value == "pi-over-omegad" || e->value == "paper-pi-over-omegad") c.duration_convention = DurationConvention::pi_over_omega_d;
    else throw ValidationError("scenario.duration_convention", "expected calibrated-pi-over-epsd or pi-over-omegad");
  }
  if (const Entry* e = get(sc, "input")) {
    if (e->value != "cat" && e->value != "uncorrelated") throw ValidationError("scenario.input", "expected cat or uncorrelated");
    c.detect_input = e->value;
  }
  if (const Entry* e = get(sc, "samples")) c.lindblad_samples = to_int("scenario.samples", *e);
  if (const Entry* e = get(sc, "max_kicks")) c.max_kicks = to_long("scenario.max_kicks", *e);

  const Section& pr = section("params");
  if (const Entry* e = get(pr, "energy_unit")) {
    if (e->value != "omega0" && e->value != "mhz") throw ValidationError("params.energy_unit", "expected omega0 or mhz");
    c.energy_unit = e->value;
  }
  if (const Entry* e = get(pr, "omega0_mhz")) c.omega0_mhz = to_double("params.omega0_mhz", *e);
  if (!(c.omega0_mhz > 0.0) || !std::isfinite(c.omega0_mhz)) throw ValidationError("params.omega0_mhz", "must be > 0");
  const bool mhz = c.energy_unit == "mhz";
  const double unit = mhz ? 1.0 / c.omega0_mhz : 1.0;

  SystemParams& p = c.params;
  if (const Entry* e = get(pr, "omega0")) {
    if (mhz) throw ValidationError("params.omega0", "set omega0_mhz instead when energy_unit = mhz");
    p.omega0 = to_double("params.omega0", *e);
  }
  if (const Entry* e = get(pr, "lambda0")) p.lambda0 = unit * to_double("params.lambda0", *e);
  if (const Entry* e = get(pr, "eps_z")) p.eps_z = unit * to_double("params.eps_z", *e);
  if (const Entry* e = get(pr, "eps_perp")) p.eps_perp_amp = unit * to_double("params.eps_perp", *e);
  if (const Entry* e = get(pr, "eps_d")) p.eps_d = unit * to_double("params.eps_d", *e);
  if (const Entry* e = get(pr, "omega_d")) p.omega_d = unit * to_double("params.omega_d", *e);
  if (const Entry* e = get(pr, "q_factor")) p.q_factor = to_double("params.q_factor", *e);
  const Entry* t_energy = get(pr, "temperature");
  const Entry* t_mk = get(pr, "temperature_mk");
  if (t_energy && t_mk) throw ValidationError("params.temperature", "give either temperature or temperature_mk");
  if (t_energy) p.temperature = unit * to_double("params.temperature", *t_energy);
  if (t_mk) {
    c.temperature_mk = to_double("params.temperature_mk", *t_mk);
    if (*c.temperature_mk < 0.0) throw ValidationError("params.temperature_mk", "must be >= 0");
    p.temperature = units::kbt_mhz(*c.temperature_mk) / c.omega0_mhz;
  }
  if (mhz) {
    c.lambda01 *= unit;
    c.lambda02 *= unit;
  }

  const Section& sw = section("sweep");
  if (!sw.empty()) {
    SweepSpec s;
    const Entry* var = get(sw, "variable");
    if (!var) throw ValidationError("sweep.variable", "required");
    s.variable = var->value;
    for (const char* key : {"start", "stop", "step"}) {
      const Entry* e = get(sw, key);
      if (!e) throw ValidationError(std::string("sweep.") + key, "required");
      const double v = to_double(std::string("sweep.") + key, *e);
      (std::string(key) == "start" ? s.start : std::string(key) == "stop" ? s.stop : s.step) = v;
    }
    if (mhz && is_energy(s.variable)) {
      s.start *= unit;
      s.stop *= unit;
      s.step *= unit;
    }
    c.sweep = s;
  } else if (c.scenario == Scenario::sweep_fidelity) {
    c.sweep = SweepSpec{"eps_perp", 10.0, 120.0, 10.0};
  } else if (c.scenario == Scenario::sweep_detect) {
    c.sweep = SweepSpec{"eps_d", 0.5, 10.5, 0.25};
  }

  const Section& out = section("output");
  if (const Entry* e = get(out, "path")) c.output_path = e->value;
  if (const Entry* e = get(out, "format")) {
    if (e->value == "csv") c.format = Format::csv;
    else if (e->value == "json") c.format = Format::json;
    else throw ValidationError("output.format", "expected csv or json");
  }

  // Structural checks that the truncation choice depends on.
  if (c.sweep) {
    const auto allowed = allowed_sweep_variables(c.scenario);
    if (std::find(allowed.begin(), allowed.end(), c.sweep->variable) == allowed.end()) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw ValidationError("sweep.variable", "'" + c.sweep->variable + "' cannot be swept in " +
                                                  to_string(c.scenario) + " (allowed: " + list + ")");
    }
    if (!(c.sweep->step > 0.0)) throw ValidationError("sweep.step", "must be > 0");
    if (c.sweep->start > c.sweep->stop) throw ValidationError("sweep.start", "must not exceed sweep.stop");
    if ((c.sweep->stop - c.sweep->start) / c.sweep->step > 1e5) throw ValidationError("sweep.step", "grid exceeds 100000 points");
    if (c.sweep->variable == "n_pulses") {
      for (double v : c.sweep->values())
        if (v != std::round(v) || v < 0.0) throw ValidationError("sweep", "n_pulses grid must hold non-negative integers");
    }
  }
  if (c.n_pulses < 0) throw ValidationError("scenario.n_pulses", "must be >= 0");
  for (int n : c.n_list)
    if (n < 0) throw ValidationError("scenario.n_list", "entries must be >= 0");

  if (const Entry* e = get(pr, "n_trunc"); e && e->value != "auto") {
    c.n_trunc_auto = false;
    p.n_trunc = to_int("params.n_trunc", *e);
  } else {
    const int need = truncation_requirement(alpha_max(c));
    p.n_trunc = std::max(64, round_up(need, 16));
  }

  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace detail {

std::string key_column(const RunConfig& config) {
  if (config.sweep) return config.sweep->variable;
  switch (config.scenario) {
    case Scenario::sweep_fidelity: return "eps_perp";
    case Scenario::detect:
    case Scenario::sweep_detect: return "eps_d";
    case Scenario::saturation: return "q_factor";
    default: return "n_pulses";
  }
}

std::vector<Point> grid(const RunConfig& config) {
  const auto point = [&](const SystemParams& p, int n) {
    const std::string key = key_column(config);
    double k = n;
    if (key == "eps_perp") k = p.eps_perp_amp;
    else if (key == "eps_d") k = p.eps_d;
    else if (key == "eps_z") k = p.eps_z;
    else if (key == "lambda0") k = p.lambda0;
    else if (key == "q_factor") k = p.q_factor;
    return Point{p, n, k};
  };
  if (!config.sweep) return {point(config.params, config.n_pulses)};
  std::vector<Point> out;
  for (double v : config.sweep->values()) {
    SystemParams p = config.params;
    int n = config.n_pulses;
    const std::string& var = config.sweep->variable;
    if (var == "eps_perp") p.eps_perp_amp = v;
    else if (var == "eps_d") p.eps_d = v;
    else if (var == "eps_z") p.eps_z = v;
    else if (var == "lambda0") p.lambda0 = v;
    else if (var == "n_pulses") n = static_cast<int>(std::lround(v));
    out.push_back(point(p, n));
  }
  return out;
}

}  // namespace detail

double alpha_max(const RunConfig& config) {
  double a = 0.0;
  for (const auto& pt : detail::grid(config)) {
    const double a0 = std::abs(pt.params.alpha0());
    switch (config.scenario) {
      case Scenario::amplify_ideal:
      case Scenario::amplify_finite:
      case Scenario::detect:
      case Scenario::sweep_detect:
      case Scenario::lindblad: a = std::max(a, 2.0 * pt.n_pulses * a0); break;
      case Scenario::sweep_fidelity:
        for (int n : config.n_list) a = std::max(a, 2.0 * n * a0);
        break;
      case Scenario::cohere: a = std::max(a, 4.0 * pt.n_pulses * a0); break;
      case Scenario::two_mode:
      case Scenario::mrfm:
      case Scenario::saturation: break;
    }
  }
  return a;
}

void validate(const RunConfig& c) {
  const auto points = detail::grid(c);
  for (const auto& pt : points) {
    const SystemParams& p = pt.params;
    p.validate();
    switch (c.scenario) {
      case Scenario::amplify_finite:
      case Scenario::sweep_fidelity:
        if (!(p.eps_perp_amp > 0.0)) throw ValidationError("eps_perp", "must be > 0");
        if (std::numbers::pi / p.eps_perp_amp >= p.tau0())
          throw ValidationError("eps_perp", "pulse length pi/eps_perp must be shorter than the half period pi/omega0");
        break;
      case Scenario::detect:
      case Scenario::sweep_detect:
        if (!(p.eps_d > 0.0)) throw ValidationError("eps_d", "must be > 0");
        if (!(p.eps_z - 4.0 * pt.n_pulses * p.alpha0() * p.lambda0 > 0.0))
          throw ValidationError("eps_z", "must exceed 4 n alpha0 lambda0 so the drive frequency is positive");
        break;
      case Scenario::lindblad:
        if (pt.n_pulses < 1) throw ValidationError("n_pulses", "must be >= 1");
        if (!std::isfinite(p.q_factor)) throw ValidationError("q_factor", "must be finite for damping");
        if (!(p.lambda0 > 0.0)) throw ValidationError("lambda0", "must be > 0");
        if (p.n_trunc > kMaxDensityDim) throw ValidationError("n_trunc", "exceeds the density-matrix limit " + std::to_string(kMaxDensityDim));
        break;
      case Scenario::two_mode: {
        const int n1 = std::max(2, truncation_requirement(pt.n_pulses * c.lambda01 / p.omega0));
        const int n2 = std::max(2, truncation_requirement(pt.n_pulses * c.lambda02 / p.omega0));
        if (2L * n1 * n2 > kMaxTwoModeDim)
          throw ValidationError("n_pulses", "two-mode joint dimension " + std::to_string(2L * n1 * n2) + " exceeds " +
                                                std::to_string(kMaxTwoModeDim));
        break;
      }
      case Scenario::mrfm:
        if (pt.n_pulses < 1) throw ValidationError("n_pulses", "must be >= 1");
        if (c.m < 1) throw ValidationError("m", "must be >= 1");
        break;
      case Scenario::saturation:
        if (!(p.lambda0 > 0.0)) throw ValidationError("lambda0", "must be > 0");
        if (c.max_kicks < 1) throw ValidationError("max_kicks", "must be >= 1");
        break;
      default: break;
    }
  }
  if (c.scenario == Scenario::lindblad && c.lindblad_samples < 3) throw ValidationError("samples", "must be >= 3");
  const double a = alpha_max(c);
  if (c.params.n_trunc < truncation_requirement(a))
    throw ValidationError("n_trunc", std::to_string(c.params.n_trunc) + " is below the " +
                                         std::to_string(truncation_requirement(a)) + " required for amplitude " +
                                         std::to_string(a));
}

}  // namespace catsim::cli
