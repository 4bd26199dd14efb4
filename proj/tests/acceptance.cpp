// Acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero if any fail.
//   acceptance                 all criteria
//   acceptance --criterion N   just criterion N (repeatable)

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "catsim/cli.hpp"
#include "oracles.hpp"

using namespace catsim;

namespace {

struct Value {
  std::string name;
  double value;
  /// How far the value may move under a truncation change.
  double tolerance;
};

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<Value> values;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& text) { detail += (detail.empty() ? "" : "; ") + text; }
};

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

SystemParams defaults(int n_trunc) {
  SystemParams p;
  p.n_trunc = n_trunc;
  return p;
}

std::vector<double> grid(double start, double stop, double step) {
  std::vector<double> g;
  const long n = std::lround((stop - start) / step);
  for (long i = 0; i <= n; ++i) g.push_back(start + i * step);
  return g;
}

// 1. Fidelity against pulse amplitude.
Outcome fidelity_curves(int n_trunc) {
  Outcome o;
  const SystemParams p = defaults(n_trunc);
  const auto init = standard_initial_state(p);
  const auto eps = grid(10, 120, 10);
  const std::vector<int> ns{4, 8, 12};
  std::map<int, std::vector<double>> f;
  for (int n : ns)
    for (double e : eps) f[n].push_back(amplify_finite(n, e, p, init).fidelity_vs_ideal);

  const double low = f[12][0], high = f[12][5];
  o.values = {{"f(10,12)", low, 0.05}, {"f(60,12)", high, 0.005}};
  o.note("f(eps=10,n=12)=" + fmt(low) + " f(eps=60,n=12)=" + fmt(high));
  o.require(std::abs(low - 0.70) <= 0.05, "f(10,12) within 0.70 +- 0.05");
  o.require(high > 0.99, "f(60,12) > 0.99");
  for (int n : ns)
    for (std::size_t i = 1; i < eps.size(); ++i)
      o.require(f[n][i] >= f[n][i - 1], "non-decreasing in eps_perp for n=" + std::to_string(n));
  for (std::size_t i = 0; i < eps.size(); ++i)
    o.require(f[4][i] >= f[8][i] && f[8][i] >= f[12][i], "non-increasing in n at eps_perp=" + fmt(eps[i]));

  // For reference only: pulses starting at k tau0 instead of centred on it.
  const double lead_low = amplify_finite(12, 10, p, init, PulseAlignment::leading).fidelity_vs_ideal;
  const double lead_high = amplify_finite(12, 60, p, init, PulseAlignment::leading).fidelity_vs_ideal;
  o.note("leading-edge pulses give f(10,12)=" + fmt(lead_low) + " f(60,12)=" + fmt(lead_high));
  return o;
}

// 2. Detection probability against drive amplitude.
Outcome detection_curves(int n_trunc) {
  Outcome o;
  const auto eps_d = grid(0.5, 10.5, 0.25);
  const auto curve = [&](double eps_z) {
    std::vector<double> pm;
    for (double e : eps_d) {
      SystemParams p = defaults(n_trunc);
      p.eps_z = eps_z;
      p.eps_d = e;
      pm.push_back(detect_spectroscopy(ideal_cat(12, p), p, 12).p_minus);
    }
    return pm;
  };

  const auto c4 = curve(4.0);
  std::size_t best = 0;
  for (std::size_t i = 1; i + 1 < c4.size(); ++i)
    if (c4[i] > c4[i - 1] && c4[i] > c4[i + 1] && (best == 0 || c4[i] > c4[best])) best = i;
  const double global = *std::max_element(c4.begin(), c4.end());
  o.require(best != 0, "an interior maximum exists at eps_z=4.0");
  if (best != 0) {
    o.note("eps_z=4.0 peak p-=" + fmt(c4[best]) + " at eps_d=" + fmt(eps_d[best]));
    o.values.push_back({"peak p-", c4[best], 0.05});
    o.values.push_back({"peak eps_d", eps_d[best], 0.5});
    o.require(c4[best] == global, "interior maximum is the curve maximum");
    o.require(std::abs(c4[best] - 0.80) <= 0.05, "peak p- within 0.80 +- 0.05");
    o.require(std::abs(eps_d[best] - 1.9) <= 0.5, "peak at eps_d within 1.9 +- 0.5");
  }
  o.note("p-(10.5)=" + fmt(c4.back()));
  o.values.push_back({"p-(10.5)", c4.back(), 0.1});
  o.require(std::abs(c4.back() - 0.5) <= 0.1, "p-(10.5) within 0.5 +- 0.1");

  const auto c32 = curve(3.2);
  int extrema = 0;
  for (std::size_t i = 1; i + 1 < c32.size(); ++i)
    if ((c32[i] > c32[i - 1] && c32[i] > c32[i + 1]) || (c32[i] < c32[i - 1] && c32[i] < c32[i + 1])) ++extrema;
  o.note("eps_z=3.2 has " + std::to_string(extrema) + " interior extrema");
  o.require(extrema >= 2, "at least two interior extrema at eps_z=3.2");
  return o;
}

// 3. Composed flips against the closed-form displacement.
Outcome operator_identity(int n_trunc) {
  Outcome o;
  const SystemParams p = defaults(n_trunc);
  double worst = 0.0;
  for (int n : {1, 2, 3, 4, 5, 6}) {
    const double d = flip_identity_deviation(n, p);
    worst = std::max(worst, d);
    o.require(d < 1e-8, "deviation < 1e-8 at n=" + std::to_string(n));
  }
  o.values.push_back({"max deviation", worst, 1e-8});
  o.note("max interior deviation over n=1..6: " + fmt(worst, 3));
  return o;
}

// 4. Conditional amplitudes and their linear growth.
Outcome amplitudes(int n_trunc) {
  Outcome o;
  const SystemParams p = defaults(n_trunc);
  const auto init = standard_initial_state(p);
  std::vector<double> ns, ys;
  double worst = 0.0;
  for (int n = 2; n <= 12; ++n) {
    const auto [up, down] = amplify_ideal(n, p, init).conditional_amplitudes;
    const double target = 2 * n * p.alpha0();
    worst = std::max({worst, std::abs(up + target), std::abs(down - target)});
    ns.push_back(n);
    ys.push_back(down.real());
  }
  const double mn = std::accumulate(ns.begin(), ns.end(), 0.0) / ns.size();
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    sxy += (ns[i] - mn) * (ys[i] - my);
    sxx += (ns[i] - mn) * (ns[i] - mn);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mn;
  o.values = {{"slope", slope, 1e-8}, {"worst amplitude error", worst, 1e-6}};
  o.note("worst |<a> -+ 2 n alpha0|=" + fmt(worst, 3) + " slope=" + fmt(slope, 12) + " intercept=" + fmt(intercept, 3));
  o.require(worst < 1e-6, "amplitudes within 1e-6");
  o.require(std::abs(slope - 2 * p.alpha0()) < 1e-8, "slope 2 alpha0 within 1e-8");
  o.require(std::abs(intercept) < 1e-8, "zero intercept within 1e-8");
  return o;
}

// 5. Driven qubit against the closed-form detection amplitudes.
Outcome detection_oracle(int n_trunc) {
  Outcome o;
  // Resonator frozen: no coupling, the branch shift 4 n alpha0 lambda0 = 0.96 folded into the bias, and a
  // bias large enough that the rotating-wave picture behind the closed form holds.
  const double shift = 8 * 12 * 0.1 * 0.2;
  const double bias = 400.0;
  const int dim = std::max(2, n_trunc / 32);
  double worst = 0.0;
  for (double e : {0.5, 1.0, 1.92, 4.0, 8.0}) {
    SystemParams p = defaults(dim);
    p.lambda0 = 0.0;
    p.eps_z = bias + shift / 2;
    p.omega_d = bias - shift / 2;
    p.eps_d = e;
    const auto out = propagate_driven(p, 0.0, std::numbers::pi / e, StateVector::basis(2 * dim, 0));
    const double flip = std::norm(out[dim]);
    const auto c = detection_coefficients(e, shift);
    const double d = std::max(std::abs(flip - std::norm(c.c_up)), std::abs((1 - flip) - std::norm(c.c_down)));
    worst = std::max(worst, d);
    o.require(d <= 0.03, "|c|^2 within 0.03 at eps_d=" + fmt(e));
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(1e-3, 20.0);
  double norm_err = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const auto c = detection_coefficients(u(rng), u(rng));
    norm_err = std::max(norm_err, std::abs(std::norm(c.c_up) + std::norm(c.c_down) - 1));
  }
  o.require(norm_err < 1e-12, "normalization within 1e-12");
  o.values.push_back({"worst |c|^2 error", worst, 0.03});
  o.note("worst |c|^2 deviation " + fmt(worst, 3) + ", normalization error " + fmt(norm_err, 3));
  return o;
}

// 6. Coherence probe.
Outcome coherence(int n_trunc) {
  Outcome o;
  // The probe reaches 4 n alpha0 = 4.8, which needs more than 64 levels.
  const SystemParams p = defaults(std::max(n_trunc, 96));
  const auto cat = ideal_cat(12, p);
  const auto c = coherence_probe(cat, p, 12, true);
  const auto m = coherence_probe(cat, p, 12, false);
  o.values = {{"p+ coherent", c.p_plus, 1e-4}, {"p+ mixture", m.p_plus, 1e-12}};
  o.note("n_trunc=" + std::to_string(p.n_trunc) + " coherent p+=" + fmt(c.p_plus, 10) + " p-=" + fmt(c.p_minus, 10) +
         ", mixture p+=" + fmt(m.p_plus, 15));
  o.require(std::abs(c.p_plus - 0.75) <= 1e-4 && std::abs(c.p_minus - 0.25) <= 1e-4, "coherent 3/4, 1/4");
  o.require(std::abs(m.p_plus - 0.5) < 1e-12 && std::abs(m.p_minus - 0.5) < 1e-12, "mixture 1/2, 1/2");
  return o;
}

// 7. Qubit-oscillator entanglement.
Outcome entanglement(int n_trunc) {
  Outcome o;
  const SystemParams p = defaults(n_trunc);
  const auto init = standard_initial_state(p);
  double worst = 0.0, s12 = 0.0;
  for (int n = 2; n <= 12; n += 2) {
    const double a = 2 * n * p.alpha0();
    const double s = qubit_reduced(amplify_ideal(n, p, init).final_state).entropy;
    worst = std::max(worst, std::abs(s - oracle::qubit_entropy(std::exp(-2 * a * a))));
    if (n == 12) s12 = s;
  }
  o.values = {{"entropy error", worst, 1e-8}, {"entropy n=12", s12, 1e-6}};
  o.note("worst closed-form error " + fmt(worst, 3) + ", S(n=12) - ln 2 = " + fmt(s12 - std::log(2.0), 3));
  o.require(worst < 1e-8, "closed form within 1e-8");
  o.require(std::abs(s12 - std::log(2.0)) < 1e-6, "ln 2 within 1e-6 at 2 n alpha0 = 2.4");
  return o;
}

// 8. Damping.
Outcome damping(int) {
  Outcome o;
  {
    const FockSpace s(40);
    const auto ops = ladder_ops(s);
    const auto h = OperatorMatrix::hermitian(ops.number.entries() + 0.1 * (ops.lower.entries() + ops.raise.entries()));
    const auto psi = StateVector::normalized(coherent_state(2.0, s).amplitudes() + coherent_state(-2.0, s).amplitudes());
    const auto rho = lindblad_evolve(h, BathParams{0.0, 0.0}, DensityMatrix::pure(psi), std::numbers::pi);
    const double d = (rho.entries() - DensityMatrix::pure(propagate_static(h, std::numbers::pi, psi)).entries()).cwiseAbs().maxCoeff();
    o.note("undamped deviation " + fmt(d, 3));
    o.require(d < 1e-8, "undamped limit within 1e-8");
  }
  {
    const FockSpace s(32);
    const auto ops = ladder_ops(s);
    const double gamma = 0.01;
    auto rho = DensityMatrix::pure(coherent_state(1.0, s));
    double worst = 0.0;
    for (int k = 1; k <= 4; ++k) {
      rho = lindblad_evolve(ops.number, BathParams{gamma, 0.0}, rho, 5.0);
      const double t = 5.0 * k;
      worst = std::max(worst, std::abs(rho.expectation(ops.lower.entries()) - std::exp(-0.5 * gamma * t) * std::exp(cplx(0, -t))));
    }
    o.note("damped <a> deviation " + fmt(worst, 3));
    o.require(worst < 1e-6, "damped coherent amplitude within 1e-6");
  }
  // omega0 = 100 MHz, T = 20 mK, Q = 1e4.
  SystemParams p = defaults(64);
  p.q_factor = 1e4;
  p.temperature = units::kbt_mhz(20.0) / 100.0;
  const auto d2 = cat_coherence_decay(10, p);
  const auto d3 = cat_coherence_decay(15, p);
  const double r2 = d2.fitted_rate / d2.estimate, r3 = d3.fitted_rate / d3.estimate;
  const double scaling = d3.fitted_rate / d2.fitted_rate;
  // Master-equation rate for a two-component cat, which keeps the vacuum term and the factor 2.
  const BathParams bath = BathParams::from_system(p);
  const double theory = 2 * bath.gamma * (2 * bath.nbar + 1) * 4.0;
  o.note("fitted/(2 gamma (2 nbar + 1) A^2) = " + fmt(d2.fitted_rate / theory, 4) + " (A=2)");
  o.note("fitted/estimate = " + fmt(r2, 4) + " (A=2), " + fmt(r3, 4) + " (A=3); rate ratio " + fmt(scaling, 4) +
         " vs 2.25");
  o.require(r2 >= 0.5 && r2 <= 2.0 && r3 >= 0.5 && r3 <= 2.0, "fitted rate within a factor of 2 of (2 n alpha0)^2 k_B T / Q");
  o.require(std::abs(scaling / 2.25 - 1) <= 0.2, "rate ratio within 20% of the amplitude-squared ratio");
  return o;
}

// 9. Saturation.
Outcome saturation_limit(int) {
  Outcome o;
  SystemParams p = defaults(64);
  p.q_factor = 1e4;
  const double ns = saturation(p, 1).model.n_s;
  o.require(std::abs(ns - 6366) <= 1, "2Q/pi = 6366 +- 1 at Q=1e4");
  o.note("n_s(1e4)=" + fmt(ns, 8));
  for (double q : {1e2, 1e3}) {
    p.q_factor = q;
    const auto r = saturation(p);
    const double rel = r.simulated_n_s / r.model.n_s - 1;
    o.note("Q=" + fmt(q) + " simulated " + fmt(r.simulated_n_s) + " vs " + fmt(r.model.n_s));
    o.require(r.saturated && std::abs(rel) <= 0.1, "simulated within 10% at Q=" + fmt(q));
  }
  return o;
}

// 10. MRFM arithmetic.
Outcome mrfm(int) {
  Outcome o;
  const SystemParams p = defaults(64);
  for (int n = 1; n <= 12; ++n)
    for (int m = 1; m <= 3; ++m) {
      const auto r = mrfm_amplitude(n, m, p);
      o.require(r.resolution == 2 * n * p.alpha0(), "resolution 2 n alpha0");
      o.require(r.amplitude == 2.0 * n * m * p.alpha0(), "amplitude 2 n m alpha0");
    }
  const auto r = mrfm_amplitude(12, 2, p);
  o.require(r.q_threshold == std::numbers::pi / (4 * 0.1), "threshold pi / 4 alpha0");
  o.require(std::abs(r.q_threshold - 7.854) < 5e-4, "threshold 7.854");
  o.note("threshold " + fmt(r.q_threshold, 8) + ", n=12 m=2 amplitude " + fmt(r.amplitude) + " resolution " + fmt(r.resolution));
  return o;
}

using Check = std::function<Outcome(int)>;
const std::vector<std::pair<std::string, Check>> kTruncated = {
    {"fidelity vs pulse amplitude", fidelity_curves}, {"detection curves", detection_curves},
    {"flip operator identity", operator_identity},    {"conditional amplitudes", amplitudes},
    {"detection closed form", detection_oracle},      {"coherence probe", coherence},
    {"entanglement entropy", entanglement},
};

// 11. Criteria 1-7 at twice the truncation.
Outcome truncation(int) {
  Outcome o;
  for (std::size_t k = 0; k < kTruncated.size(); ++k) {
    const Outcome a = kTruncated[k].second(64);
    const Outcome b = kTruncated[k].second(128);
    const std::string tag = "criterion " + std::to_string(k + 1);
    o.require(a.pass == b.pass, tag + " verdict unchanged");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values.size() && i < b.values.size(); ++i) {
      const double d = std::abs(a.values[i].value - b.values[i].value);
      worst = std::max(worst, d / a.values[i].tolerance);
      o.require(d < a.values[i].tolerance, tag + " " + a.values[i].name + " moved by " + fmt(d, 3));
    }
    o.note(tag + " shift/tolerance " + fmt(worst, 2));
  }
  return o;
}

// 12. Byte-identical sweep output.
Outcome determinism(int) {
  Outcome o;
  const std::vector<std::string> configs = {
      "[scenario]\nname = sweep-fidelity\nn_list = 4,8,12\n",
      "[scenario]\nname = sweep-detect\nn_pulses = 12\n[params]\neps_z = 4.0\n",
      "[scenario]\nname = sweep-detect\nn_pulses = 12\n[params]\neps_z = 3.2\n",
  };
  std::size_t bytes = 0;
  for (const auto& text : configs) {
    const auto c = cli::parse_config(text);
    const std::string a = cli::render(cli::run(c, 1), cli::Format::csv);
    const std::string b = cli::render(cli::run(c, 1), cli::Format::csv);
    const std::string d = cli::render(cli::run(c, 4), cli::Format::csv);
    bytes += a.size();
    o.require(a == b, "repeat run identical for " + cli::to_string(c.scenario));
    o.require(a == d, "threads 1 and 4 identical for " + cli::to_string(c.scenario));
  }
  o.note(std::to_string(bytes) + " CSV bytes compared across repeat runs and thread counts {1, 4}");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::pair<std::string, Check>> all(kTruncated.begin(), kTruncated.end());
  all.push_back({"damping and decoherence", damping});
  all.push_back({"saturation", saturation_limit});
  all.push_back({"MRFM scaling", mrfm});
  all.push_back({"truncation robustness", truncation});
  all.push_back({"determinism", determinism});

  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      wanted.push_back(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
      return 2;
    }
  }
  if (wanted.empty())
    for (int k = 1; k <= static_cast<int>(all.size()); ++k) wanted.push_back(k);

  bool ok = true;
  for (int k : wanted) {
    if (k < 1 || k > static_cast<int>(all.size())) {
      std::fprintf(stderr, "no criterion %d\n", k);
      return 2;
    }
    Outcome r;
    try {
      r = all[k - 1].second(64);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    std::printf("%s criterion %2d (%s): %s\n", r.pass ? "PASS" : "FAIL", k, all[k - 1].first.c_str(), r.detail.c_str());
    std::fflush(stdout);
    ok = ok && r.pass;
  }
  return ok ? 0 : 1;
}
