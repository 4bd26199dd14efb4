#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "catsim/analysis.hpp"
#include "catsim/protocols.hpp"
#include "oracles.hpp"

using namespace catsim;

TEST_CASE("fidelity") {
  const FockSpace s(64);
  const auto a = coherent_state(0.0, s), b = coherent_state(2.4, s);
  CHECK(fidelity(a, a) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fidelity(StateVector::basis(4, 0), StateVector::basis(4, 1)) == 0.0);
  CHECK(std::abs(fidelity(a, b) - std::norm(oracle::overlap_series(0.0, 2.4))) < 1e-12);
  CHECK(fidelity(a, b) == doctest::Approx(3.15e-3).epsilon(0.01));
  CHECK(fidelity(a, b) == fidelity(b, a));
  CHECK_THROWS_AS(fidelity(StateVector::basis(4, 0), StateVector::basis(5, 0)), DimensionError);
}

TEST_CASE("qubit reduced state") {
  SystemParams p;
  CHECK(qubit_reduced(product_state(1.0, 1.0, coherent_state(1.0, p.fock()))).entropy < 1e-12);

  SUBCASE("large cat is maximally entangled") {
    const auto r = qubit_reduced(ideal_cat(12, p));
    const double x = std::exp(-11.52);
    CHECK(std::abs(r.eigenvalues[0] - 0.5 * (1 - x)) < 1e-10);
    CHECK(std::abs(r.eigenvalues[1] - 0.5 * (1 + x)) < 1e-10);
    CHECK(std::abs(r.entropy - std::log(2.0)) < 1e-9);
    CHECK(std::abs(r.rho.trace() - 1.0) < 1e-10);
  }
  SUBCASE("small cat is weakly entangled") {
    const auto r = qubit_reduced(ideal_cat(1, p));
    const double x = std::real(oracle::overlap_series(0.2, -0.2));
    CHECK(x == doctest::Approx(std::exp(-0.08)));
    CHECK(std::abs(r.entropy - oracle::qubit_entropy(x)) < 1e-10);
    CHECK(r.entropy == doctest::Approx(0.16293).epsilon(1e-4));
  }
  SUBCASE("oscillator-only unitaries leave the entropy alone") {
    const auto cat = ideal_cat(5, p);
    const CompositeSpace cs(p.fock());
    const auto u = embed(qubit_identity(), displacement(cplx(0.3, -0.4), p.fock()), cs);
    CHECK(std::abs(qubit_reduced(cat).entropy - qubit_reduced(u.apply_unitary(cat)).entropy) < 1e-10);
  }
}

TEST_CASE("detection coefficients") {
  auto c = detection_coefficients(1.3, 0.0);
  CHECK(std::abs(c.c_up - cplx(0, -1)) < 1e-15);
  CHECK(std::abs(c.c_down) < 1e-15);

  c = detection_coefficients(1.92, 1.92);
  CHECK(c.eps_bar == doctest::Approx(1.92 * std::numbers::sqrt2));
  CHECK(std::norm(c.c_up) == doctest::Approx(std::pow(std::sin(std::numbers::pi / std::numbers::sqrt2), 2) / 2));
  CHECK(std::norm(c.c_up) == doctest::Approx(oracle::rabi_flip(1.92, 1.92)).epsilon(1e-13));

  CHECK(std::abs(detection_coefficients(0.02, 2.0).c_down) > 0.999);

  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> eps(1e-3, 20.0), shift(0.0, 20.0);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const auto d = detection_coefficients(eps(rng), shift(rng));
    worst = std::max(worst, std::abs(std::norm(d.c_up) + std::norm(d.c_down) - 1.0));
  }
  CHECK(worst < 1e-12);
  CHECK_THROWS_AS(detection_coefficients(0.0, 1.0), ValidationError);
}

TEST_CASE("hermite functions") {
  for (double xi : {-3.1, -0.4, 0.0, 1.7, 5.2}) {
    const auto h = hermite_functions(12, xi);
    for (int n = 0; n < 12; ++n) {
      const double norm = std::sqrt(std::pow(2.0, n) * std::tgamma(n + 1.0) * std::sqrt(std::numbers::pi));
      CHECK(h[n] == doctest::Approx(std::hermite(n, xi) * std::exp(-0.5 * xi * xi) / norm).epsilon(1e-12));
    }
  }
  const auto far = hermite_functions(64, 9.0);
  for (double v : far) CHECK(std::isfinite(v));
}

TEST_CASE("position density") {
  SystemParams p;
  const auto grid = [](double lo, double hi, double dx) {
    std::vector<double> g;
    const long n = std::lround((hi - lo) / dx);
    for (long i = 0; i <= n; ++i) g.push_back(lo + i * dx);
    return g;
  };
  const auto mass = [](const std::vector<double>& f, double dx) {
    double s = 0.0;
    for (double v : f) s += v * dx;
    return s;
  };

  SUBCASE("vacuum is a unit-variance gaussian") {
    const auto g = grid(-8, 8, 0.05);
    const auto d = position_density(product_state(1.0, 0.0, coherent_state(0.0, p.fock())), g);
    for (std::size_t i = 0; i < g.size(); i += 40)
      CHECK(d.up[i] == doctest::Approx(std::exp(-0.5 * g[i] * g[i]) / std::sqrt(2 * std::numbers::pi)).epsilon(1e-10));
    CHECK(mass(d.up, 0.05) == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("coherent state sits at 2 Re alpha") {
    const auto g = grid(-12.8, 12.8, 0.05);
    const auto d = position_density(product_state(1.0, 0.0, coherent_state(2.4, p.fock())), g);
    double m1 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) m1 += g[i] * d.up[i] * 0.05;
    CHECK(m1 == doctest::Approx(4.8).epsilon(1e-6));
  }
  SUBCASE("cat has two mirrored peaks") {
    const auto g = grid(-12.8, 12.8, 0.05);
    const auto d = position_density(ideal_cat(12, p), g);
    CHECK(mass(d.up, 0.05) + mass(d.down, 0.05) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(mass(d.up, 0.05) == doctest::Approx(0.5).epsilon(1e-6));
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(d.up[i] - d.down[g.size() - 1 - i]) < 1e-10);
  }
  SUBCASE("guard band weight is rejected") {
    const auto edge = product_state(1.0, 0.0, StateVector::basis(64, 62));
    CHECK_THROWS_AS(position_density(edge, {0.0}), TruncationError);
  }
}

TEST_CASE("decoherence estimate") {
  SystemParams p;
  p.temperature = 0.0;
  CHECK(decoherence_estimate(12, p) == 0.0);

  // omega0 = 100 MHz, T = 20 mK, Q = 1e4.
  const double kbt = units::kbt_mhz(20.0);
  CHECK(kbt == doctest::Approx(416.73).epsilon(1e-4));
  const double rate_khz = kbt / 1e4 * 1e3;
  CHECK(rate_khz == doctest::Approx(41.67).epsilon(1e-3));

  p.temperature = kbt / 100.0;
  p.q_factor = 1e4;
  const double mhz = decoherence_estimate(25, p) * 100.0;  // 2 n alpha0 = 5
  CHECK(mhz == doctest::Approx(25 * rate_khz / 1e3).epsilon(1e-12));
  CHECK(mhz > 0.5);
  CHECK(mhz < 2.0);

  // Fed the quoted 50 kHz dissipation rate directly, the formula gives 25 x 50 kHz.
  p.temperature = 0.05 * 1e4 / 100.0;
  CHECK(decoherence_estimate(25, p) * 100.0 == doctest::Approx(1.25).epsilon(1e-12));
}
