#include "disent/disentangle_single.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

using namespace disent;

namespace {

constexpr FlowVariant kPrinted = FlowVariant::PaperPrinted;

SystemParams free_particle(double m, double gamma = 0.0, double kT = 0.0) {
  SystemParams p;
  p.m = m;
  p.gamma = gamma;
  p.kT = kT;
  return p;
}

const DiffusionMatrix kMomentumOnly{0.0, 0.0, 0.5};

}  // namespace

TEST_CASE("timescales") {
  const Timescales ts = make_timescales(2.0, 0.04, 25.0);
  CHECK(ts.t0 == doctest::Approx(1.0));
  CHECK(ts.tau == doctest::Approx(2.0));
  CHECK(ts.gamma_t0 == ts.t0 * 0.04);
  CHECK(ts.gamma_t0 == doctest::Approx(std::sqrt(0.04 / 25.0)).epsilon(1e-15));
  CHECK_THROWS_AS(make_timescales(1.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_timescales(1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("criterion at t = 0 has zero value but is not a Wigner function") {
  const CriterionValue c = diosi_criterion(0.0, free_particle(1.0), kMomentumOnly, kPrinted);
  CHECK(std::abs(c.value) < 1e-15);
  CHECK_FALSE(c.psd);
  CHECK_FALSE(c.satisfied);
}

TEST_CASE("criterion input validation") {
  SystemParams oscillator = free_particle(1.0);
  oscillator.omega = 1.0;
  CHECK_THROWS_AS(diosi_criterion(1.0, oscillator, kMomentumOnly, kPrinted), std::invalid_argument);
  CHECK_THROWS_AS(diosi_criterion(1.0, free_particle(1.0), DiffusionMatrix{1.0, 0.0, 0.0}, kPrinted),
                  std::invalid_argument);
}

TEST_CASE("undamped criterion falls to a single minimum and then increases") {
  // value(0) = 0 and the criterion is negative until the crossing, so the
  // value first decreases.
  std::vector<double> values;
  for (int i = 1; i <= 5000; ++i) {
    values.push_back(diosi_criterion(1e-3 * i, free_particle(1.0), kMomentumOnly, kPrinted).value);
  }
  const auto lowest = std::min_element(values.begin(), values.end());
  CHECK(*lowest < 0.0);
  CHECK(std::is_sorted(values.begin(), lowest, std::greater<>()));
  CHECK(std::adjacent_find(lowest, values.end(), std::greater_equal<>()) == values.end());
}

TEST_CASE("undamped crossing reproduces the known timescale and its mass scaling") {
  const auto t1 = disentanglement_time(free_particle(1.0), kMomentumOnly, kPrinted, 20.0);
  REQUIRE(t1);
  CHECK(std::abs(*t1 / 1.97 - 1.0) <= 0.02);
  const auto t4 = disentanglement_time(free_particle(4.0), kMomentumOnly, kPrinted, 40.0);
  REQUIRE(t4);
  CHECK(*t4 == doctest::Approx(2.0 * *t1).epsilon(1e-8));
  // Both variants agree without damping.
  const auto ode = disentanglement_time(free_particle(1.0), kMomentumOnly, FlowVariant::OdeConsistent, 20.0);
  REQUIRE(ode);
  CHECK(*ode == doctest::Approx(*t1).epsilon(1e-9));
}

TEST_CASE("the located crossing brackets the criterion") {
  for (double gamma : {0.0, 0.01, 0.3}) {
    const SystemParams p = free_particle(1.3, gamma, 5.0);
    const DiffusionMatrix d = gamma > 0.0 ? minimal_diffusion(p.m, gamma, p.kT) : kMomentumOnly;
    for (auto variant : {kPrinted, FlowVariant::OdeConsistent}) {
      const auto t = disentanglement_time(p, d, variant, default_t_max(p, d));
      REQUIRE(t);
      CHECK_FALSE(diosi_criterion(0.999 * *t, p, d, variant).satisfied);
      CHECK(diosi_criterion(1.001 * *t, p, d, variant).satisfied);
      // A single onset: satisfied from there on.
      for (double factor : {1.01, 1.5, 3.0, 10.0, 100.0}) {
        CHECK(diosi_criterion(factor * *t, p, d, variant).satisfied);
      }
    }
  }
}

TEST_CASE("no diffusion means no crossing") {
  CHECK_FALSE(disentanglement_time(free_particle(1.0), DiffusionMatrix{}, kPrinted, 100.0));
  CHECK_THROWS_AS(disentanglement_time(free_particle(1.0), kMomentumOnly, kPrinted, 0.0),
                  std::invalid_argument);
}

TEST_CASE("long-time determinant") {
  CHECK(asymptotic_det(10.0, minimal_diffusion(1.0, 0.1, 10.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(asymptotic_det(0.0, minimal_diffusion(1.0, 0.1, 10.0)) == 0.0);

  const SystemParams p = free_particle(1.0, 0.1, 10.0);
  const auto scale = [&](const DiffusionMatrix& d) {
    return 100.0 * std::max({1.0 / p.gamma, 1.0 / std::sqrt(p.gamma * p.kT), kiefer_time(p.m, d.d_pp)});
  };
  const auto ratio = [&](double t, const DiffusionMatrix& d) {
    return diosi_criterion(t, p, d, kPrinted).value / asymptotic_det(t, d);
  };

  // A diffusion well inside the Lindblad cone reaches the asymptote quickly.
  const DiffusionMatrix wide{1.0, 0.0, 1.0};
  CHECK(ratio(scale(wide), wide) == doctest::Approx(1.0).epsilon(0.1));
  CHECK(ratio(10.0 * scale(wide), wide) == doctest::Approx(1.0).epsilon(0.01));

  // Minimal diffusion sits on the cone boundary: det D is tiny, the linear
  // correction is large, and the ratio only settles near t ~ 1e7.
  const DiffusionMatrix minimal = minimal_diffusion(p.m, p.gamma, p.kT);
  CHECK(ratio(scale(minimal), minimal) > 10.0);
  double previous_gap = 0.0;
  for (double t : {1e4, 1e5, 1e6, 1e7}) {
    const double gap = ratio(t, minimal) - 1.0;
    CHECK(gap > 0.0);
    if (previous_gap > 0.0) CHECK(gap == doctest::Approx(previous_gap / 10.0).epsilon(0.02));
    previous_gap = gap;
  }
  CHECK(ratio(1e7, minimal) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("timescale estimate") {
  CHECK(kiefer_time(1.0, 0.5) == doctest::Approx(1.97).epsilon(1e-15));
  CHECK(kiefer_time(1.0, 2.0) == doctest::Approx(0.985).epsilon(1e-15));
  CHECK(kiefer_time(100.0, 0.5) == doctest::Approx(19.7).epsilon(1e-14));
  CHECK_THROWS_AS(kiefer_time(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(kiefer_time(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("dimensionless functions") {
  const PhiTheta zero = phi_theta(0.0, 0.3);
  CHECK(zero.phi == 0.0);
  CHECK(zero.theta == 0.0);
  for (double g : {0.0, 0.1, 1.0}) {
    for (double tau : {0.2, 1.0, 4.0}) {
      const double y = g * tau;
      const PhiTheta v = phi_theta(tau, g);
      CHECK(v.phi == doctest::Approx(4 * y + 4 * std::exp(-2 * y) - std::exp(-4 * y) - 3).epsilon(1e-10));
      CHECK(v.theta == doctest::Approx(2 * y + std::exp(-2 * y) - 1).epsilon(1e-10));
    }
  }
  // Small-argument expansions in y = gamma t0 tau.
  for (double y : {1e-4, 1e-3, 1e-2}) {
    const PhiTheta v = phi_theta(y, 1.0);
    CHECK(std::abs(v.phi - (16.0 / 3.0 * y * y * y - 8.0 * y * y * y * y)) <= 10.0 * std::pow(y, 5));
    CHECK(std::abs(v.theta - (2.0 * y * y - 4.0 / 3.0 * y * y * y)) <= 1.0 * std::pow(y, 4));
  }
  CHECK_THROWS_AS(phi_theta(-1.0, 0.1), std::invalid_argument);
}

TEST_CASE("reduced criterion matches the dimensional one") {
  for (double g : {0.02, 0.3, 1.5}) {
    const double kT = 3.0;
    const double gamma = g * g * kT;
    for (double m : {0.5, 2.0}) {
      const SystemParams p = free_particle(m, gamma, kT);
      const DiffusionMatrix d = minimal_diffusion(m, gamma, kT);
      const double t0 = 1.0 / std::sqrt(gamma * kT);
      for (double tau : {0.1, 0.7, 3.0}) {
        CHECK(diosi_criterion(tau * t0, p, d, kPrinted).value ==
              doctest::Approx(reduced_criterion(tau, g)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("high-temperature series and the numeric crossing") {
  CHECK(tau_star_series(0.0) == 0.25);
  CHECK(tau_star_series(0.1) == doctest::Approx(0.25 - 25.0 / 4800.0).epsilon(1e-15));
  CHECK(tau_star_series(0.05) == doctest::Approx(0.248698).epsilon(1e-6));
  CHECK_THROWS_AS(tau_star_series(-0.1), std::invalid_argument);

  // The numeric crossing does not depend on how gamma_t0 is split.
  const double a = tau_star_numeric(0.05, 1.0);
  const double b = tau_star_numeric(0.05, 400.0);
  CHECK(std::abs(a - b) <= 1e-8);

  // As gamma_t0 -> 0 it approaches the first root of the undamped reduced
  // criterion, which is 1 and not the series value 1/4.
  CHECK(tau_star_limit() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(reduced_criterion(0.25, 0.0) < 0.0);
  double previous = 0.0;
  for (double g : {0.08, 0.04, 0.02, 0.01}) {
    const double gap = std::abs(tau_star_numeric(g) - 1.0);
    if (previous > 0.0) CHECK(gap < previous);
    previous = gap;
  }
  CHECK_THROWS_AS(tau_star_numeric(0.0), std::invalid_argument);
}

TEST_CASE("criterion trace") {
  const CriterionTrace trace = criterion_trace(free_particle(1.0), kMomentumOnly, kPrinted, 4.0, 101);
  REQUIRE(trace.times.size() == 101);
  CHECK(trace.times.front() == 0.0);
  CHECK(trace.times.back() == 4.0);
  for (std::size_t i = 1; i < trace.times.size(); ++i) CHECK(trace.times[i] > trace.times[i - 1]);
  REQUIRE(trace.crossing);
  const auto solver = disentanglement_time(free_particle(1.0), kMomentumOnly, kPrinted, 4.0);
  CHECK(*trace.crossing == doctest::Approx(*solver).epsilon(1e-8));
  CHECK_FALSE(criterion_trace(free_particle(1.0), kMomentumOnly, kPrinted, 1.0, 50).crossing);
  CHECK_THROWS_AS(criterion_trace(free_particle(1.0), kMomentumOnly, kPrinted, 1.0, 1), std::invalid_argument);
}

TEST_CASE("bisection") {
  const double root = bisect_onset([](double x) { return x * x >= 2.0; }, 0.0, 2.0, 1e-14);
  CHECK(root == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
  CHECK(root * root >= 2.0);
}
