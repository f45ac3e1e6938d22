#include <cmath>
#include <random>

#include "doctest.h"
#include "wolbopt/errors.hpp"
#include "wolbopt/model.hpp"

using namespace wolbopt;

namespace {

// Composite Simpson rule, independent of the library quadrature.
template <class F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

double central_diff(auto f, double x, double h) { return (f(x + h) - f(x - h)) / (2.0 * h); }

}  // namespace

TEST_CASE("baseline parameters pass every check with theta = 13/36") {
  const auto p = ModelParams::table1();
  const auto r = validate_params(p);
  CHECK(r.passed());
  CHECK(r.failures().empty());
  CHECK(p.theta() == doctest::Approx(13.0 / 36.0).epsilon(1e-15));
  for (const char* name : {"delta_gt_1", "s_f_in_unit", "s_h_in_unit", "d_un_positive",
                           "F_un_positive", "K_positive", "D_positive", "rel_coef", "cond1",
                           "cond2", "theta_c_exists"}) {
    CAPTURE(name);
    REQUIRE(r.find(name) != nullptr);
  }
}

TEST_CASE("cond1 fails for s_f = 0.9, s_h = 0.2") {
  auto p = ModelParams::table1();
  p.s_f = 0.9;
  p.s_h = 0.2;
  const auto r = validate_params(p);
  CHECK_FALSE(r.passed());
  CHECK_FALSE(r.find("cond1")->passed);
}

TEST_CASE("delta = 1 fails the death-ratio check") {
  auto p = ModelParams::table1();
  p.delta = 1.0;
  CHECK_FALSE(validate_params(p).find("delta_gt_1")->passed);
}

TEST_CASE("non-finite fields are input errors") {
  auto p = ModelParams::table1();
  p.K = std::nan("");
  CHECK_THROWS_AS(validate_params(p), InputError);
}

TEST_CASE("Model rejects parameters that break the assumptions") {
  auto p = ModelParams::table1();
  p.delta = 1.0;
  CHECK_THROWS_AS(Model{p}, AssumptionError);
}

TEST_CASE("reaction term values") {
  const auto p = ModelParams::table1();
  CHECK(reaction_f(0.0, p) == 0.0);
  CHECK(reaction_f(1.0, p) == doctest::Approx(0.0));
  CHECK(std::abs(reaction_f(p.theta(), p)) < 1e-16);
  const double hand = 0.324 * 0.25 * (0.5 - 13.0 / 36.0) / 0.725;
  CHECK(reaction_f(0.5, p) == doctest::Approx(hand).epsilon(1e-12));
  CHECK(reaction_f(0.5, p) == doctest::Approx(0.0155172).epsilon(1e-5));
  const double A = p.delta * p.d_un * p.s_h;
  const double th = p.theta();
  CHECK(reaction_f_second(0.0, p) == doctest::Approx(2 * A * (1 + th - th * (p.s_f + p.s_h))));
  CHECK(reaction_f_second(0.0, p) == doctest::Approx(0.648).epsilon(1e-9));
}

TEST_CASE("f'' has one sign change near 0.466") {
  const auto p = ModelParams::table1();
  int changes = 0;
  double z = 0.0;
  double prev = reaction_f_second(1e-3, p);
  for (int i = 2; i <= 999; ++i) {
    const double x = i * 1e-3;
    const double cur = reaction_f_second(x, p);
    if ((cur > 0) != (prev > 0)) {
      ++changes;
      z = x;
    }
    prev = cur;
  }
  CHECK(changes == 1);
  CHECK(z > p.theta());
  CHECK(z == doctest::Approx(0.466).epsilon(0.01 / 0.466));
}

TEST_CASE("release term values") {
  const auto p = ModelParams::table1();
  CHECK(release_g(1.0, p) == 0.0);
  CHECK(release_g(0.0, p) == doctest::Approx(1.0 / 0.06));
  CHECK(release_g(0.5, p) == doctest::Approx(0.275 / (0.06 * 0.725)).epsilon(1e-12));
  CHECK(release_g(0.5, p) == doctest::Approx(6.3218).epsilon(1e-4));
}

TEST_CASE("antiderivative of f") {
  const Model m(ModelParams::table1());
  CHECK(m.F(0.0) == 0.0);
  CHECK(m.F(m.thresholds().theta) < 0.0);
  CHECK(std::abs(m.F(m.thresholds().theta_c)) < 1e-10);
  const auto f = [&](double q) { return m.f(q); };
  for (double x : {0.2, 0.5, 0.8, 1.0}) CHECK(m.F(x) == doctest::Approx(simpson(f, 0, x, 4000)).epsilon(1e-10));
  CHECK_THROWS_AS(big_F(1.5, m.params()), DomainError);
  CHECK_THROWS_AS(big_F(-0.1, m.params()), DomainError);
}

TEST_CASE("theta_c brackets") {
  const Model m(ModelParams::table1());
  const auto& t = m.thresholds();
  CHECK(t.theta < t.theta_c);
  CHECK(t.theta_c < 1.0);
  CHECK(t.theta_c == doctest::Approx(0.582).epsilon(0.02 / 0.582));
  CHECK(compute_theta_c(m.params()) == doctest::Approx(t.theta_c).epsilon(1e-12));
}

TEST_CASE("release map against an independent Simpson oracle") {
  const Model m(ModelParams::table1());
  CHECK(m.G(0.0) == 0.0);
  CHECK(m.G_inverse(0.0) == 0.0);
  const double th = m.thresholds().theta;
  const double oracle = simpson([&](double q) { return 1.0 / m.g(q); }, 0.0, th, 4000);
  CHECK(m.G(th) == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(std::abs(m.G(th) - 0.02778) < 2e-4);
  for (double x : {0.1, 0.463, 0.9, 0.99}) {
    const double o = simpson([&](double q) { return 1.0 / m.g(q); }, 0.0, x, 20000);
    CHECK(m.G(x) == doctest::Approx(o).epsilon(1e-9));
  }
  CHECK_THROWS_AS(m.G(1.0), DomainError);
  CHECK_THROWS_AS(m.G_inverse(-1.0), DomainError);
}

TEST_CASE("inverse release levels used by the reference tables") {
  const Model m(ModelParams::calibrated());
  CHECK(std::abs(m.G_inverse(0.04) - 0.4630) < 1e-3);
  CHECK(std::abs(m.G_inverse(0.08) - 0.6569) < 1e-3);
}

TEST_CASE("property: denominator positive on [-1, 2]") {
  for (const auto& p : {ModelParams::table1(), ModelParams::calibrated()})
    for (int i = 0; i <= 1000; ++i) {
      const double x = -1.0 + 3.0 * i / 1000.0;
      REQUIRE(p.denominator(x) > 0.0);
    }
}

TEST_CASE("property: bistable sign structure and convexity below theta") {
  const auto p = ModelParams::table1();
  const double th = p.theta();
  for (int i = 1; i < 1000; ++i) {
    const double x = i / 1000.0;
    if (std::abs(x - th) > 1e-12) REQUIRE(reaction_f(x, p) * (x - th) > 0.0);
    if (x < th) REQUIRE(reaction_f_second(x, p) > 0.0);
  }
}

TEST_CASE("property: g positive and strictly decreasing on [0,1)") {
  const auto p = ModelParams::table1();
  double prev = release_g(0.0, p);
  for (int i = 1; i < 1000; ++i) {
    const double cur = release_g(i / 1000.0, p);
    REQUIRE(cur > 0.0);
    REQUIRE(cur < prev);
    prev = cur;
  }
}

TEST_CASE("property: analytic derivatives match central differences") {
  const auto p = ModelParams::table1();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.01, 0.99);
  const auto f = [&](double x) { return reaction_f(x, p); };
  const auto fp = [&](double x) { return reaction_f_prime(x, p); };
  const auto g = [&](double x) { return release_g(x, p); };
  for (int k = 0; k < 100; ++k) {
    const double x = U(rng);
    CAPTURE(x);
    const double d1 = central_diff(f, x, 1e-5), d2 = central_diff(fp, x, 1e-5);
    CHECK(std::abs(fp(x) - d1) <= 1e-6 * std::max(std::abs(d1), 1e-3));
    CHECK(std::abs(reaction_f_second(x, p) - d2) <= 1e-6 * std::max(std::abs(d2), 1e-3));
    const double dg = central_diff(g, x, 1e-6);
    CHECK(release_g_prime(x, p) == doctest::Approx(dg).epsilon(1e-6));
  }
}

TEST_CASE("property: G inverse round trip and derivative identities") {
  const Model m(ModelParams::table1());
  for (int i = 0; i <= 99; ++i) {
    const double x = 0.99 * i / 99.0;
    REQUIRE(std::abs(m.G_inverse(m.G(x)) - x) < 1e-9);
  }
  for (double u : {1e-4, 0.01, 0.03, 0.06, 0.1, 0.2}) {
    const double p = m.G_inverse(u);
    CHECK(std::abs(m.G(p) - u) < 1e-10);
    CHECK(std::abs(m.G_inverse_prime(u) * (1.0 / m.g(p)) - 1.0) < 1e-8);
    CHECK(m.G_inverse_second(u) == doctest::Approx(m.g_prime(p) * m.g(p)).epsilon(1e-12));
    const double fd = (m.G_inverse(u + 1e-6) - m.G_inverse(u - 1e-6)) / 2e-6;
    CHECK(m.G_inverse_prime(u) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("property: G strictly increasing") {
  const Model m(ModelParams::table1());
  double prev = m.G(0.0);
  for (int i = 1; i < 1000; ++i) {
    const double cur = m.G(0.999 * i / 999.0);
    REQUIRE(cur > prev);
    prev = cur;
  }
}
