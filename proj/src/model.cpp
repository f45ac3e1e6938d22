#include "wolbopt/model.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "wolbopt/errors.hpp"

namespace wolbopt {

ModelParams ModelParams::table1() { return ModelParams{}; }

ModelParams ModelParams::calibrated() {
  ModelParams p;
  p.s_f = 3.0 / 28.0;
  return p;
}

double ModelParams::theta() const { return (s_f + delta - 1.0) / (delta * s_h); }

double ModelParams::amplitude() const { return delta * d_un * s_h; }

double ModelParams::denominator(double p) const { return s_h * p * p - (s_f + s_h) * p + 1.0; }

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::vector<std::string> ValidationReport::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.passed) out.push_back(c.name);
  return out;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

ValidationReport validate_params(const ModelParams& p) {
  const double fields[] = {p.s_f, p.s_h, p.delta, p.d_un, p.F_un, p.K, p.D};
  for (double v : fields)
    if (!std::isfinite(v)) throw InputError("model parameters must be finite");

  ValidationReport r;
  auto add = [&](std::string name, bool ok, std::string detail) {
    r.checks.push_back({std::move(name), ok, std::move(detail)});
  };
  add("delta_gt_1", p.delta > 1.0, "delta = " + fmt(p.delta));
  add("s_f_in_unit", p.s_f > 0.0 && p.s_f < 1.0, "s_f = " + fmt(p.s_f));
  add("s_h_in_unit", p.s_h > 0.0 && p.s_h < 1.0, "s_h = " + fmt(p.s_h));
  add("d_un_positive", p.d_un > 0.0, "d_un = " + fmt(p.d_un));
  add("F_un_positive", p.F_un > 0.0, "F_un = " + fmt(p.F_un));
  add("K_positive", p.K > 0.0, "K = " + fmt(p.K));
  add("D_positive", p.D > 0.0, "D = " + fmt(p.D));
  const double lhs = p.s_f + p.delta - 1.0;
  add("rel_coef", lhs < p.delta * p.s_h,
      "s_f + delta - 1 = " + fmt(lhs) + " vs delta s_h = " + fmt(p.delta * p.s_h));
  const double sum = p.s_f + p.s_h;
  add("cond1", sum * sum < 4.0 * p.s_h,
      "(s_f + s_h)^2 = " + fmt(sum * sum) + " vs 4 s_h = " + fmt(4.0 * p.s_h));
  const double c2 = p.delta * (sum - 2.0) - p.s_f + 1.0;
  add("cond2", c2 < 0.0, "delta (s_f + s_h - 2) - s_f + 1 = " + fmt(c2));

  const bool structural = r.passed();
  if (!structural) {
    add("theta_c_exists", false, "not evaluated: earlier checks failed");
    return r;
  }
  try {
    const double tc = compute_theta_c(p);
    add("theta_c_exists", true, "theta_c = " + fmt(tc));
  } catch (const AssumptionError& e) {
    add("theta_c_exists", false, e.what());
  }
  return r;
}

double reaction_f(double p, const ModelParams& m) {
  return m.amplitude() * p * (1.0 - p) * (p - m.theta()) / m.denominator(p);
}

double reaction_f_prime(double p, const ModelParams& m) {
  const double th = m.theta();
  const double n = p * (1.0 - p) * (p - th);
  const double n1 = -3.0 * p * p + 2.0 * (1.0 + th) * p - th;
  const double d = m.denominator(p);
  const double d1 = 2.0 * m.s_h * p - (m.s_f + m.s_h);
  return m.amplitude() * (n1 * d - n * d1) / (d * d);
}

double reaction_f_second(double p, const ModelParams& m) {
  const double th = m.theta();
  const double n = p * (1.0 - p) * (p - th);
  const double n1 = -3.0 * p * p + 2.0 * (1.0 + th) * p - th;
  const double n2 = -6.0 * p + 2.0 * (1.0 + th);
  const double d = m.denominator(p);
  const double d1 = 2.0 * m.s_h * p - (m.s_f + m.s_h);
  const double d2 = 2.0 * m.s_h;
  return m.amplitude() *
         (n2 / d - 2.0 * n1 * d1 / (d * d) - n * d2 / (d * d) + 2.0 * n * d1 * d1 / (d * d * d));
}

double release_g(double p, const ModelParams& m) {
  return (1.0 - p) * (1.0 - m.s_h * p) / (m.K * m.denominator(p));
}

double release_g_prime(double p, const ModelParams& m) {
  const double n = (1.0 - p) * (1.0 - m.s_h * p);
  const double n1 = -(1.0 + m.s_h) + 2.0 * m.s_h * p;
  const double d = m.denominator(p);
  const double d1 = 2.0 * m.s_h * p - (m.s_f + m.s_h);
  return (n1 * d - n * d1) / (m.K * d * d);
}

double big_F(double p, const ModelParams& m) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("F(p) requires p in [0,1], got " + fmt(p));
  if (p == 0.0) return 0.0;
  auto f = [&](double q) { return reaction_f(q, m); };
  return boost::math::quadrature::gauss<double, 30>::integrate(f, 0.0, p);
}

double compute_theta_c(const ModelParams& m) {
  const double th = m.theta();
  if (!(th > 0.0 && th < 1.0)) throw AssumptionError("theta outside (0,1)");
  const double f1 = big_F(1.0, m);
  if (!(f1 > 0.0)) throw AssumptionError("F(1) <= 0: no root of F on (theta, 1)");
  const double fth = big_F(th, m);
  if (!(fth < 0.0)) throw AssumptionError("F(theta) >= 0: no sign change of F on (theta, 1)");
  auto F = [&](double q) { return big_F(q, m); };
  std::uintmax_t iters = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(50);
  auto [a, b] = boost::math::tools::toms748_solve(F, th, 1.0, fth, f1, tol, iters);
  return 0.5 * (a + b);
}

ReleaseMap::ReleaseMap(const ModelParams& m) : m_(m) {
  h_ = 1.0 / 16.0;
  const double s_guard = -std::log(kGuard);
  const auto panels = static_cast<std::size_t>(std::ceil(s_guard / h_)) + 1;
  s_max_ = static_cast<double>(panels) * h_;
  cumulative_.assign(panels + 1, 0.0);
  for (std::size_t k = 0; k < panels; ++k)
    cumulative_[k + 1] = cumulative_[k] + integrate_panel(k * h_, (k + 1) * h_);
  g_max_ = G_of_s(s_guard);
}

double ReleaseMap::integrand(double s) const {
  const double p = -std::expm1(-s);
  return m_.K * m_.denominator(p) / (1.0 - m_.s_h * p);
}

double ReleaseMap::integrate_panel(double a, double b) const {
  if (b <= a) return 0.0;
  return boost::math::quadrature::gauss<double, 10>::integrate(
      [this](double s) { return integrand(s); }, a, b);
}

double ReleaseMap::G_of_s(double s) const {
  const auto k = std::min(static_cast<std::size_t>(s / h_), cumulative_.size() - 2);
  return cumulative_[k] + integrate_panel(k * h_, s);
}

double ReleaseMap::G(double p) const {
  if (!(p >= 0.0 && p <= 1.0 - kGuard))
    throw DomainError("G(p) requires p in [0, 1 - 1e-9], got " + fmt(p));
  if (p == 0.0) return 0.0;
  return G_of_s(-std::log1p(-p));
}

double ReleaseMap::G_inverse(double u) const {
  if (!(u >= 0.0)) throw DomainError("G^-1(u) requires u >= 0, got " + fmt(u));
  if (u > g_max_) throw DomainError("G^-1(u) requires u <= G(1 - 1e-9) = " + fmt(g_max_));
  if (u == 0.0) return 0.0;
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto k = static_cast<std::size_t>(std::distance(cumulative_.begin(), it)) - 1;
  double lo = k * h_, hi = (k + 1) * h_;
  double s = lo + (u - cumulative_[k]) / integrand(lo);
  if (!(s > lo && s < hi)) s = 0.5 * (lo + hi);
  for (int it_n = 0; it_n < 60; ++it_n) {
    const double r = G_of_s(s) - u;
    if (r > 0.0) hi = s;
    else lo = s;
    double next = s - r / integrand(s);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) <= 1e-15 * std::max(1.0, s)) {
      s = next;
      break;
    }
    s = next;
  }
  return -std::expm1(-s);
}

double big_G(double p, const ModelParams& m) { return ReleaseMap(m).G(p); }

double big_G_inverse(double u, const ModelParams& m) { return ReleaseMap(m).G_inverse(u); }

namespace {

const ModelParams& checked(const ModelParams& p) {
  const auto report = validate_params(p);
  if (!report.passed()) {
    std::string msg = "model assumptions violated:";
    for (const auto& c : report.checks)
      if (!c.passed) msg += " " + c.name + " (" + c.detail + ")";
    throw AssumptionError(msg);
  }
  return p;
}

}  // namespace

Model::Model(const ModelParams& p) : p_(checked(p)), map_(p_) {
  thr_.theta = p_.theta();
  thr_.theta_c = compute_theta_c(p_);
  thr_.G_of_theta = map_.G(thr_.theta);
  thr_.G_of_theta_c = map_.G(thr_.theta_c);
}

double Model::G_inverse_prime(double u) const { return g(G_inverse(u)); }

double Model::G_inverse_second(double u) const {
  const double p = G_inverse(u);
  return g_prime(p) * g(p);
}

}  // namespace wolbopt
