#pragma once

#include <string>
#include <vector>

namespace wolbopt {

struct ModelParams {
  double s_f = 0.1;
  double s_h = 0.9;
  double delta = 4.0 / 3.0;
  double d_un = 0.27;
  double F_un = 1.0;
  double K = 0.06;
  double D = 1.0;

  // Reference parameter set (s_f derived from F_in = 0.9 F_un).
  static ModelParams table1();
  // Same set with s_f = 3/28, the value that reproduces the published tables.
  static ModelParams calibrated();

  double theta() const;
  // delta * d_un * s_h, the prefactor of f.
  double amplitude() const;
  // s_h p^2 - (s_f + s_h) p + 1
  double denominator(double p) const;
};

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<Check> checks;

  bool passed() const;
  const Check* find(const std::string& name) const;
  std::vector<std::string> failures() const;
};

// Throws InputError on non-finite fields; every other problem is reported.
ValidationReport validate_params(const ModelParams& p);

double reaction_f(double p, const ModelParams& m);
double reaction_f_prime(double p, const ModelParams& m);
double reaction_f_second(double p, const ModelParams& m);
double release_g(double p, const ModelParams& m);
double release_g_prime(double p, const ModelParams& m);

// Antiderivative of f vanishing at 0, p in [0,1].
double big_F(double p, const ModelParams& m);

// Root of F on (theta, 1); throws AssumptionError without a sign change.
double compute_theta_c(const ModelParams& m);

struct DerivedThresholds {
  double theta = 0.0;
  double theta_c = 0.0;
  double G_of_theta = 0.0;
  double G_of_theta_c = 0.0;
};

// G(p) = int_0^p dq / g(q) tabulated in s = -log(1 - p), where the
// integrand K den(p) / (1 - s_h p) is smooth and bounded.
class ReleaseMap {
 public:
  static constexpr double kGuard = 1e-9;

  explicit ReleaseMap(const ModelParams& m);

  double G(double p) const;
  double G_inverse(double u) const;
  // Largest admissible release level G(1 - kGuard).
  double G_max() const { return g_max_; }

 private:
  double integrand(double s) const;
  double integrate_panel(double a, double b) const;
  double G_of_s(double s) const;

  ModelParams m_;
  double h_ = 0.0;
  double s_max_ = 0.0;
  std::vector<double> cumulative_;
  double g_max_ = 0.0;
};

double big_G(double p, const ModelParams& m);
double big_G_inverse(double u, const ModelParams& m);

// Validated parameters plus cached thresholds and release map.
class Model {
 public:
  // Throws AssumptionError if validation fails.
  explicit Model(const ModelParams& p);

  const ModelParams& params() const { return p_; }
  const DerivedThresholds& thresholds() const { return thr_; }

  double f(double p) const { return reaction_f(p, p_); }
  double f_prime(double p) const { return reaction_f_prime(p, p_); }
  double f_second(double p) const { return reaction_f_second(p, p_); }
  double g(double p) const { return release_g(p, p_); }
  double g_prime(double p) const { return release_g_prime(p, p_); }
  double F(double p) const { return big_F(p, p_); }

  double G(double p) const { return map_.G(p); }
  double G_inverse(double u) const { return map_.G_inverse(u); }
  double G_inverse_prime(double u) const;
  double G_inverse_second(double u) const;
  double G_max() const { return map_.G_max(); }

 private:
  ModelParams p_;
  ReleaseMap map_;
  DerivedThresholds thr_;
};

}  // namespace wolbopt
