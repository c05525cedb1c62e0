#pragma once

// Independent reference computations used by the unit and acceptance
// suites. None of these call into the code paths they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "procwatt/power_model.hpp"

namespace oracle {

// --- Student-t two-sided p-value by quadrature of the density ----------------

inline long double t_density(long double x, long double df) {
  const long double log_norm = std::lgamma((df + 1.0L) / 2.0L) - std::lgamma(df / 2.0L) -
                               0.5L * std::log(df * 3.14159265358979323846264338327950288L);
  return std::exp(log_norm - (df + 1.0L) / 2.0L * std::log1p(x * x / df));
}

inline long double simpson(long double a, long double b, long double fa, long double fm, long double fb) {
  return (b - a) / 6.0L * (fa + 4.0L * fm + fb);
}

template <class F>
long double adaptive_simpson(F f, long double a, long double b, long double fa, long double fm,
                             long double fb, long double whole, long double tol, int depth) {
  const long double m = 0.5L * (a + b);
  const long double lm = 0.5L * (a + m);
  const long double rm = 0.5L * (m + b);
  const long double flm = f(lm);
  const long double frm = f(rm);
  const long double left = simpson(a, m, fa, flm, fm);
  const long double right = simpson(m, b, fm, frm, fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0L * tol) {
    return left + right + (left + right - whole) / 15.0L;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0L, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0L, depth - 1);
}

/// 1 - 2·∫_0^|t| f(x) dx
inline double t_two_sided_p(double t, double df) {
  const long double hi = std::fabs(static_cast<long double>(t));
  if (hi == 0.0L) return 1.0;
  auto f = [df](long double x) { return t_density(x, df); };
  const long double fa = f(0.0L), fb = f(hi), fm = f(hi / 2.0L);
  const long double area =
      adaptive_simpson(f, 0.0L, hi, fa, fm, fb, simpson(0.0L, hi, fa, fm, fb), 1e-15L, 50);
  return static_cast<double>(1.0L - 2.0L * area);
}

// --- crossovers of a + b·p and c + d·√p via the quadratic in s = √p ------------

/// Positive roots p of b·s² - d·s + (a - c) = 0 with s = √p, ascending.
inline std::vector<double> sqrt_crossovers(double a, double b, double c, double d) {
  std::vector<double> roots;
  if (b == 0.0) {
    if (d != 0.0) {
      const double s = (a - c) / d;
      if (s > 0.0) roots.push_back(s * s);
    }
    return roots;
  }
  const long double disc = static_cast<long double>(d) * d - 4.0L * b * (a - c);
  if (disc < 0.0L) return roots;
  const long double sq = std::sqrt(disc);
  for (long double s : {(d - sq) / (2.0L * b), (d + sq) / (2.0L * b)}) {
    if (s > 0.0L) roots.push_back(static_cast<double>(s * s));
  }
  if (roots.size() == 2 && roots[0] > roots[1]) std::swap(roots[0], roots[1]);
  return roots;
}

// --- brute-force placement enumerator ------------------------------------------

struct BfMachine {
  procwatt::PowerProfile profile;
  double base;
};

struct BfVnf {
  double share;
  std::size_t slice;
};

struct BfResult {
  std::vector<std::size_t> machine_of;
  double total = std::numeric_limits<double>::infinity();
  bool feasible = false;
  bool found = false;
};

/// Recursive enumeration over every assignment in lexicographic order, using
/// the same power accounting as the placement module: a VNF faces its
/// machine's base load plus the other co-located shares (summed in VNF order),
/// slice power sums members in VNF order and the total sums slices in order.
class BruteForcePlacement {
 public:
  BruteForcePlacement(std::vector<BfMachine> machines, std::vector<BfVnf> vnfs, std::size_t slices)
      : machines_(std::move(machines)), vnfs_(std::move(vnfs)), slices_(slices) {}

  BfResult solve() {
    std::vector<std::size_t> current(vnfs_.size());
    recurse(current, 0);
    return best_feasible_.found ? best_feasible_ : best_any_;
  }

 private:
  void recurse(std::vector<std::size_t>& current, std::size_t j) {
    if (j == vnfs_.size()) {
      score(current);
      return;
    }
    for (std::size_t m = 0; m < machines_.size(); ++m) {
      current[j] = m;
      recurse(current, j + 1);
    }
  }

  void score(const std::vector<std::size_t>& assign) {
    std::vector<double> slice_power(slices_, 0.0);
    bool feasible = true;
    for (std::size_t j = 0; j < vnfs_.size(); ++j) {
      double p = machines_[assign[j]].base;
      for (std::size_t k = 0; k < vnfs_.size(); ++k) {
        if (k != j && assign[k] == assign[j]) p += vnfs_[k].share;
      }
      if (p + vnfs_[j].share > 100.0 + 1e-9) feasible = false;
      slice_power[vnfs_[j].slice] += procwatt::evaluate(machines_[assign[j]].profile, p);
    }
    double total = 0.0;
    for (double s : slice_power) total += s;
    if (feasible && (!best_feasible_.found || total < best_feasible_.total)) {
      best_feasible_ = {assign, total, true, true};
    }
    if (!best_any_.found || total < best_any_.total) best_any_ = {assign, total, feasible, true};
  }

  std::vector<BfMachine> machines_;
  std::vector<BfVnf> vnfs_;
  std::size_t slices_;
  BfResult best_feasible_;
  BfResult best_any_;
};

// --- misc ---------------------------------------------------------------------------

inline double rel_err(double got, double want) {
  const double scale = std::max(std::fabs(want), std::numeric_limits<double>::min());
  return std::fabs(got - want) / scale;
}

}  // namespace oracle
