#ifndef RANKONE_DETAIL_TAYLOR_HPP
#define RANKONE_DETAIL_TAYLOR_HPP

// Truncated Taylor series about theta = 0, used to extract exact jets of
// basis expansions. No finite differences anywhere.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace rankone::detail {

struct Taylor {
  // c[m] is the coefficient of theta^m; all series share a truncation order.
  std::vector<double> c;

  explicit Taylor(int order) : c(static_cast<size_t>(order) + 1, 0.0) {}

  int order() const { return static_cast<int>(c.size()) - 1; }

  static Taylor constant(double v, int order) {
    Taylor t(order);
    t.c[0] = v;
    return t;
  }

  // sin(s * theta)
  static Taylor sin_scaled(double s, int order) {
    Taylor t(order);
    double term = s;  // s^(2k+1) (-1)^k / (2k+1)!
    for (int m = 1; m <= order; m += 2) {
      t.c[m] = term;
      term *= -s * s / ((m + 1.0) * (m + 2.0));
    }
    return t;
  }

  // cos(s * theta)
  static Taylor cos_scaled(double s, int order) {
    Taylor t(order);
    double term = 1.0;
    for (int m = 0; m <= order; m += 2) {
      t.c[m] = term;
      term *= -s * s / ((m + 1.0) * (m + 2.0));
    }
    return t;
  }

  Taylor& operator+=(const Taylor& o) {
    for (size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
    return *this;
  }

  Taylor& scale(double s) {
    for (double& v : c) v *= s;
    return *this;
  }

  friend Taylor operator*(const Taylor& a, const Taylor& b) {
    Taylor r(a.order());
    for (size_t i = 0; i < a.c.size(); ++i) {
      if (a.c[i] == 0.0) continue;
      for (size_t j = 0; i + j < r.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
    }
    return r;
  }

  Taylor pow(int k) const {
    Taylor r = constant(1.0, order());
    for (int i = 0; i < k; ++i) r = r * (*this);
    return r;
  }
};

// Taylor series about theta = 0 of P_n^{(alpha,beta)}(cos theta), through
// the terminating hypergeometric expansion in u = sin^2(theta/2):
//   P_n(cos t) = P_n(1) sum_s [(-n)_s (n+a+b+1)_s / ((a+1)_s s!)] u^s.
// u^s starts at theta^{2s}, so only s <= order/2 terms contribute, and the
// coefficients stay at the true jet magnitude for every n (expanding P_n
// in monomials instead loses all precision by n ~ 20).
inline Taylor taylor_jacobi_cos(int n, double alpha, double beta, int order) {
  Taylor u(order);  // sin^2(theta/2) = (1 - cos theta)/2
  {
    const Taylor cost = Taylor::cos_scaled(1.0, order);
    for (int m = 1; m <= order; ++m) u.c[m] = -0.5 * cost.c[m];
  }
  const int s_max = std::min(n, order / 2);
  // T_0 = P_n(1) = (alpha+1)_n / n!
  double t = 1.0;
  for (int j = 0; j < n; ++j) t *= (alpha + 1.0 + j) / (j + 1.0);
  std::vector<double> ts(static_cast<size_t>(s_max) + 1);
  for (int s = 0; s <= s_max; ++s) {
    ts[s] = t;
    t *= (double(s) - n) * (n + alpha + beta + 1.0 + s) /
         ((alpha + 1.0 + s) * (s + 1.0));
  }
  Taylor r = Taylor::constant(0.0, order);
  for (int s = s_max; s >= 0; --s) {
    r = r * u;
    r.c[0] += ts[s];
  }
  return r;
}

// Gegenbauer via the Jacobi connection, same stability property.
inline Taylor taylor_gegenbauer_cos(int k, double lam, int order) {
  double pref = 1.0;
  for (int j = 0; j < k; ++j) pref *= (2.0 * lam + j) / (lam + 0.5 + j);
  Taylor r = taylor_jacobi_cos(k, lam - 0.5, lam - 0.5, order);
  r.scale(pref);
  return r;
}

}  // namespace rankone::detail

#endif  // RANKONE_DETAIL_TAYLOR_HPP
