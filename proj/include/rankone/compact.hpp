#ifndef RANKONE_COMPACT_HPP
#define RANKONE_COMPACT_HPP

// Trigonometric Jacobi analysis on (0,pi): orthonormal expansions in
// C(alpha,beta,n) P_n^{(alpha,beta)}(cos theta), the associated
// Sturm-Liouville operator, and its spectral action.

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "rankone/specfun.hpp"

namespace rankone::compact {

struct Params {
  double alpha;
  double beta;

  Params(double alpha_, double beta_) : alpha(alpha_), beta(beta_) {
    if (!(alpha > -1.0) || !(beta > -1.0))
      throw std::invalid_argument("compact::Params: alpha, beta must be > -1");
  }

  double shift() const { return 0.5 * (alpha + beta + 1.0); }
  // eigenvalue of the Jacobi operator on the degree-n basis element
  double mu(int n) const {
    const double s = n + shift();
    return s * s;
  }
};

// weight (sin t/2)^{2a+1} (cos t/2)^{2b+1} on the open interval
inline double trig_weight(double theta, const Params& p) {
  if (!(theta > 0.0 && theta < std::numbers::pi))
    throw std::domain_error("trig_weight: theta must lie in (0,pi)");
  return std::pow(std::sin(0.5 * theta), 2.0 * p.alpha + 1.0) *
         std::pow(std::cos(0.5 * theta), 2.0 * p.beta + 1.0);
}

// Quadrature for integrals against the trigonometric weight:
//   int_0^pi h(theta) w~(theta) dtheta  ~=  sum_i weights[i] h(theta[i]).
// max_degree is the largest polynomial degree (in cos theta) the grid is
// designed to analyze exactly.
struct Grid {
  Params params;
  std::vector<double> theta;    // strictly increasing, interior points only
  std::vector<double> weights;  // positive
  int max_degree;
};

// Gauss-Jacobi nodes mapped through x = cos theta. The theta <-> x change
// of variables sends w~(theta) dtheta to 2^{-(a+b+1)} (1-x)^a (1+x)^b dx.
inline Grid make_grid(const Params& p, int max_degree) {
  if (max_degree < 0) throw std::invalid_argument("make_grid: max_degree >= 0");
  const int order = max_degree + 1;
  const auto rule = specfun::gauss_jacobi_rule(order, p.alpha, p.beta);
  const double scale = std::pow(2.0, -(p.alpha + p.beta + 1.0));
  Grid g{p, {}, {}, max_degree};
  g.theta.resize(order);
  g.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    // x ascending -> theta descending; store theta ascending
    g.theta[i] = std::acos(rule.nodes[order - 1 - i]);
    g.weights[i] = scale * rule.weights[order - 1 - i];
  }
  return g;
}

// orthonormal basis element evaluated pointwise
inline double basis(const Params& p, int n, double theta) {
  return specfun::norm_constant(p.alpha, p.beta, n) *
         specfun::jacobi_poly(n, p.alpha, p.beta, std::cos(theta));
}

struct CoefficientSequence {
  Params params;
  std::vector<double> values;  // c_0 .. c_N

  int degree() const { return static_cast<int>(values.size()) - 1; }
};

namespace detail {
// values of the orthonormal basis at one point for n = 0..n_max
inline void basis_column(const Params& p, int n_max, double x,
                         std::vector<double>& out) {
  out.resize(static_cast<size_t>(n_max) + 1);
  const double alpha = p.alpha, beta = p.beta, ab = alpha + beta;
  out[0] = 1.0;
  if (n_max >= 1) out[1] = (alpha + 1.0) + 0.5 * (ab + 2.0) * (x - 1.0);
  for (int k = 2; k <= n_max; ++k) {
    const double denom = 2.0 * k * (k + ab) * (2.0 * k + ab - 2.0);
    const double g1 = (2.0 * k + ab - 1.0) *
                      ((2.0 * k + ab) * (2.0 * k + ab - 2.0) * x +
                       alpha * alpha - beta * beta);
    const double g0 =
        -2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * (2.0 * k + ab);
    out[k] = (g1 * out[k - 1] + g0 * out[k - 2]) / denom;
  }
  for (int n = 0; n <= n_max; ++n)
    out[n] *= specfun::norm_constant(alpha, beta, n);
}
}  // namespace detail

// Fourier-Jacobi coefficients of samples given on the grid's nodes,
// for all degrees n = 0..n_max in one sweep.
inline CoefficientSequence analyze(const Grid& g, std::span<const double> f,
                                   int n_max) {
  if (f.size() != g.theta.size())
    throw std::invalid_argument("analyze: sample count != grid size");
  if (n_max > g.max_degree)
    throw std::invalid_argument(
        "analyze: quadrature order insufficient for requested degree");
  CoefficientSequence c{g.params, std::vector<double>(n_max + 1, 0.0)};
  std::vector<double> col;
  for (size_t i = 0; i < g.theta.size(); ++i) {
    detail::basis_column(g.params, n_max, std::cos(g.theta[i]), col);
    const double wf = g.weights[i] * f[i];
    for (int n = 0; n <= n_max; ++n) c.values[n] += wf * col[n];
  }
  return c;
}

inline double coeff(const Grid& g, std::span<const double> f, int n) {
  if (n < 0) throw std::invalid_argument("coeff: n >= 0");
  if (n > g.max_degree)
    throw std::invalid_argument(
        "coeff: quadrature order insufficient for requested degree");
  if (f.size() != g.theta.size())
    throw std::invalid_argument("coeff: sample count != grid size");
  double acc = 0.0;
  for (size_t i = 0; i < g.theta.size(); ++i)
    acc += g.weights[i] * f[i] * basis(g.params, n, g.theta[i]);
  return acc;
}

inline std::vector<double> synthesize(const CoefficientSequence& c,
                                      std::span<const double> theta) {
  std::vector<double> out(theta.size(), 0.0);
  std::vector<double> col;
  const int n_max = c.degree();
  for (size_t i = 0; i < theta.size(); ++i) {
    detail::basis_column(c.params, n_max, std::cos(theta[i]), col);
    double acc = 0.0;
    for (int n = 0; n <= n_max; ++n) acc += c.values[n] * col[n];
    out[i] = acc;
  }
  return out;
}

// | int |f|^2 w~ dtheta - sum_{n<=N} |Jf(n)|^2 |
inline double plancherel_defect(const Grid& g, std::span<const double> f,
                                int N) {
  double lhs = 0.0;
  for (size_t i = 0; i < f.size(); ++i) lhs += g.weights[i] * f[i] * f[i];
  const auto c = analyze(g, f, N);
  double rhs = 0.0;
  for (double v : c.values) rhs += v * v;
  return std::abs(lhs - rhs);
}

// spectral action of the m-th operator power: c_n -> mu_n^m c_n
inline CoefficientSequence apply_L_spectral(CoefficientSequence c, int m) {
  if (m < 0) throw std::invalid_argument("apply_L_spectral: m >= 0");
  for (int n = 0; n <= c.degree(); ++n)
    c.values[n] *= std::pow(c.params.mu(n), m);
  return c;
}

// Grid application of the Sturm-Liouville operator
//   L f = -f'' - [(a-b+(a+b+1) cos t)/sin t] f' + shift^2 f
// with derivatives taken termwise on the Jacobi expansion. In x = cos t the
// action on each P_n reduces to [(a+b+2)x + a-b] P_n' - (1-x^2) P_n'' +
// shift^2 P_n, and P_n', P_n'' are shifted-parameter Jacobi polynomials.
inline std::vector<double> operator_grid_apply(const Grid& g,
                                               std::span<const double> f) {
  const auto c = analyze(g, f, g.max_degree);
  const double a = g.params.alpha, b = g.params.beta;
  const double s2 = g.params.shift() * g.params.shift();
  std::vector<double> out(g.theta.size(), 0.0);
  for (size_t i = 0; i < g.theta.size(); ++i) {
    const double x = std::cos(g.theta[i]);
    double acc = 0.0;
    for (int n = 0; n <= c.degree(); ++n) {
      const double cn = c.values[n] * specfun::norm_constant(a, b, n);
      if (cn == 0.0) continue;
      const double p = specfun::jacobi_poly(n, a, b, x);
      const double dp =
          n >= 1 ? 0.5 * (n + a + b + 1.0) *
                       specfun::jacobi_poly(n - 1, a + 1.0, b + 1.0, x)
                 : 0.0;
      const double d2p =
          n >= 2 ? 0.25 * (n + a + b + 1.0) * (n + a + b + 2.0) *
                       specfun::jacobi_poly(n - 2, a + 2.0, b + 2.0, x)
                 : 0.0;
      acc += cn * (((a + b + 2.0) * x + a - b) * dp - (1.0 - x * x) * d2p +
                   s2 * p);
    }
    out[i] = acc;
  }
  return out;
}

}  // namespace rankone::compact

#endif  // RANKONE_COMPACT_HPP
