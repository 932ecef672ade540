#ifndef RANKONE_NONCOMPACT_HPP
#define RANKONE_NONCOMPACT_HPP

// Jacobi analysis on the half-line: Jacobi functions as solutions of the
// hyperbolic Jacobi ODE, the Fourier-Jacobi transform and its inverse, the
// Harish-Chandra c-function, Kostant polynomials, spherical functions of a
// given K-type, and the spectral domination inequalities they satisfy.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "rankone/specfun.hpp"

namespace rankone::noncompact {

using cplx = std::complex<double>;

struct Params {
  double alpha;
  double beta;
  // set when constructed from root multiplicities (m_gamma, m_2gamma)
  std::optional<std::pair<double, double>> multiplicities;

  Params(double alpha_, double beta_) : alpha(alpha_), beta(beta_) {
    if (!(alpha > -1.0))
      throw std::invalid_argument("noncompact::Params: alpha must be > -1");
    if (!(std::abs(beta) <= alpha + 1.0))
      throw std::invalid_argument(
          "noncompact::Params: |beta| must be <= alpha + 1");
  }

  static Params from_multiplicities(double m_gamma, double m_2gamma) {
    if (m_gamma < 0.0 || m_2gamma < 0.0)
      throw std::invalid_argument("multiplicities must be nonnegative");
    Params p(0.5 * (m_gamma + m_2gamma - 1.0), 0.5 * (m_2gamma - 1.0));
    p.multiplicities = {m_gamma, m_2gamma};
    return p;
  }

  // spectral shift entering every multiplier
  double varrho() const { return alpha + beta + 1.0; }
  // half sum of roots with multiplicities; provenance only, never used in
  // spectral formulas (it differs from varrho when m_2gamma != 1)
  std::optional<double> rho_paper() const {
    if (!multiplicities) return std::nullopt;
    return 0.5 * (multiplicities->first + multiplicities->second);
  }
};

inline double weight_w(double r, const Params& p) {
  if (!(r > 0.0)) throw std::domain_error("weight_w: r must be > 0");
  return std::pow(2.0 * std::sinh(r), 2.0 * p.alpha + 1.0) *
         std::pow(2.0 * std::cosh(r), 2.0 * p.beta + 1.0);
}

namespace detail {

// Coefficients g_n of r * [(2a+1) coth r + (2b+1) tanh r] = sum g_n r^{2n},
// obtained from the power series of cosh/sinh by polynomial division.
inline std::vector<double> coth_tanh_coeffs(double alpha, double beta,
                                            int n_max) {
  std::vector<double> s(n_max + 1), c(n_max + 1);
  double fs = 1.0, fc = 1.0;  // 1/(2j+1)!, 1/(2j)!
  for (int j = 0; j <= n_max; ++j) {
    s[j] = fs;
    c[j] = fc;
    fs /= (2.0 * j + 2.0) * (2.0 * j + 3.0);
    fc /= (2.0 * j + 1.0) * (2.0 * j + 2.0);
  }
  std::vector<double> h(n_max + 1), u(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    double hv = c[n], uv = s[n];
    for (int j = 1; j <= n; ++j) {
      hv -= s[j] * h[n - j];  // r coth r = cosh / (sinh/r)
      uv -= c[j] * u[n - j];  // (tanh r)/r = (sinh/r) / cosh
    }
    h[n] = hv;
    u[n] = uv;
  }
  std::vector<double> g(n_max + 1, 0.0);
  g[0] = 2.0 * alpha + 1.0;
  for (int n = 1; n <= n_max; ++n)
    g[n] = (2.0 * alpha + 1.0) * h[n] + (2.0 * beta + 1.0) * u[n - 1];
  return g;
}

}  // namespace detail

// Even-power Frobenius coefficients c_k of the regular solution
// phi(r) = sum_k c_k r^{2k} of (L_{a,b} + lam^2 + rho^2) phi = 0, phi(0)=1.
// Regularity at the singular point forces phi'(0) = 0.
inline std::vector<double> jacobi_series_coeffs(double lam, const Params& p,
                                                int n_terms) {
  if (n_terms < 1) throw std::invalid_argument("jacobi_series_coeffs: n >= 1");
  const double mu = lam * lam + p.varrho() * p.varrho();
  const auto g = detail::coth_tanh_coeffs(p.alpha, p.beta, n_terms);
  std::vector<double> c(n_terms, 0.0);
  c[0] = 1.0;
  for (int k = 1; k < n_terms; ++k) {
    double rhs = mu * c[k - 1];
    for (int n = 1; n < k; ++n) rhs += 2.0 * (k - n) * g[n] * c[k - n];
    c[k] = -rhs / (4.0 * k * (k + p.alpha));
  }
  return c;
}

namespace detail {

struct SeriesEval {
  double value;
  double deriv;
};

inline SeriesEval eval_series(const std::vector<double>& c, double r) {
  const double r2 = r * r;
  double v = 0.0, d = 0.0;
  for (size_t k = c.size(); k-- > 0;) {
    v = v * r2 + c[k];
    if (k >= 1) d = d * r2 + 2.0 * static_cast<double>(k) * c[k];
  }
  return {v, d * r};
}

inline int series_terms_for(double lam, double r0) {
  // enough terms that the cos-like tail (lam*r0)^{2k}/(2k)! is negligible
  const double x = std::abs(lam) * r0;
  return std::max(20, static_cast<int>(std::ceil(1.5 * x + 24.0)));
}

}  // namespace detail

// Jacobi function phi_lam^{(alpha,beta)} at the (ascending) points of
// r_grid: Frobenius series on [0, r0], matched to adaptive Runge-Kutta
// (dopri5, tolerance 1e-12) beyond. Depends on lam only through lam^2.
inline std::vector<double> jacobi_profile(double lam, const Params& p,
                                          std::span<const double> r_grid) {
  namespace ode = boost::numeric::odeint;
  for (size_t i = 0; i < r_grid.size(); ++i) {
    if (r_grid[i] < 0.0)
      throw std::invalid_argument("jacobi_profile: r must be >= 0");
    if (i > 0 && !(r_grid[i] >= r_grid[i - 1]))
      throw std::invalid_argument("jacobi_profile: r grid must be ascending");
  }
  const double mu = lam * lam + p.varrho() * p.varrho();
  double r0 = std::min(0.1, 1.0 / std::max(1.0, std::abs(lam)));
  const auto coeffs =
      jacobi_series_coeffs(lam, p, detail::series_terms_for(lam, r0));

  std::vector<double> out(r_grid.size());
  size_t split = 0;
  while (split < r_grid.size() && r_grid[split] <= r0) {
    out[split] = detail::eval_series(coeffs, r_grid[split]).value;
    ++split;
  }
  if (split == r_grid.size()) return out;

  using State = std::array<double, 2>;
  const double a = p.alpha, b = p.beta;
  auto rhs = [&](const State& y, State& dy, double r) {
    const double coef =
        (2.0 * a + 1.0) / std::tanh(r) + (2.0 * b + 1.0) * std::tanh(r);
    dy[0] = y[1];
    dy[1] = -coef * y[1] - mu * y[0];
  };

  const auto init = detail::eval_series(coeffs, r0);
  State y{init.value, init.deriv};
  auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<State>>(1e-12, 1e-12);
  double r_cur = r0;
  for (size_t i = split; i < r_grid.size(); ++i) {
    const double r_next = r_grid[i];
    if (r_next > r_cur) {
      ode::integrate_adaptive(stepper, rhs, y, r_cur, r_next,
                              std::min(1e-3, r_next - r_cur));
      r_cur = r_next;
    }
    out[i] = y[0];
  }
  return out;
}

inline double jacobi_function(double lam, const Params& p, double r) {
  const std::array<double, 1> grid{r};
  return jacobi_profile(lam, p, grid)[0];
}

// log |c_{alpha,beta}(lam)|^2, entirely in log space (usable for lam where
// |Gamma(i lam)| is far below the double range).
inline double log_c_abs2(double lam, const Params& p) {
  if (!(lam > 0.0))
    throw std::domain_error("c_function: lam must be > 0 (Gamma(i lam) pole)");
  const cplx il(0.0, lam);
  const double rho = p.varrho();
  const cplx lg = specfun::log_gamma(il) + specfun::log_gamma(cplx(p.alpha + 1.0, 0.0)) -
                  specfun::log_gamma(0.5 * (il + rho)) -
                  specfun::log_gamma(0.5 * (il + p.alpha - p.beta + 1.0));
  return 2.0 * (rho * std::numbers::ln2 + lg.real());
}

// Harish-Chandra c-function via the Gamma-ratio formula.
inline cplx c_function(double lam, const Params& p) {
  if (!(lam > 0.0))
    throw std::domain_error("c_function: lam must be > 0 (Gamma(i lam) pole)");
  const cplx il(0.0, lam);
  const double rho = p.varrho();
  const cplx log_c = (rho - il) * std::numbers::ln2 +
                     specfun::log_gamma(cplx(p.alpha + 1.0, 0.0)) +
                     specfun::log_gamma(il) -
                     specfun::log_gamma(0.5 * (il + rho)) -
                     specfun::log_gamma(0.5 * (il + p.alpha - p.beta + 1.0));
  return std::exp(log_c);
}

// Plancherel density |c(lam)|^{-2}
inline double c_inv_sq(double lam, const Params& p) {
  return std::exp(-log_c_abs2(lam, p));
}

// Panelwise Gauss-Legendre grid on [a,b]; nodes strictly inside.
struct Grid1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline Grid1D panel_gauss_legendre(double a, double b, int panels,
                                   int per_panel) {
  if (!(b > a) || panels < 1 || per_panel < 1)
    throw std::invalid_argument("panel_gauss_legendre: bad arguments");
  const auto base = specfun::gauss_jacobi_rule(per_panel, 0.0, 0.0);
  Grid1D g;
  g.nodes.reserve(static_cast<size_t>(panels) * per_panel);
  g.weights.reserve(static_cast<size_t>(panels) * per_panel);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (int i = 0; i < per_panel; ++i) {
      g.nodes.push_back(lo + 0.5 * h * (base.nodes[i] + 1.0));
      g.weights.push_back(0.5 * h * base.weights[i]);
    }
  }
  return g;
}

struct RadialFunction {
  Params params;
  Grid1D grid;  // r in (0, R]
  std::vector<cplx> values;
};

struct SpectralDensity {
  Params params;
  Grid1D grid;  // lam in (0, Lambda]
  std::vector<cplx> values;
};

// J f(lam) = int_0^R f(r) phi_lam(r) w(r) dr on the given lam grid.
inline SpectralDensity forward_transform(const RadialFunction& f,
                                         const Grid1D& lam_grid) {
  if (f.grid.nodes.empty() || f.values.size() != f.grid.nodes.size())
    throw std::invalid_argument("forward_transform: empty or inconsistent f");
  if (lam_grid.nodes.empty())
    throw std::invalid_argument("forward_transform: empty lambda grid");
  std::vector<double> wv(f.grid.nodes.size());
  for (size_t i = 0; i < wv.size(); ++i)
    wv[i] = f.grid.weights[i] * weight_w(f.grid.nodes[i], f.params);
  SpectralDensity out{f.params, lam_grid, {}};
  out.values.resize(lam_grid.nodes.size());
  for (size_t j = 0; j < lam_grid.nodes.size(); ++j) {
    const auto phi = jacobi_profile(lam_grid.nodes[j], f.params, f.grid.nodes);
    cplx acc(0.0, 0.0);
    for (size_t i = 0; i < wv.size(); ++i) acc += wv[i] * phi[i] * f.values[i];
    out.values[j] = acc;
  }
  return out;
}

// f(r) = (1/2pi) int_0^Lambda g(lam) phi_lam(r) |c(lam)|^{-2} dlam.
inline RadialFunction inverse_transform(const SpectralDensity& g,
                                        const Grid1D& r_grid) {
  if (g.grid.nodes.empty() || g.values.size() != g.grid.nodes.size())
    throw std::invalid_argument("inverse_transform: empty or inconsistent g");
  if (r_grid.nodes.empty())
    throw std::invalid_argument("inverse_transform: empty r grid");
  RadialFunction out{g.params, r_grid, {}};
  out.values.assign(r_grid.nodes.size(), cplx(0.0, 0.0));
  const double inv2pi = 1.0 / (2.0 * std::numbers::pi);
  for (size_t j = 0; j < g.grid.nodes.size(); ++j) {
    const double lam = g.grid.nodes[j];
    const auto phi = jacobi_profile(lam, g.params, r_grid.nodes);
    const cplx factor =
        inv2pi * g.grid.weights[j] * c_inv_sq(lam, g.params) * g.values[j];
    for (size_t i = 0; i < r_grid.nodes.size(); ++i)
      out.values[i] += factor * phi[i];
  }
  return out;
}

// | int |f|^2 w dr - (2 pi)^{-1} int |Jf|^2 |c|^{-2} dlam |, the lambda
// integral extended panel by panel until its tail is negligible. The
// (2 pi)^{-1} makes the spectral measure the one the inversion formula
// integrates against; the cosine-transform limit fixes the constant.
inline double plancherel_defect(const RadialFunction& f,
                                double lambda_cap = 80.0) {
  double lhs = 0.0;
  for (size_t i = 0; i < f.values.size(); ++i)
    lhs += f.grid.weights[i] * std::norm(f.values[i]) *
           weight_w(f.grid.nodes[i], f.params);

  double rhs = 0.0;
  const double panel = 2.0;
  const double inv2pi = 1.0 / (2.0 * std::numbers::pi);
  int quiet = 0;
  // Stop once two consecutive panels fall below the budget: past the band
  // edge the true tail is negligible, and pushing further only accumulates
  // radial-quadrature noise at frequencies the r grid cannot resolve.
  for (double lo = 0.0; lo < lambda_cap && quiet < 2; lo += panel) {
    const auto grid = panel_gauss_legendre(lo, lo + panel, 2, 10);
    const auto spec = forward_transform(f, grid);
    double contrib = 0.0;
    for (size_t j = 0; j < grid.nodes.size(); ++j)
      contrib += inv2pi * grid.weights[j] * std::norm(spec.values[j]) *
                 c_inv_sq(grid.nodes[j], f.params);
    rhs += contrib;
    quiet = (contrib <= 1e-13 * (lhs + rhs)) ? quiet + 1 : 0;
  }
  return std::abs(lhs - rhs);
}

// pointwise multiplication by (lam^2 + rho^2)^m
inline SpectralDensity apply_L_spectral(SpectralDensity g, int m) {
  if (m < 0) throw std::invalid_argument("apply_L_spectral: m >= 0");
  const double rho2 = g.params.varrho() * g.params.varrho();
  for (size_t j = 0; j < g.values.size(); ++j)
    g.values[j] *= std::pow(g.grid.nodes[j] * g.grid.nodes[j] + rho2, m);
  return g;
}

// K-type label (p,q): both Pochhammer lengths (p+-q)/2 must be nonnegative
// integers.
struct KType {
  int p;
  int q;

  KType(int p_, int q_) : p(p_), q(q_) {
    if (p < 0 || (p + q) % 2 != 0 || p + q < 0 || p - q < 0)
      throw std::invalid_argument(
          "KType: (p+q)/2 and (p-q)/2 must be nonnegative integers");
  }
  int len_plus() const { return (p + q) / 2; }
  int len_minus() const { return (p - q) / 2; }
};

// Q_delta(i lam + rho) as a product of two Pochhammer symbols.
inline cplx kostant_Q(const KType& d, double lam, const Params& p) {
  const cplx il(0.0, lam);
  return specfun::pochhammer(0.5 * (p.alpha + p.beta + 1.0 + il), d.len_plus()) *
         specfun::pochhammer(0.5 * (p.alpha - p.beta + 1.0 + il), d.len_minus());
}

inline double log_abs_kostant_Q(const KType& d, double lam, const Params& p) {
  const cplx il(0.0, lam);
  return specfun::log_abs_pochhammer(0.5 * (p.alpha + p.beta + 1.0 + il),
                                     d.len_plus()) +
         specfun::log_abs_pochhammer(0.5 * (p.alpha - p.beta + 1.0 + il),
                                     d.len_minus());
}

inline Params shifted(const Params& p, const KType& d) {
  return Params(p.alpha + d.p, p.beta + d.q);
}

// Spherical function of type delta:
//   Q_delta(i lam + rho) (alpha+1)_p^{-1} (sinh r)^p (cosh r)^q
//     phi_lam^{(alpha+p, beta+q)}(r)
inline cplx spherical_fn_delta(double lam, const KType& d, const Params& p,
                               double r) {
  const double phi = jacobi_function(lam, shifted(p, d), r);
  const double pref = std::pow(std::sinh(r), d.p) * std::pow(std::cosh(r), d.q) /
                      specfun::pochhammer(p.alpha + 1.0, d.p);
  return kostant_Q(d, lam, p) * pref * phi;
}

// Raw ratio statistic of the c-function shift identity,
//   R(lam) = |c_{a,b}|^2 / |c_{a+p,b+q}|^2 * |Q_delta|^{-2}.
// Exact Gamma algebra makes this constant in lam, equal to
// 4^{-(p+q)} (alpha+1)_p^{-2}; evaluating both sides through the two
// independent code paths (log-Gamma vs Pochhammer product) is the check.
inline double c_ratio_stat(double lam, const Params& p, const KType& d) {
  const double log_r = log_c_abs2(lam, p) - log_c_abs2(lam, shifted(p, d)) -
                       2.0 * log_abs_kostant_Q(d, lam, p);
  return std::exp(log_r);
}

// Same statistic normalized by its closed-form value, so the large-lambda
// limit is 1. This is the bounded ratio of the c-function estimate.
inline double c_ratio_normalized(double lam, const Params& p, const KType& d) {
  const double log_norm =
      (d.p + d.q) * 2.0 * std::numbers::ln2 +
      2.0 * std::log(specfun::pochhammer(p.alpha + 1.0, d.p));
  return std::exp(std::log(c_ratio_stat(lam, p, d)) + log_norm);
}

// sup of the raw ratio over a log grid joined with extra nodes
inline double c_ratio_sup(const Params& p, const KType& d,
                          std::span<const double> extra_nodes = {},
                          double lam_lo = 0.01, double lam_hi = 1e3,
                          int grid_points = 200) {
  double sup = 0.0;
  const double step = std::log(lam_hi / lam_lo) / (grid_points - 1);
  for (int i = 0; i < grid_points; ++i) {
    const double lam = lam_lo * std::exp(i * step);
    sup = std::max(sup, c_ratio_stat(lam, p, d));
  }
  for (double lam : extra_nodes)
    if (lam > 0.0) sup = std::max(sup, c_ratio_stat(lam, p, d));
  return sup;
}

struct DominationCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // lhs / rhs, defined as 0 when both vanish
};

// The norm-domination inequality for a K-type delta and operator power m:
//   lhs = ( int (lam^2+rho_d^2)^{2m} |G|^2 |Q|^{-2} |c_{a+p,b+q}|^{-2} )^{1/2}
//   rhs = C1^m ( int (lam^2+rho^2)^{2m} |G|^2 |c_{a,b}|^{-2} )^{1/2}
// with rho_d = a+b+p+q+1 and C1 = (rho_d/rho)^2 * max(1, sup R). The max
// with 1 makes lhs <= rhs a theorem of the quadrature, not an aspiration.
inline DominationCheck step2_inequality_check(const SpectralDensity& G,
                                              const KType& d, int m) {
  if (m < 1) throw std::invalid_argument("step2_inequality_check: m >= 1");
  const Params sh = shifted(G.params, d);
  const double rho = G.params.varrho();
  const double rho_d = sh.varrho();
  const double c_ab = (rho_d * rho_d) / (rho * rho);
  const double c1 =
      c_ab * std::max(1.0, c_ratio_sup(G.params, d, G.grid.nodes));

  double lhs2 = 0.0, rhs2 = 0.0;
  for (size_t j = 0; j < G.grid.nodes.size(); ++j) {
    const double lam = G.grid.nodes[j];
    const double mass = G.grid.weights[j] * std::norm(G.values[j]);
    if (mass == 0.0) continue;
    lhs2 += mass * std::pow(lam * lam + rho_d * rho_d, 2.0 * m) *
            std::exp(-2.0 * log_abs_kostant_Q(d, lam, G.params) -
                     log_c_abs2(lam, sh));
    rhs2 += mass * std::pow(lam * lam + rho * rho, 2.0 * m) *
            std::exp(-log_c_abs2(lam, G.params));
  }
  DominationCheck out;
  out.lhs = std::sqrt(lhs2);
  out.rhs = std::pow(c1, m) * std::sqrt(rhs2);
  out.ratio = (out.rhs == 0.0) ? 0.0 : out.lhs / out.rhs;
  return out;
}

}  // namespace rankone::noncompact

#endif  // RANKONE_NONCOMPACT_HPP
