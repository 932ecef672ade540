#ifndef RANKONE_SPHERE_HPP
#define RANKONE_SPHERE_HPP

// Geodesic-polar analysis on S^q and on the rank-one projective models:
// the degree/fiber basis S_{n,l,k} with its normalizing constant, slicewise
// decomposition through Jacobi coefficients, the even (antipodal) lift, and
// the Q_{n,j,l} basis on (0,pi) x S^q for the complex, quaternionic and
// octonionic projective families.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "rankone/compact.hpp"
#include "rankone/specfun.hpp"

namespace rankone::sphere {

struct FiberMode {
  int l;  // harmonic degree on the fiber sphere
  int k;  // index within that degree
  friend bool operator==(const FiberMode&, const FiberMode&) = default;
};

// Discretized S^q in polar coordinates (theta, xi'), theta in (0,pi) and
// xi' on S^{q-1}. Inner products use
//   int_0^pi int (sin theta)^{q-1} dsigma_{q-1} dtheta
// with the fiber measure normalized to total mass 1.
struct SphereModel {
  int q = 2;
  int max_degree = 0;
  std::vector<double> theta;         // ascending, interior
  std::vector<double> theta_weight;  // integrates h (sin theta)^{q-1} dtheta
  std::vector<FiberMode> modes;
  std::vector<double> fiber_weight;               // normalized, sum = 1
  std::vector<std::vector<double>> fiber_values;  // [mode][node]
  std::vector<double> fiber_angle;                // q = 2 only: node angles
  std::vector<int> antipode;  // fiber node index of -xi'; empty if unknown

  int n_theta() const { return static_cast<int>(theta.size()); }
  int n_fiber() const { return static_cast<int>(fiber_weight.size()); }

  int mode_index(int l, int k) const {
    for (size_t m = 0; m < modes.size(); ++m)
      if (modes[m].l == l && modes[m].k == k) return static_cast<int>(m);
    return -1;
  }
};

namespace detail {
inline void fill_theta_grid(int q, int max_degree, std::vector<double>& theta,
                            std::vector<double>& weight) {
  const int order = max_degree + 1;
  const double e = 0.5 * q - 1.0;
  const auto rule = specfun::gauss_jacobi_rule(order, e, e);
  theta.resize(order);
  weight.resize(order);
  for (int i = 0; i < order; ++i) {
    theta[i] = std::acos(rule.nodes[order - 1 - i]);
    weight[i] = rule.weights[order - 1 - i];
  }
}
}  // namespace detail

// q = 2: circular harmonics {1, sqrt2 cos l phi, sqrt2 sin l phi} on a
// uniform (even) angular grid. q >= 3: zonal slice only.
inline std::shared_ptr<const SphereModel> make_sphere_model(int q,
                                                            int max_degree,
                                                            int fiber_l_max,
                                                            int fiber_nodes = 0) {
  if (q < 2) throw std::invalid_argument("make_sphere_model: q >= 2");
  if (max_degree < 0)
    throw std::invalid_argument("make_sphere_model: max_degree >= 0");
  auto m = std::make_shared<SphereModel>();
  m->q = q;
  m->max_degree = max_degree;
  detail::fill_theta_grid(q, max_degree, m->theta, m->theta_weight);

  if (q == 2) {
    int J = fiber_nodes > 0 ? fiber_nodes : std::max(2 * fiber_l_max + 2, 8);
    if (J % 2 != 0) ++J;
    m->fiber_weight.assign(J, 1.0 / J);
    m->fiber_angle.resize(J);
    m->antipode.resize(J);
    for (int j = 0; j < J; ++j) {
      m->fiber_angle[j] = 2.0 * std::numbers::pi * j / J;
      m->antipode[j] = (j + J / 2) % J;
    }
    for (int l = 0; l <= fiber_l_max; ++l) {
      const int nk = (l == 0) ? 1 : 2;
      for (int k = 1; k <= nk; ++k) {
        m->modes.push_back({l, k});
        std::vector<double> row(J);
        for (int j = 0; j < J; ++j) {
          const double phi = m->fiber_angle[j];
          row[j] = (l == 0) ? 1.0
                   : (k == 1 ? std::numbers::sqrt2 * std::cos(l * phi)
                             : std::numbers::sqrt2 * std::sin(l * phi));
        }
        m->fiber_values.push_back(std::move(row));
      }
    }
  } else {
    if (fiber_l_max != 0)
      throw std::invalid_argument(
          "make_sphere_model: q >= 3 supports the zonal fiber only; supply a "
          "fiber-basis table for more modes");
    m->modes.push_back({0, 1});
    m->fiber_weight.assign(1, 1.0);
    m->fiber_values.push_back({1.0});
    m->antipode.assign(1, 0);
  }
  return m;
}

// User-supplied orthonormal fiber basis sampled on arbitrary nodes of
// S^{q-1}: per-node quadrature weights (normalized here), the harmonic
// degree of each column, and the column samples.
struct FiberTable {
  std::vector<double> weights;              // one per node
  std::vector<int> degrees;                 // one per column
  std::vector<std::vector<double>> values;  // values[node][column]
};

inline std::shared_ptr<const SphereModel> make_sphere_model_custom(
    int q, int max_degree, const FiberTable& table) {
  if (q < 3)
    throw std::invalid_argument("make_sphere_model_custom: intended for q >= 3");
  const size_t nodes = table.weights.size();
  const size_t cols = table.degrees.size();
  if (nodes == 0 || cols == 0 || table.values.size() != nodes)
    throw std::invalid_argument("make_sphere_model_custom: malformed table");
  for (const auto& row : table.values)
    if (row.size() != cols)
      throw std::invalid_argument("make_sphere_model_custom: ragged table");

  auto m = std::make_shared<SphereModel>();
  m->q = q;
  m->max_degree = max_degree;
  detail::fill_theta_grid(q, max_degree, m->theta, m->theta_weight);
  double mass = 0.0;
  for (double w : table.weights) {
    if (!(w > 0.0))
      throw std::invalid_argument("make_sphere_model_custom: weights > 0");
    mass += w;
  }
  m->fiber_weight.resize(nodes);
  for (size_t j = 0; j < nodes; ++j) m->fiber_weight[j] = table.weights[j] / mass;
  std::map<int, int> seen;
  for (size_t c = 0; c < cols; ++c) {
    const int l = table.degrees[c];
    if (l < 0)
      throw std::invalid_argument("make_sphere_model_custom: degree >= 0");
    m->modes.push_back({l, ++seen[l]});
    std::vector<double> row(nodes);
    for (size_t j = 0; j < nodes; ++j) row[j] = table.values[j][c];
    m->fiber_values.push_back(std::move(row));
  }
  return m;
}

// normalizing constant of S_{n,l,k}, in log-Gamma arithmetic
inline double a_nl(int q, int n, int l) {
  if (l < 0 || n < l) throw std::invalid_argument("a_nl: need n >= l >= 0");
  const double e = l + 0.5 * q - 1.0;
  const double log_a = -(l + 0.5 * (q - 1.0)) * std::numbers::ln2 +
                       specfun::log_gamma_real(2.0 * l + q - 1.0) +
                       specfun::log_gamma_real(n + 0.5 * q) -
                       specfun::log_gamma_real(l + 0.5 * q) -
                       specfun::log_gamma_real(n + l + q - 1.0) +
                       specfun::log_norm_constant({n - l, e, e});
  return std::exp(log_a);
}

// theta profile of S_{deg,l,.}: a_{deg,l} (sin theta)^l C_{deg-l}^{l+(q-1)/2}
inline double basis_theta(int q, int deg, int l, double theta) {
  return a_nl(q, deg, l) * std::pow(std::sin(theta), l) *
         specfun::gegenbauer(deg - l, l + 0.5 * (q - 1.0), std::cos(theta));
}

inline double basis_S_node(const SphereModel& m, int deg, int l, int k,
                           double theta, int fiber_node) {
  const int mode = m.mode_index(l, k);
  if (mode < 0 || deg < l)
    throw std::invalid_argument("basis_S_node: invalid (deg,l,k)");
  return basis_theta(m.q, deg, l, theta) * m.fiber_values[mode][fiber_node];
}

// continuous version for q = 2, xi' given by its angle
inline double basis_S(const SphereModel& m, int deg, int l, int k,
                      double theta, double phi) {
  if (m.q != 2)
    throw std::invalid_argument("basis_S(angle): only for q = 2 models");
  if (m.mode_index(l, k) < 0 || deg < l)
    throw std::invalid_argument("basis_S: invalid (deg,l,k)");
  const double fib = (l == 0) ? 1.0
                     : (k == 1 ? std::numbers::sqrt2 * std::cos(l * phi)
                               : std::numbers::sqrt2 * std::sin(l * phi));
  return basis_theta(m.q, deg, l, theta) * fib;
}

struct PolarFunction {
  std::shared_ptr<const SphereModel> model;
  std::vector<double> data;  // row-major [theta][fiber node]

  double& at(int i, int j) { return data[static_cast<size_t>(i) * model->n_fiber() + j]; }
  double at(int i, int j) const {
    return data[static_cast<size_t>(i) * model->n_fiber() + j];
  }
};

inline PolarFunction make_polar_function(std::shared_ptr<const SphereModel> m) {
  PolarFunction f{std::move(m), {}};
  f.data.assign(static_cast<size_t>(f.model->n_theta()) * f.model->n_fiber(), 0.0);
  return f;
}

struct Key {
  int deg;
  int l;  // fiber degree (sphere) or half-power j (projective)
  int k;
  friend auto operator<=>(const Key&, const Key&) = default;
};

struct HarmonicCoefficients {
  int q = 2;
  std::map<Key, double> values;
};

// F_{k,l}(theta_i) by fiber quadrature
inline std::vector<double> fiber_project(const PolarFunction& f, int l, int k) {
  const auto& m = *f.model;
  const int mode = m.mode_index(l, k);
  if (mode < 0) throw std::invalid_argument("fiber_project: unknown (l,k)");
  std::vector<double> out(m.n_theta(), 0.0);
  for (int i = 0; i < m.n_theta(); ++i) {
    double acc = 0.0;
    for (int j = 0; j < m.n_fiber(); ++j)
      acc += m.fiber_weight[j] * f.at(i, j) * m.fiber_values[mode][j];
    out[i] = acc;
  }
  return out;
}

struct ThetaProfile {
  std::vector<double> values;
  bool singularity_warning = false;
};

// g_{l,k} = 2^{(q-1)/2} (sin theta)^{-l} F_{k,l}, interior nodes only.
// Flags samples that blow up at the extreme nodes, which indicates the
// input did not vanish to order l at the poles.
inline ThetaProfile g_extract(std::span<const double> f_kl, int l,
                              const SphereModel& m) {
  if (f_kl.size() != m.theta.size())
    throw std::invalid_argument("g_extract: size mismatch");
  ThetaProfile out;
  out.values.resize(f_kl.size());
  const double scale = std::pow(2.0, 0.5 * (m.q - 1.0));
  for (size_t i = 0; i < f_kl.size(); ++i)
    out.values[i] = scale * f_kl[i] / std::pow(std::sin(m.theta[i]), l);
  if (l > 0 && f_kl.size() >= 4) {
    std::vector<double> mags;
    mags.reserve(out.values.size());
    for (double v : out.values) mags.push_back(std::abs(v));
    std::vector<double> sorted = mags;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                     sorted.end());
    const double med = sorted[sorted.size() / 2];
    if (std::max(mags.front(), mags.back()) > 1e6 * std::max(med, 1e-300))
      out.singularity_warning = true;
  }
  return out;
}

namespace detail {
// Jacobi-coefficient grid for the (l,k) slice: the model quadrature
// reweighted so that it integrates h * w~_{a,a} dtheta with a = l+q/2-1.
inline compact::Grid slice_grid(const SphereModel& m, int l, int deg_cap) {
  const double a = l + 0.5 * m.q - 1.0;
  compact::Grid g{compact::Params(a, a), m.theta, {}, deg_cap};
  g.weights.resize(m.theta.size());
  const double scale = std::pow(2.0, -(2.0 * l + m.q - 1.0));
  for (size_t i = 0; i < m.theta.size(); ++i)
    g.weights[i] =
        m.theta_weight[i] * scale * std::pow(std::sin(m.theta[i]), 2 * l);
  return g;
}
}  // namespace detail

// (f, S_{n+l,l,k}) as Jacobi coefficients of the extracted slices:
//   (f, S_{n+l,l,k}) = 2^l J_{a,a}(g_{l,k})(n),  a = l + q/2 - 1.
// The 2^l comes from converting (sin theta)^{l+q-1} d theta into the
// half-angle Jacobi weight; it makes decompose the exact inner product,
// so synthesizing a basis element recovers a unit coefficient.
inline HarmonicCoefficients sphere_decompose(const PolarFunction& f,
                                             int deg_max) {
  const auto& m = *f.model;
  if (deg_max > m.max_degree)
    throw std::invalid_argument("sphere_decompose: deg_max exceeds grid design");
  HarmonicCoefficients out;
  out.q = m.q;
  for (const auto& mode : m.modes) {
    if (mode.l > deg_max) continue;
    const auto f_kl = fiber_project(f, mode.l, mode.k);
    const auto g = g_extract(f_kl, mode.l, m);
    const auto grid = detail::slice_grid(m, mode.l, deg_max - mode.l);
    const auto c = compact::analyze(grid, g.values, deg_max - mode.l);
    const double scale = std::pow(2.0, mode.l);
    for (int n = 0; n <= c.degree(); ++n)
      out.values[Key{n + mode.l, mode.l, mode.k}] = scale * c.values[n];
  }
  return out;
}

inline PolarFunction sphere_synthesize(const HarmonicCoefficients& c,
                                       std::shared_ptr<const SphereModel> m) {
  PolarFunction f = make_polar_function(std::move(m));
  const auto& model = *f.model;
  for (const auto& [key, v] : c.values) {
    if (v == 0.0) continue;
    const int mode = model.mode_index(key.l, key.k);
    if (mode < 0)
      throw std::invalid_argument("sphere_synthesize: mode missing from model");
    for (int i = 0; i < model.n_theta(); ++i) {
      const double bt = v * basis_theta(model.q, key.deg, key.l, model.theta[i]);
      for (int j = 0; j < model.n_fiber(); ++j)
        f.at(i, j) += bt * model.fiber_values[mode][j];
    }
  }
  return f;
}

inline double sphere_multiplier(int q, int deg) {
  const double s = deg + 0.5 * (q - 1.0);
  return s * s;
}

inline HarmonicCoefficients sphere_apply_Delta_spectral(HarmonicCoefficients c,
                                                        int m) {
  if (m < 0) throw std::invalid_argument("sphere_apply_Delta_spectral: m >= 0");
  for (auto& [key, v] : c.values)
    v *= std::pow(sphere_multiplier(c.q, key.deg), m);
  return c;
}

struct DominationCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

// Slicewise norm domination: the (l,k) slice under its shifted multipliers
// against the full function under the sphere multipliers, scaled by
// (1 + 2l/(q-1))^{2m}.
inline DominationCheck norm_domination_check(const HarmonicCoefficients& c,
                                             int l, int k, int m) {
  if (m < 1) throw std::invalid_argument("norm_domination_check: m >= 1");
  double lhs2 = 0.0, rhs2 = 0.0;
  for (const auto& [key, v] : c.values) {
    rhs2 += std::pow(sphere_multiplier(c.q, key.deg), 2.0 * m) * v * v;
    if (key.l == l && key.k == k) {
      const double s = (key.deg - l) + 0.5 * (2.0 * l + c.q - 1.0);
      lhs2 += std::pow(s, 4.0 * m) * v * v;
    }
  }
  DominationCheck out;
  out.lhs = std::sqrt(lhs2);
  out.rhs = std::pow(1.0 + 2.0 * l / (c.q - 1.0), 2.0 * m) * std::sqrt(rhs2);
  out.ratio = (out.rhs == 0.0) ? 0.0 : out.lhs / out.rhs;
  return out;
}

// Functions on real projective space = antipodally even functions on S^q.
// Rejects inputs that fail the symmetry; the surviving odd-degree
// coefficients are pure quadrature noise and are dropped.
inline HarmonicCoefficients even_lift_decompose(const PolarFunction& f,
                                                int deg_max,
                                                double sym_tol = 1e-10) {
  const auto& m = *f.model;
  if (m.antipode.empty())
    throw std::invalid_argument(
        "even_lift_decompose: model has no antipodal node map");
  const int nt = m.n_theta();
  double scale = 0.0;
  for (double v : f.data) scale = std::max(scale, std::abs(v));
  for (int i = 0; i < nt; ++i) {
    const int im = nt - 1 - i;  // theta -> pi - theta
    for (int j = 0; j < m.n_fiber(); ++j) {
      const double diff = std::abs(f.at(i, j) - f.at(im, m.antipode[j]));
      if (diff > sym_tol * std::max(1.0, scale))
        throw std::invalid_argument(
            "even_lift_decompose: input is not antipodally symmetric");
    }
  }
  auto c = sphere_decompose(f, deg_max);
  for (auto it = c.values.begin(); it != c.values.end();) {
    if (it->first.deg % 2 != 0)
      it = c.values.erase(it);
    else
      ++it;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Projective models on Omega_0 = (0,pi) x S^q with measure
//   (sin t/2)^{2q-1} (cos t/2)^{2k+1} dt x dsigma_q (sigma_q normalized).

enum class Family { real, complex_proj, quaternion, cayley };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::real: return "real";
    case Family::complex_proj: return "complex";
    case Family::quaternion: return "quaternion";
    case Family::cayley: return "cayley";
  }
  return "?";
}

struct ProjectiveModel {
  Family family = Family::complex_proj;
  int size_l = 2;
  int q = 2;
  int k = 0;
  int max_degree = 0;
  std::vector<double> theta;         // ascending interior nodes
  std::vector<double> theta_weight;  // integrates h w~_{q-1,k} dtheta
  std::shared_ptr<const SphereModel> fiber;  // S^q
  double fiber_vol = 1.0;  // mass of the fiber model's own measure
  std::vector<double> fiber_w;  // flattened normalized weights, sum = 1
  // fiber harmonics per degree j: (l',k') labels into the fiber model
  std::vector<std::vector<FiberMode>> harmonics;  // harmonics[j]

  double rho_S() const { return 0.5 * (k + q); }
  int n_theta() const { return static_cast<int>(theta.size()); }
  int n_fiber() const { return static_cast<int>(fiber_w.size()); }
  int fiber_dim(int j) const {
    return (j < static_cast<int>(harmonics.size()))
               ? static_cast<int>(harmonics[j].size())
               : 0;
  }
  // value of the normalized fiber harmonic (degree j, index idx) at a
  // flattened node
  double fiber_value(int j, int idx, int node) const {
    const auto& lbl = harmonics[j][idx];
    const int mode = fiber->mode_index(lbl.l, lbl.k);
    const int nf = fiber->n_fiber();
    const int it = node / nf, jn = node % nf;
    return std::sqrt(fiber_vol) *
           basis_theta(fiber->q, j, lbl.l, fiber->theta[it]) *
           fiber->fiber_values[mode][jn];
  }
};

inline std::pair<int, int> projective_qk(Family f, int l) {
  switch (f) {
    case Family::complex_proj:
      if (l < 2) throw std::invalid_argument("complex projective: l >= 2");
      return {2, l - 2};
    case Family::quaternion:
      if (l < 2) throw std::invalid_argument("quaternion projective: l >= 2");
      return {4, 2 * l - 3};
    case Family::cayley:
      if (l != 2) throw std::invalid_argument("cayley projective: l = 2");
      return {8, 3};
    case Family::real:
      throw std::invalid_argument(
          "real projective space is the even lift of S^q; use "
          "even_lift_decompose on a sphere model");
  }
  throw std::invalid_argument("unknown projective family");
}

inline std::shared_ptr<const ProjectiveModel> make_projective_model(
    Family family, int size_l, int max_degree, int fiber_degree_cap = -1) {
  auto [q, k] = projective_qk(family, size_l);
  auto m = std::make_shared<ProjectiveModel>();
  m->family = family;
  m->size_l = size_l;
  m->q = q;
  m->k = k;
  m->max_degree = max_degree;

  const int order = max_degree + 1;
  const auto rule = specfun::gauss_jacobi_rule(order, q - 1.0, double(k));
  const double scale = std::pow(2.0, -double(q + k));
  m->theta.resize(order);
  m->theta_weight.resize(order);
  for (int i = 0; i < order; ++i) {
    m->theta[i] = std::acos(rule.nodes[order - 1 - i]);
    m->theta_weight[i] = scale * rule.weights[order - 1 - i];
  }

  const int jcap = fiber_degree_cap >= 0 ? fiber_degree_cap : max_degree;
  // fiber sphere S^q; its own theta grid must resolve degree-jcap harmonics
  // and the products arising in fiber quadrature
  const int fiber_lmax = (q == 2) ? jcap : 0;
  m->fiber = make_sphere_model(q, 2 * jcap + 1, fiber_lmax);
  m->fiber_vol = std::sqrt(std::numbers::pi) *
                 std::exp(specfun::log_gamma_real(0.5 * q) -
                          specfun::log_gamma_real(0.5 * (q + 1.0)));
  const int nt = m->fiber->n_theta(), nf = m->fiber->n_fiber();
  m->fiber_w.resize(static_cast<size_t>(nt) * nf);
  for (int a = 0; a < nt; ++a)
    for (int b = 0; b < nf; ++b)
      m->fiber_w[static_cast<size_t>(a) * nf + b] =
          m->fiber->theta_weight[a] * m->fiber->fiber_weight[b] / m->fiber_vol;

  m->harmonics.resize(jcap + 1);
  for (int j = 0; j <= jcap; ++j)
    for (const auto& mode : m->fiber->modes)
      if (mode.l <= j) m->harmonics[j].push_back(mode);
  return m;
}

struct ProjFunction {
  std::shared_ptr<const ProjectiveModel> model;
  std::vector<double> data;  // row-major [theta][flattened fiber node]

  double& at(int i, int j) {
    return data[static_cast<size_t>(i) * model->n_fiber() + j];
  }
  double at(int i, int j) const {
    return data[static_cast<size_t>(i) * model->n_fiber() + j];
  }
};

inline ProjFunction make_proj_function(std::shared_ptr<const ProjectiveModel> m) {
  ProjFunction f{std::move(m), {}};
  f.data.assign(static_cast<size_t>(f.model->n_theta()) * f.model->n_fiber(), 0.0);
  return f;
}

namespace detail {
inline double proj_theta_factor(const ProjectiveModel& m, int n, int j,
                                double theta, bool first_form) {
  const double a = m.q - 1.0 + 2.0 * j, b = double(m.k);
  const double bnj = specfun::norm_constant(a, b, n - j);
  const double sh = std::sin(0.5 * theta);
  if (first_form) {
    return bnj * std::pow(sh, 2 * j) *
           specfun::jacobi_poly(n - j, b, a, 2.0 * sh * sh - 1.0);
  }
  const double sign = ((n - j) % 2 == 0) ? 1.0 : -1.0;
  return sign * bnj * std::pow(sh, 2 * j) *
         specfun::jacobi_poly(n - j, a, b, std::cos(theta));
}
}  // namespace detail

// Q_{n,j,l} at (theta, fiber node). Internally the (sign) x
// P_{n-j}^{(q-1+2j,k)}(cos theta) form; first_form evaluates the
// P_{n-j}^{(k,q-1+2j)}(2 sin^2(t/2) - 1) form instead (they agree by the
// Jacobi symmetry relation).
inline double projective_basis_Q(const ProjectiveModel& m, int n, int j,
                                 int l_idx, double theta, int fiber_node,
                                 bool first_form = false) {
  if (j < 0 || n < j || l_idx < 0 || l_idx >= m.fiber_dim(j))
    throw std::invalid_argument("projective_basis_Q: invalid (n,j,l)");
  return detail::proj_theta_factor(m, n, j, theta, first_form) *
         m.fiber_value(j, l_idx, fiber_node);
}

using ProjCoefficients = std::map<Key, double>;  // Key{deg = n, j, l_idx}

inline ProjCoefficients projective_decompose(const ProjFunction& f,
                                             int deg_max) {
  const auto& m = *f.model;
  if (deg_max > m.max_degree)
    throw std::invalid_argument(
        "projective_decompose: deg_max exceeds grid design");
  ProjCoefficients out;
  const int jmax = std::min<int>(deg_max, static_cast<int>(m.harmonics.size()) - 1);
  std::vector<double> f_jl(m.n_theta()), g(m.n_theta());
  for (int j = 0; j <= jmax; ++j) {
    for (int idx = 0; idx < m.fiber_dim(j); ++idx) {
      for (int i = 0; i < m.n_theta(); ++i) {
        double acc = 0.0;
        for (int node = 0; node < m.n_fiber(); ++node)
          acc += m.fiber_w[node] * f.at(i, node) * m.fiber_value(j, idx, node);
        f_jl[i] = acc;
      }
      const double a = m.q - 1.0 + 2.0 * j, b = double(m.k);
      compact::Grid grid{compact::Params(a, b), m.theta, {}, deg_max - j};
      grid.weights.resize(m.theta.size());
      for (int i = 0; i < m.n_theta(); ++i) {
        const double s2 = std::pow(std::sin(0.5 * m.theta[i]), 2);
        g[i] = f_jl[i] / std::pow(s2, j);
        grid.weights[i] = m.theta_weight[i] * std::pow(s2, 2 * j);
      }
      const auto c = compact::analyze(grid, g, deg_max - j);
      for (int n = 0; n <= c.degree(); ++n) {
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        out[Key{n + j, j, idx}] = sign * c.values[n];
      }
    }
  }
  return out;
}

inline ProjFunction projective_synthesize(
    const ProjCoefficients& c, std::shared_ptr<const ProjectiveModel> m) {
  ProjFunction f = make_proj_function(std::move(m));
  const auto& model = *f.model;
  for (const auto& [key, v] : c) {
    if (v == 0.0) continue;
    for (int i = 0; i < model.n_theta(); ++i) {
      const double tf =
          v * detail::proj_theta_factor(model, key.deg, key.l, model.theta[i],
                                        false);
      for (int node = 0; node < model.n_fiber(); ++node)
        f.at(i, node) += tf * model.fiber_value(key.l, key.k, node);
    }
  }
  return f;
}

inline double projective_multiplier(const ProjectiveModel& m, int deg) {
  const double s = deg + 0.5 * (m.q + m.k);
  return s * s;
}

inline ProjCoefficients projective_apply_Lambda_spectral(
    ProjCoefficients c, const ProjectiveModel& m, int power) {
  if (power < 0)
    throw std::invalid_argument("projective_apply_Lambda_spectral: m >= 0");
  for (auto& [key, v] : c) v *= std::pow(projective_multiplier(m, key.deg), power);
  return c;
}

}  // namespace rankone::sphere

#endif  // RANKONE_SPHERE_HPP
