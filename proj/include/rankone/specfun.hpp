#ifndef RANKONE_SPECFUN_HPP
#define RANKONE_SPECFUN_HPP

// Scalar special-function kernels: complex log-Gamma, Pochhammer symbols,
// Jacobi and Gegenbauer polynomials, normalization constants and
// Gauss-Jacobi quadrature. Everything else in the library sits on top of
// these routines.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rankone::specfun {

using cplx = std::complex<double>;

namespace detail {

// Lanczos coefficients, g = 607/128 (Godfrey's 15-term set).
inline constexpr double kLanczosG = 4.7421875;
inline constexpr double kLanczosC[15] = {
    0.99999999999999709182,     57.156235665862923517,
    -59.597960355475491248,     14.136097974741747174,
    -0.49191381609762019978,    0.33994649984811888699e-4,
    0.46523628927048575665e-4,  -0.98374475304879564677e-4,
    0.15808870322491248884e-3,  -0.21026444172410488319e-3,
    0.21743961811521264320e-3,  -0.16431810653676389022e-3,
    0.84418223983852743293e-4,  -0.26190838401581408670e-4,
    0.36899182659531622704e-5};

// log Gamma on Re z >= 1/2 (principal branch there).
inline cplx log_gamma_right(cplx z) {
  cplx acc = kLanczosC[0];
  for (int k = 1; k < 15; ++k) acc += kLanczosC[k] / (z + cplx(k - 1, 0));
  const cplx t = z + (kLanczosG - 0.5);
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z - 0.5) * std::log(t) - t +
         std::log(acc);
}

// Principal log of sin(pi z). For large |Im z| the direct sine overflows,
// so switch to the one-sided exponential form and fold the imaginary part
// back into (-pi, pi].
inline cplx log_sin_pi(cplx z) {
  const double pi = std::numbers::pi;
  if (std::abs(z.imag()) < 20.0) {
    return std::log(std::sin(pi * z));
  }
  const bool flip = z.imag() < 0.0;
  const cplx zz = flip ? std::conj(z) : z;
  // sin(pi z) = (i/2) (1 - w^2) / w with w = exp(i pi z), |w| small here.
  const cplx w2 = std::exp(cplx(0, 2.0 * pi) * zz);
  cplx L = cplx(-std::numbers::ln2, pi / 2.0) + std::log(1.0 - w2) -
           cplx(0, pi) * zz;
  L.imag(std::remainder(L.imag(), 2.0 * pi));
  return flip ? std::conj(L) : L;
}

}  // namespace detail

// Principal branch of log Gamma. Poles at the nonpositive integers are
// rejected. Reflection for Re z < 1/2 follows Hare's unwinding, so values
// on and below the negative real axis stay on the principal sheet.
inline cplx log_gamma(cplx z) {
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real())) {
    throw std::domain_error("log_gamma: pole at nonpositive integer z = " +
                            std::to_string(static_cast<long long>(z.real())));
  }
  if (z.real() >= 0.5) return detail::log_gamma_right(z);
  const double pi = std::numbers::pi;
  const double unwind =
      std::copysign(2.0 * pi, z.imag()) * std::floor(0.5 * z.real() + 0.25);
  return cplx(std::log(pi), unwind) - detail::log_sin_pi(z) -
         detail::log_gamma_right(1.0 - z);
}

inline double log_gamma_real(double x) {
  if (x <= 0.0 && x == std::floor(x)) {
    throw std::domain_error("log_gamma: pole at nonpositive integer");
  }
  return std::lgamma(x);
}

// Ascending factorial (z)_m = z (z+1) ... (z+m-1); empty product for m = 0.
inline cplx pochhammer(cplx z, int m) {
  if (m < 0) throw std::invalid_argument("pochhammer: m must be >= 0");
  cplx acc(1.0, 0.0);
  for (int j = 0; j < m; ++j) acc *= z + cplx(j, 0);
  return acc;
}

inline double pochhammer(double z, int m) {
  if (m < 0) throw std::invalid_argument("pochhammer: m must be >= 0");
  double acc = 1.0;
  for (int j = 0; j < m; ++j) acc *= z + j;
  return acc;
}

inline double log_abs_pochhammer(cplx z, int m) {
  double acc = 0.0;
  for (int j = 0; j < m; ++j) acc += 0.5 * std::log(std::norm(z + cplx(j, 0)));
  return acc;
}

struct OrthoPolyIndex {
  int n;
  double alpha;
  double beta;

  OrthoPolyIndex(int n_, double alpha_, double beta_)
      : n(n_), alpha(alpha_), beta(beta_) {
    if (n < 0) throw std::invalid_argument("OrthoPolyIndex: n must be >= 0");
    if (!(alpha > -1.0))
      throw std::invalid_argument("OrthoPolyIndex: alpha must be > -1");
    if (!(beta > -1.0))
      throw std::invalid_argument("OrthoPolyIndex: beta must be > -1");
  }
};

// P_n^{(alpha,beta)}(x) by forward three-term recurrence. Stable on [-1,1]
// for the degrees used here (<= a few hundred).
inline double jacobi_poly(int n, double alpha, double beta, double x) {
  if (n == 0) return 1.0;
  double y0 = 1.0;
  double y1 = (alpha + 1.0) + 0.5 * (alpha + beta + 2.0) * (x - 1.0);
  for (int k = 2; k <= n; ++k) {
    const double ab = alpha + beta;
    const double denom = 2.0 * k * (k + ab) * (2.0 * k + ab - 2.0);
    const double g1 = (2.0 * k + ab - 1.0) *
                      ((2.0 * k + ab) * (2.0 * k + ab - 2.0) * x +
                       alpha * alpha - beta * beta);
    const double g0 = -2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * (2.0 * k + ab);
    const double yk = (g1 * y1 + g0 * y0) / denom;
    y0 = y1;
    y1 = yk;
  }
  return y1;
}

inline double jacobi_poly(const OrthoPolyIndex& idx, double x) {
  return jacobi_poly(idx.n, idx.alpha, idx.beta, x);
}

// Gegenbauer C_k^lam via the Jacobi connection
//   C_k^lam(t) = [(2 lam)_k / (lam + 1/2)_k] P_k^{(lam-1/2, lam-1/2)}(t).
// The classical Gamma-prefactor form requires lam != 0; the three-term
// recurrence is kept in the tests as the independent route.
inline double gegenbauer(int k, double lam, double t) {
  if (k < 0) throw std::invalid_argument("gegenbauer: k must be >= 0");
  if (!(lam > -0.5) || lam == 0.0)
    throw std::domain_error("gegenbauer: lam must be > -1/2 and nonzero");
  const double pref = pochhammer(2.0 * lam, k) / pochhammer(lam + 0.5, k);
  return pref * jacobi_poly(k, lam - 0.5, lam - 0.5, t);
}

// log of C(alpha,beta,n), the constant making C * P_n^{(alpha,beta)}(cos t)
// an orthonormal family for the trigonometric Jacobi weight.
//   C^2 = (2n+a+b+1) n! Gamma(n+a+b+1) / (Gamma(n+a+1) Gamma(n+b+1)).
// The n = 0 case is rewritten as Gamma(a+b+2)/(Gamma(a+1)Gamma(b+1)) to
// stay finite when a+b+1 = 0.
inline double log_norm_constant(const OrthoPolyIndex& idx) {
  const double a = idx.alpha, b = idx.beta;
  const int n = idx.n;
  if (n == 0) {
    return 0.5 * (log_gamma_real(a + b + 2.0) - log_gamma_real(a + 1.0) -
                  log_gamma_real(b + 1.0));
  }
  const double log_c2 = std::log(2.0 * n + a + b + 1.0) +
                        log_gamma_real(n + 1.0) +
                        log_gamma_real(n + a + b + 1.0) -
                        log_gamma_real(n + a + 1.0) -
                        log_gamma_real(n + b + 1.0);
  return 0.5 * log_c2;
}

inline double norm_constant(const OrthoPolyIndex& idx) {
  return std::exp(log_norm_constant(idx));
}

inline double norm_constant(double alpha, double beta, int n) {
  return norm_constant(OrthoPolyIndex(n, alpha, beta));
}

struct QuadratureRule {
  std::vector<double> nodes;    // strictly increasing, inside (-1,1)
  std::vector<double> weights;  // strictly positive
  int order = 0;
  double alpha = 0.0;
  double beta = 0.0;

  void validate() const {
    if (order < 1 || nodes.size() != static_cast<size_t>(order) ||
        weights.size() != static_cast<size_t>(order)) {
      throw std::invalid_argument("QuadratureRule: inconsistent sizes");
    }
    for (int i = 0; i < order; ++i) {
      if (!(nodes[i] > -1.0 && nodes[i] < 1.0))
        throw std::invalid_argument("QuadratureRule: node outside (-1,1)");
      if (!(weights[i] > 0.0))
        throw std::invalid_argument("QuadratureRule: nonpositive weight");
      if (i > 0 && !(nodes[i] > nodes[i - 1]))
        throw std::invalid_argument("QuadratureRule: nodes not increasing");
    }
  }
};

// Gauss-Jacobi rule for the weight (1-x)^alpha (1+x)^beta on (-1,1),
// by the Golub-Welsch symmetric-tridiagonal eigenvalue method.
inline QuadratureRule gauss_jacobi_rule(int order, double alpha, double beta) {
  if (order < 1) throw std::invalid_argument("gauss_jacobi_rule: order >= 1");
  if (!(alpha > -1.0) || !(beta > -1.0))
    throw std::invalid_argument("gauss_jacobi_rule: alpha, beta must be > -1");

  const double ab = alpha + beta;
  Eigen::VectorXd diag(order), sub(std::max(order - 1, 1));
  diag[0] = (beta - alpha) / (ab + 2.0);
  for (int k = 1; k < order; ++k) {
    const double t = 2.0 * k + ab;
    diag[k] = (beta * beta - alpha * alpha) / (t * (t + 2.0));
  }
  for (int k = 1; k < order; ++k) {
    double b2;
    if (k == 1) {
      b2 = 4.0 * (alpha + 1.0) * (beta + 1.0) /
           ((ab + 2.0) * (ab + 2.0) * (ab + 3.0));
    } else {
      const double t = 2.0 * k + ab;
      b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) /
           (t * t * (t + 1.0) * (t - 1.0));
    }
    sub[k - 1] = std::sqrt(b2);
  }

  // mu0 = total weight mass = 2^{a+b+1} B(a+1, b+1)
  const double log_mu0 = (ab + 1.0) * std::numbers::ln2 +
                         log_gamma_real(alpha + 1.0) +
                         log_gamma_real(beta + 1.0) -
                         log_gamma_real(ab + 2.0);
  const double mu0 = std::exp(log_mu0);

  QuadratureRule rule;
  rule.order = order;
  rule.alpha = alpha;
  rule.beta = beta;
  rule.nodes.resize(order);
  rule.weights.resize(order);

  if (order == 1) {
    rule.nodes[0] = diag[0];
    rule.weights[0] = mu0;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub.head(order - 1),
                              Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("gauss_jacobi_rule: eigensolver failed");
    for (int i = 0; i < order; ++i) {
      rule.nodes[i] = es.eigenvalues()[i];
      const double q = es.eigenvectors()(0, i);
      rule.weights[i] = mu0 * q * q;
    }
  }
  rule.validate();
  return rule;
}

}  // namespace rankone::specfun

#endif  // RANKONE_SPECFUN_HPP
