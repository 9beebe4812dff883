#pragma once

// High-precision numerics for the integral representations: basis-vector
// integrals, eigenvalue integrals, the spectral-curve recursion, measure
// identities and the saddle-point expansion.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <complex>
#include <cstdlib>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "gwp1/errors.hpp"
#include "gwp1/grassmannian.hpp"
#include "gwp1/miwa.hpp"
#include "gwp1/rational.hpp"
#include "gwp1/special.hpp"

namespace gwp1::matint {

using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>, boost::multiprecision::et_off>;
using Complex = std::complex<Real>;

/// GWP1_DIGITS if set, else 40.
inline int default_digits() {
  if (const char* env = std::getenv("GWP1_DIGITS")) {
    const int d = std::atoi(env);
    if (d < 10 || d > 1000) throw ContractError("GWP1_DIGITS must lie in [10, 1000]");
    return d;
  }
  return 40;
}

/// Sets the working precision for the lifetime of the object.
class WorkingPrecision {
 public:
  explicit WorkingPrecision(int digits) : saved_(Real::default_precision()) {
    // a few guard digits on top of the requested ones
    Real::default_precision(digits + 10);
  }
  ~WorkingPrecision() { Real::default_precision(saved_); }
  WorkingPrecision(const WorkingPrecision&) = delete;
  WorkingPrecision& operator=(const WorkingPrecision&) = delete;

 private:
  unsigned saved_;
};

inline Real to_real(const Rational& r) { return Real(r.get_num().get_str()) / Real(r.get_den().get_str()); }

inline Real pi() { return boost::math::constants::pi<Real>(); }

struct QuadratureSpec {
  int digits = default_digits();
  std::size_t max_refinements = 12;
  int grid_digits = 12;  // accuracy of the coarse tensor grid; halving the step roughly doubles it

  Real tolerance() const { return pow(Real(10), -digits - 5); }
};

struct Estimate {
  Real value;
  Real error;  // quadrature's own error estimate, absolute
};

enum class Form { Line, Log };

// ---------------------------------------------------------------------------
// one-dimensional integrals

namespace detail {

/// Dominant real saddle of x y - e^y + q e^{-y}, i.e. e^y + q e^{-y} = x.
inline Real saddle_point(const Real& x, const Real& q) {
  const Real disc = x * x - 4 * q;
  if (disc <= 0 || x <= 0) return log(std::max(x, Real(1)));
  return log((x + sqrt(disc)) / 2);
}

inline Real action(const Real& y, const Real& x, const Real& q) {
  // q = 0 must not meet e^{-y} = inf far to the left
  return q == 0 ? x * y - exp(y) : x * y - exp(y) + q * exp(-y);
}

/// Boost's multiprecision sinh_sinh indexes past its tables when it runs out of
/// refinements, and a NaN integrand guarantees that; stop early instead.
/// Past `cutoff` (in widths) the integrand is taken as zero: all of ours are below
/// e^{-1000} there, and mpfr returns NaN at the astronomically large probe points.
template <class F>
auto finite_or_throw(F f, double cutoff = 1e4) {
  return [f, cutoff](const Real& w) -> Real {
    if (abs(w) > cutoff) return Real(0);
    const Real v = f(w);
    if (!boost::multiprecision::isfinite(v)) throw DomainError("integrand is not finite at " + w.str(6));
    return v;
  };
}

}  // namespace detail

/// int exp(lam (x y - e^y + q e^{-y})) dy. For q > 0 the real line diverges, so the
/// path leaves it on the left towards Im y = pi (where q e^{-y} < 0); the result is
/// the real part, i.e. the mean over the two conjugate paths.
inline Estimate line_integral(const Real& lam, const Real& x, const Real& q, const QuadratureSpec& spec = {}) {
  if (lam <= 0) throw ContractError("line_integral needs a positive scale");
  if (x <= 0 && q >= 0) throw DomainError("line_integral diverges for x <= 0 unless q < 0");
  const Real ys = detail::saddle_point(x, q);
  const Real curv = abs(-exp(ys) + q * exp(-ys));
  const Real width = 1 / sqrt(lam * std::max(curv, Real(1) / 100));
  const Real s0 = lam * detail::action(ys, x, q);
  boost::math::quadrature::sinh_sinh<Real> integrator(spec.max_refinements);
  Real err = 0;
  Real value;
  if (q <= 0) {
    auto f = [&](const Real& w) -> Real {
      const Real y = ys + w * width;
      const Real e = lam * detail::action(y, x, q) - s0;
      if (e < -100000) return Real(0);
      return exp(e) * width;
    };
    value = integrator.integrate(detail::finite_or_throw(f), spec.tolerance(), &err);
  } else {
    // centre of the lift: the subdominant saddle near log(q/x)
    const Real disc = x * x - 4 * q;
    const Real y0 = disc > 0 ? log((x - sqrt(disc)) / 2) : ys - 2;
    auto f = [&](const Real& w) -> Real {
      const Real t = ys + w * width;
      const Real u = 2 * (t - y0);
      if (u > 200) {
        // path is real to working precision
        const Real e = lam * detail::action(t, x, q) - s0;
        return e < -100000 ? Real(0) : exp(e) * width;
      }
      const Real sigma = 1 / (1 + exp(u));
      const Real dsigma = -2 * sigma * (1 - sigma);
      const Real th = pi() * sigma;
      // y = t + i th
      const Real et = exp(t), emt = exp(-t);
      const Real re = lam * (x * t - et * cos(th) + q * emt * cos(th)) - s0;
      if (re < -100000) return Real(0);
      const Real im = lam * (x * th - et * sin(th) - q * emt * sin(th));
      const Complex dy(Real(1), pi() * dsigma);
      const Complex v = Complex(exp(re) * cos(im), exp(re) * sin(im)) * dy;
      return v.real() * width;
    };
    value = integrator.integrate(detail::finite_or_throw(f), spec.tolerance(), &err);
  }
  const Real scale = exp(s0);
  return {value * scale, err * scale};
}

/// int_0^inf v^{lam x - 1} exp(lam(-v + q/v)) dv, the log-variable form of the
/// line integral (v = e^y). Diverges at v -> 0 for q > 0.
inline Estimate log_integral(const Real& lam, const Real& x, const Real& q, const QuadratureSpec& spec = {}) {
  if (q > 0) throw DomainError("log-form integral diverges at v -> 0 for q > 0; use the line form");
  if (x <= 0 && q >= 0) throw DomainError("log-form integral diverges for x <= 0");
  const Real vs = exp(detail::saddle_point(x, q));
  const Real s0 = lam * (x * log(vs) - vs + q / vs);
  boost::math::quadrature::exp_sinh<Real> integrator(spec.max_refinements);
  auto f = [&](const Real& r) -> Real {
    // v = vs r
    if (r <= 0) return Real(0);
    const Real v = vs * r;
    const Real e = lam * (x * log(v) - v + q / v) - s0;
    if (e < -100000) return Real(0);
    return exp(e) / r;
  };
  Real err = 0;
  const Real value = integrator.integrate(detail::finite_or_throw(f, 1e6 / std::min(1.0, vs.convert_to<double>())),
                                          spec.tolerance(), &err);
  const Real scale = exp(s0);
  return {value * scale, err * scale};
}

/// z^{n-z} e^z / sqrt(2 pi) int e^{y(z+k-n-1/2) - e^y + q e^{-y}} dy.
inline Estimate numeric_phi(int k, const Real& n, const Real& q, const Real& z, Form form = Form::Line,
                            const QuadratureSpec& spec = {}) {
  if (z <= 0) throw DomainError("numeric_phi needs z > 0");
  const Real x = z + k - n - Real(1) / 2;
  const Estimate raw = form == Form::Line ? line_integral(Real(1), x, q, spec) : log_integral(Real(1), x, q, spec);
  const Real pre = exp((n - z) * log(z) + z) / sqrt(2 * pi());
  return {raw.value * pre, raw.error * pre};
}

/// Independent value for q = 0: Gamma(z+k-n-1/2) z^{n-z} e^z / sqrt(2 pi).
inline Real gamma_phi(int k, const Real& n, const Real& z) {
  const Real x = z + k - n - Real(1) / 2;
  return exp(boost::math::lgamma(x) + (n - z) * log(z) + z) / sqrt(2 * pi());
}

/// hbar^{1/2-k}/sqrt(2 pi) int exp((y(z + hbar(k-n-1/2)) - e^y + q e^{-y})/hbar) dy.
inline Estimate numeric_psi(int k, const Real& n, const Real& q, const Real& z, const Real& hbar,
                            const QuadratureSpec& spec = {}) {
  const Real x = z + hbar * (k - n - Real(1) / 2);
  const Estimate raw = line_integral(1 / hbar, x, q, spec);
  const Real pre = pow(hbar, Real(1) / 2 - k) / sqrt(2 * pi());
  return {raw.value * pre, raw.error * pre};
}

struct RecursionReport {
  Real residual;  // Psi(z+h) + q Psi(z-h) - (z - h(n+1/2-k)) Psi(z)
  Real scale;     // largest of the three terms
  Real relative() const { return abs(residual) / scale; }
};

inline RecursionReport qsc_recursion(int k, const Real& n, const Real& q, const Real& z, const Real& hbar,
                                     const QuadratureSpec& spec = {}) {
  const Real up = numeric_psi(k, n, q, z + hbar, hbar, spec).value;
  const Real down = numeric_psi(k, n, q, z - hbar, hbar, spec).value;
  const Real mid = numeric_psi(k, n, q, z, hbar, spec).value;
  const Real lin = (z - hbar * (n + Real(1) / 2 - k)) * mid;
  return {up + q * down - lin, std::max({abs(up), abs(q * down), abs(lin)})};
}

// ---------------------------------------------------------------------------
// asymptotic matching

/// Value of a z-series with rational coefficients at numeric z, n and qt.
inline Real evaluate_series(const Series& s, const Rational& n, const Rational& qt, const Real& z) {
  Real v = 0;
  for (const auto& [e, c] : s.terms()) {
    Poly p = c;
    if (p.alphabet()->find("n")) p = p.evaluate("n", n);
    if (p.alphabet()->find("qt")) p = p.evaluate("qt", qt);
    v += to_real(p.constant_term()) * pow(z, e);
  }
  return v;
}

struct AsymptoticReport {
  Real numeric;
  Real prediction;
  Real discrepancy;
  Real tolerance;
  int order = 0;
  bool pass() const { return discrepancy <= tolerance; }
};

/// numeric_phi against phi_absolute truncated at order M. Tolerance is twice the
/// first nonvanishing omitted term plus the e^{-2 pi z} floor.
inline AsymptoticReport asymptotic_phi(int k, const Rational& n, const Rational& qt, const Real& z, int M,
                                       const QuadratureSpec& spec = {}) {
  const int Q = 2 * M + 4;  // enough qt powers: qt^m first enters at order m
  auto a = absolute_alphabet(Q);
  const Poly nn = Poly::variable(a, "n");
  const int extra = 6;
  const Series full = phi_absolute(k, nn, M + extra);
  AsymptoticReport r;
  r.order = M;
  r.prediction = evaluate_series(full.truncated(k - 1 - M), n, qt, z);
  Real omitted = 0;
  for (int j = M + 1; j <= M + extra; ++j) {
    Series one(a, k - 1 - j);
    one.set(k - 1 - j, full.coefficient(k - 1 - j));
    omitted = abs(evaluate_series(one, n, qt, z));
    if (omitted != 0) break;
  }
  const Estimate e = numeric_phi(k, to_real(n), to_real(qt), z, Form::Line, spec);
  r.numeric = e.value;
  r.discrepancy = abs(e.value - r.prediction);
  r.tolerance = 2 * omitted + exp(-2 * pi() * z) + 10 * e.error;
  return r;
}

// ---------------------------------------------------------------------------
// eigenvalue integrals

inline Real vandermonde(const std::vector<Real>& x) {
  Real v = 1;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) v *= x[j] - x[i];
  return v;
}

inline Complex vandermonde(const std::vector<Complex>& x) {
  Complex v(Real(1), Real(0));
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) v *= x[j] - x[i];
  return v;
}

inline Real determinant(std::vector<std::vector<Real>> m) {
  const std::size_t n = m.size();
  Real det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (abs(m[r][c]) > abs(m[p][c])) p = r;
    if (m[p][c] == 0) return Real(0);
    if (p != c) {
      std::swap(m[p], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const Real f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

inline Complex determinant(std::vector<std::vector<Complex>> m) {
  const std::size_t n = m.size();
  Complex det(Real(1), Real(0));
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (abs(m[r][c]) > abs(m[p][c])) p = r;
    if (abs(m[p][c]) == 0) return Complex(Real(0), Real(0));
    if (p != c) {
      std::swap(m[p], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const Complex f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

/// log of the prefactor P = exp(-sum((n - lambda) log lambda + lambda)).
inline Real log_P(const std::vector<Real>& lambda, const Real& n) {
  Real s = 0;
  for (const auto& l : lambda) s += (n - l) * log(l) + l;
  return -s;
}

inline void check_eigenvalues(const std::vector<Real>& lambda) {
  if (lambda.empty() || lambda.size() > 3) throw ContractError("eigenvalue integrals support 1 <= N <= 3");
  for (const auto& l : lambda)
    if (l <= 0) throw DomainError("eigenvalues must be positive");
  for (std::size_t i = 0; i < lambda.size(); ++i)
    for (std::size_t j = i + 1; j < lambda.size(); ++j)
      if (abs(lambda[i] - lambda[j]) < pow(Real(10), -int(Real::default_precision()) / 2))
        throw DomainError("eigenvalue collision");
}

/// det_{k,l} Phi_k(lambda_l) / Delta(lambda) from one-dimensional quadratures.
inline Real andreief_determinant(const std::vector<Real>& lambda, const Real& n, const Real& q,
                                 const QuadratureSpec& spec = {}) {
  check_eigenvalues(lambda);
  const std::size_t N = lambda.size();
  std::vector<std::vector<Real>> m(N, std::vector<Real>(N));
  for (std::size_t k = 0; k < N; ++k)
    for (std::size_t l = 0; l < N; ++l) m[k][l] = numeric_phi(int(k) + 1, n, q, lambda[l], Form::Line, spec).value;
  return determinant(m) / vandermonde(lambda);
}

struct EigenvalueIntegral {
  Real value;
  Real error;  // change under halving the step
};

/// (1/((2 pi)^{N/2} Delta(lambda) P)) int d^N y Delta(e^y) e^{Tr(Y(Lambda - n + 1/2) - e^Y + q e^{-Y})}
/// by a tensor trapezoid rule on the same paths as line_integral.
inline EigenvalueIntegral eigenvalue_integral(const std::vector<Real>& lambda, const Real& n, const Real& q,
                                              const QuadratureSpec& spec = {}) {
  check_eigenvalues(lambda);
  const std::size_t N = lambda.size();
  // one grid for every axis: the step resolves the narrowest Gaussian peak, the range
  // covers the e^{x y} tail on the left and the e^{-e^y} tail on the right
  Real ymin = 0, ymax = 0, cmin = 0, xmax = 0;
  for (std::size_t l = 0; l < N; ++l) {
    const Real x = lambda[l] - n + Real(1) / 2;
    const Real ys = detail::saddle_point(x + Real(int(N) - 1), q);
    ymin = l ? std::min(ymin, ys) : ys;
    ymax = l ? std::max(ymax, ys) : ys;
    cmin = l ? std::min(cmin, x) : x;
    xmax = l ? std::max(xmax, x + Real(int(N) - 1)) : x + Real(int(N) - 1);
  }
  if (cmin <= 0 && q >= 0) throw DomainError("eigenvalue integral diverges: lambda - n + 1/2 must be positive");
  const Real target = Real(spec.grid_digits + 4) * log(Real(10));
  const Real hi = ymax + log(target + xmax) + 2;
  Real lo = ymin - (cmin > 0 ? target / cmin : Real(10)) - 2;
  const Real disc = cmin * cmin - 4 * q;
  const Real disc_y0 = q > 0 && disc > 0 ? log((cmin - sqrt(disc)) / 2) : ymin - 2;
  if (q > 0) lo = std::min(lo, disc_y0 - 5);
  const Real step = pi() / sqrt(std::max(xmax, Real(1)) / 2 * target);

  auto run = [&](int points) -> Real {
    const Real h = (hi - lo) / points;
    // per-axis samples: e^y and the one-variable weights, on the lifted path for q > 0
    std::vector<Complex> ey(points + 1), dy(points + 1);
    std::vector<std::vector<Complex>> w(N, std::vector<Complex>(points + 1));
    for (int i = 0; i <= points; ++i) {
      const Real t = lo + h * i;
      Real th = 0, dth = 0;
      if (q > 0) {
        const Real u = 2 * (t - disc_y0);
        if (u < 200) {
          const Real sigma = 1 / (1 + exp(u));
          th = pi() * sigma;
          dth = -2 * pi() * sigma * (1 - sigma);
        }
      }
      const Complex y(t, th);
      ey[i] = std::exp(y);
      dy[i] = Complex(Real(1), dth);
      for (std::size_t l = 0; l < N; ++l) {
        const Real x = lambda[l] - n + Real(1) / 2;
        const Complex e = y * x - ey[i] + q / ey[i];
        w[l][i] = e.real() < -100000 ? Complex(Real(0), Real(0)) : std::exp(e - Complex(log_P(lambda, n) / Real(N), Real(0))) * dy[i];
      }
    }
    // the N-fold sum runs in long double on rescaled weights; the one-dimensional
    // samples above carry the full precision
    using CL = std::complex<long double>;
    std::vector<Real> scale(N, Real(0));
    for (std::size_t l = 0; l < N; ++l)
      for (const auto& v : w[l]) scale[l] = std::max(scale[l], abs(v));
    auto lower = [](const Complex& c, const Real& s) {
      return CL((c.real() / s).convert_to<long double>(), (c.imag() / s).convert_to<long double>());
    };
    // for q > 0 every axis runs over both conjugate paths with weight 1/2, which is
    // the real-part prescription of line_integral applied factor by factor
    const int copies = q > 0 ? 2 : 1;
    const int M = copies * (points + 1) - 1;
    std::vector<std::vector<CL>> wl(N, std::vector<CL>(M + 1));
    std::vector<CL> el(M + 1);
    for (int i = 0; i <= points; ++i) {
      el[i] = lower(ey[i], Real(1));
      for (std::size_t l = 0; l < N; ++l) wl[l][i] = lower(w[l][i], scale[l]) / CL(copies);
      if (copies == 2) {
        el[points + 1 + i] = std::conj(el[i]);
        for (std::size_t l = 0; l < N; ++l) wl[l][points + 1 + i] = std::conj(wl[l][i]);
      }
    }
    CL sum = 0;
    std::vector<int> idx(N, 0);
    while (true) {
      CL term = 1, vdm = 1;
      for (std::size_t l = 0; l < N; ++l) {
        term *= wl[l][idx[l]];
        for (std::size_t j = l + 1; j < N; ++j) vdm *= el[idx[j]] - el[idx[l]];
      }
      if (term != CL(0)) sum += term * vdm;
      std::size_t d = 0;
      while (d < N && ++idx[d] > M) idx[d++] = 0;
      if (d == N) break;
    }
    Complex total(Real(sum.real()), Real(sum.imag()));
    for (const auto& s : scale) total *= s;
    total *= pow(h, int(N));
    return total.real() / (pow(2 * pi(), Real(N) / 2) * vandermonde(lambda));
  };
  // trapezoid error on analytic integrands falls like exp(-c/h); a halving check bounds it
  const int base = std::max(20, int(((hi - lo) / step).convert_to<double>()) + 1);
  const Real coarse = run(base);
  const Real fine = run(2 * base);
  return {fine, abs(fine - coarse)};
}

// ---------------------------------------------------------------------------
// measure identities

using ComplexMatrix = std::vector<std::vector<Complex>>;

inline ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t n = a.size();
  ComplexMatrix c(n, std::vector<Complex>(n, Complex(Real(0), Real(0))));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

/// A random Hermitian N x N matrix with entries of size about `size`.
inline ComplexMatrix random_hermitian(std::mt19937_64& rng, std::size_t N, double size) {
  std::uniform_real_distribution<double> u(-size, size);
  ComplexMatrix m(N, std::vector<Complex>(N));
  for (std::size_t i = 0; i < N; ++i) {
    m[i][i] = Complex(Real(u(rng)), Real(0));
    for (std::size_t j = i + 1; j < N; ++j) {
      m[i][j] = Complex(Real(u(rng)), Real(u(rng)));
      m[j][i] = std::conj(m[i][j]);
    }
  }
  return m;
}

/// Eigenvalues of a 2 x 2 Hermitian matrix, ascending.
inline std::vector<Real> eigenvalues2(const ComplexMatrix& m) {
  const Real a = m[0][0].real(), d = m[1][1].real();
  const Real r = sqrt((a - d) * (a - d) / 4 + std::norm(m[0][1]));
  return {(a + d) / 2 - r, (a + d) / 2 + r};
}

/// Delta(e^y) e^{-(N-1)/2 sum y} / Delta(y): density of the measure against the flat one.
inline Real measure_density(const std::vector<Real>& y) {
  std::vector<Real> ey;
  Real s = 0;
  for (const auto& v : y) {
    ey.push_back(exp(v));
    s += v;
  }
  const Real N = Real(y.size());
  return vandermonde(ey) * exp(-(N - 1) / 2 * s) / vandermonde(y);
}

/// sqrt det [sinh(A)/A], A = (Y x I - I x Y)/2, by the Taylor series of the matrix function.
inline Real sinh_determinant(const ComplexMatrix& Y) {
  const std::size_t N = Y.size(), M = N * N;
  ComplexMatrix A(M, std::vector<Complex>(M, Complex(Real(0), Real(0))));
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      for (std::size_t k = 0; k < N; ++k) {
        // (Y x I)_{(i,j),(k,j)} = Y_ik ; (I x Y)_{(i,j),(i,k)} = Y_jk
        A[i * N + j][k * N + j] += Y[i][k] / Real(2);
        A[i * N + j][i * N + k] -= Y[j][k] / Real(2);
      }
  const ComplexMatrix A2 = matmul(A, A);
  ComplexMatrix sum(M, std::vector<Complex>(M, Complex(Real(0), Real(0)))), term = sum;
  for (std::size_t i = 0; i < M; ++i) term[i][i] = Complex(Real(1), Real(0));
  const Real eps = pow(Real(10), -int(Real::default_precision()) - 5);
  for (int m = 0; m < 2000; ++m) {
    Real norm = 0;
    for (std::size_t i = 0; i < M; ++i)
      for (std::size_t j = 0; j < M; ++j) {
        sum[i][j] += term[i][j];
        norm = std::max(norm, abs(term[i][j]));
      }
    if (norm < eps) break;
    term = matmul(term, A2);
    const Real div = Real((2 * m + 2) * (2 * m + 3));
    for (auto& row : term)
      for (auto& v : row) v /= div;
  }
  const Complex det = determinant(sum);
  return sqrt(det.real());
}

/// exp(sum_{i+j>0} (-1)^j B_{i+j}/(2(i+j) i! j!) Tr Y^i Tr Y^j), truncated at i+j <= L.
inline Real double_trace_density(const ComplexMatrix& Y, int L) {
  const std::size_t N = Y.size();
  std::vector<Real> tr(L + 1);
  ComplexMatrix p(N, std::vector<Complex>(N, Complex(Real(0), Real(0))));
  for (std::size_t i = 0; i < N; ++i) p[i][i] = Complex(Real(1), Real(0));
  for (int i = 0; i <= L; ++i) {
    Real t = 0;
    for (std::size_t r = 0; r < N; ++r) t += p[r][r].real();
    tr[i] = t;
    p = matmul(p, Y);
  }
  std::vector<Real> inv_fact(L + 1);
  inv_fact[0] = 1;
  for (int i = 1; i <= L; ++i) inv_fact[i] = inv_fact[i - 1] / i;
  Real s = 0;
  for (int m = 1; m <= L; ++m) {
    const Real B = to_real(bernoulli_number(m));
    if (B == 0) continue;
    for (int i = 0; i <= m; ++i) {
      const int j = m - i;
      s += (j % 2 ? -1 : 1) * B / (2 * m) * inv_fact[i] * inv_fact[j] * tr[i] * tr[j];
    }
  }
  return exp(s);
}

// ---------------------------------------------------------------------------
// saddle-point expansion

struct SaddleExpansion {
  Real saddle;               // y* with e^{y*} + q e^{-y*} = z
  Real action;               // S(y*) = z y* - e^{y*} + q e^{-y*}
  Real prefactor;            // e^{(k-n-1/2) y*} / sqrt(-S''(y*))
  std::vector<Real> series;  // 1 + c_1 hbar + c_2 hbar^2 + ...

  /// Leading form e^{S/hbar} * prefactor * sum_{j<=M} c_j hbar^j.
  Real evaluate(const Real& hbar, int M) const {
    Real s = 0;
    for (int j = 0; j <= M && j < int(series.size()); ++j) s += series[j] * pow(hbar, j);
    return exp(action / hbar) * prefactor * s;
  }
};

/// Steepest descent for hbar^{-1/2}/sqrt(2 pi) int exp((y z - e^y + q e^{-y})/hbar + c y) dy,
/// c = k - n - 1/2, to order hbar^M using Gaussian moments.
inline SaddleExpansion saddle_expansion(int k, const Real& n, const Real& q, const Real& z, int M) {
  const Real disc = z * z - 4 * q;
  if (z <= 0 || disc <= pow(Real(10), -int(Real::default_precision()) / 2))
    throw DomainError("saddle_expansion: degenerate or missing real saddle");
  const Real ys = log((z + sqrt(disc)) / 2);
  const Real c = Real(k) - n - Real(1) / 2;
  const Real e = exp(ys), em = exp(-ys);
  // derivatives S^{(m)}(y*) for m >= 2
  auto dS = [&](int m) { return -e + (m % 2 ? -1 : 1) * q * em; };
  const Real A = -dS(2);
  if (A <= 0) throw DomainError("saddle_expansion: saddle is not a maximum");
  // exponent after y = y* + sqrt(hbar) v:  -A v^2/2 + sum_{m>=3} hbar^{m/2-1} S^(m) v^m/m! + sqrt(hbar) c v
  // expand exp of the perturbation as a polynomial in r = sqrt(hbar) with polynomial-in-v coefficients
  const int R = 2 * M;  // powers of r kept
  const int V = 3 * R + 2;
  using PolyV = std::vector<Real>;  // coefficients in v
  std::vector<PolyV> pert(R + 1, PolyV(V + 1, Real(0)));
  pert[1][1] += c;
  Real fact = 2;
  for (int m = 3; m - 2 <= R; ++m) {
    fact *= m;
    pert[m - 2][m] += dS(m) / fact;
  }
  std::vector<PolyV> total(R + 1, PolyV(V + 1, Real(0))), power(R + 1, PolyV(V + 1, Real(0)));
  total[0][0] = 1;
  power[0][0] = 1;
  for (int j = 1; j <= R; ++j) {
    std::vector<PolyV> next(R + 1, PolyV(V + 1, Real(0)));
    for (int a = 0; a <= R; ++a)
      for (int b = 1; a + b <= R; ++b)
        for (int p = 0; p <= V; ++p) {
          if (power[a][p] == 0) continue;
          for (int s = 0; p + s <= V; ++s)
            if (pert[b][s] != 0) next[a + b][p + s] += power[a][p] * pert[b][s];
        }
    for (auto& row : next)
      for (auto& v : row) v /= j;
    power = next;
    for (int a = 0; a <= R; ++a)
      for (int p = 0; p <= V; ++p) total[a][p] += power[a][p];
  }
  // Gaussian moments <v^{2r}> = (2r-1)!! / A^r
  std::vector<Real> series(M + 1, Real(0));
  for (int a = 0; a <= R; a += 2) {
    Real s = 0;
    Real dfact = 1;
    for (int p = 0; p <= V; p += 2) {
      if (p > 0) dfact *= p - 1;
      s += total[a][p] * dfact / pow(A, p / 2);
    }
    series[a / 2] = s;
  }
  const Real action = z * ys - e + q * em;
  const Real prefactor = exp(c * ys) / sqrt(A);
  return {ys, action, prefactor, series};
}

}  // namespace gwp1::matint
