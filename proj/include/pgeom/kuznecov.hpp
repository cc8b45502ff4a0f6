#pragma once

// Period integrals of L^2-normalized Laplace eigenfunctions over closed
// submanifolds of the flat torus R^n / 2piZ^n and the round 2-sphere, and the
// growth of their windowed quadratic sums.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "pgeom/curvature.hpp"
#include "pgeom/error.hpp"
#include "pgeom/fit.hpp"
#include "pgeom/linalg.hpp"
#include "pgeom/quadrature.hpp"

namespace pgeom {

using Complex = std::complex<double>;
using IntVec = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;
using IntMat = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr int default_period_nodes = 2048;

/// e_m(x) = (2pi)^{-n/2} exp(i <m, x>).
inline Complex torus_eigenfunction(const IntVec& m, const Vec& x) {
  const int n = static_cast<int>(m.size());
  double phase = 0.0;
  for (int i = 0; i < n; ++i) phase += static_cast<double>(m(i)) * x(i);
  return std::pow(two_pi, -0.5 * n) * Complex(std::cos(phase), std::sin(phase));
}

namespace detail {

// Point and arc-length element of a closed curve chart; exact for graphs.
inline std::pair<Vec, double> curve_sample(const HypersurfaceChart& sigma, double t) {
  Vec u(1);
  u(0) = t;
  if (sigma.kind() == ChartKind::torus_graph) {
    const auto [amp, freq, phase, offset] = sigma.graph_parameters();
    (void)offset;
    const double slope = amp * freq * std::cos(freq * t + phase);
    return {sigma(u), std::sqrt(1.0 + slope * slope)};
  }
  const ChartJet jet = chart_jet(sigma, u);
  return {jet.point, jet.area_element};
}

}  // namespace detail

/// Period of e_m over a torus chart by the trapezoid rule (spectrally
/// accurate on periodic charts). Flat subtori use a separable product rule.
inline Complex torus_period(const IntVec& m, const HypersurfaceChart& sigma,
                            int nodes = default_period_nodes) {
  const MetricModel& model = sigma.model();
  if (model.kind() != ModelKind::flat_torus) throw InvalidInput("torus_period needs a torus chart");
  if (m.size() != model.dim()) throw InvalidInput("frequency has wrong dimension");
  const int n = model.dim();
  const double h = two_pi / nodes;
  if (sigma.kind() == ChartKind::flat_subtorus) {
    const Eigen::MatrixXi& a = sigma.lattice_directions();
    const Vec& x0 = sigma.offset();
    double phase0 = 0.0;
    for (int i = 0; i < n; ++i) phase0 += static_cast<double>(m(i)) * x0(i);
    Complex acc = std::pow(two_pi, -0.5 * n) * Complex(std::cos(phase0), std::sin(phase0)) *
                  *sigma.exact_area_element();
    for (int c = 0; c < a.cols(); ++c) {
      std::int64_t freq = 0;
      for (int i = 0; i < n; ++i) freq += m(i) * a(i, c);
      std::vector<Complex> terms(nodes);
      for (int k = 0; k < nodes; ++k) {
        // reduce the argument exactly in integers before scaling
        const std::int64_t j = ((freq % nodes) * k) % nodes;
        const double arg = two_pi * static_cast<double>(j) / nodes;
        terms[k] = Complex(std::cos(arg), std::sin(arg));
      }
      acc *= pairwise_sum(terms) * h;
    }
    return acc;
  }
  if (sigma.dim() != 1) throw InvalidInput("quadrature periods support curves and flat subtori");
  std::vector<Complex> terms(nodes);
  for (int k = 0; k < nodes; ++k) {
    const auto [x, area] = detail::curve_sample(sigma, h * k);
    terms[k] = torus_eigenfunction(m, x) * area;
  }
  return pairwise_sum(terms) * h;
}

/// Closed form over a flat subtorus x0 + A u:
/// (2pi)^{d-n/2} sqrt(det A^T A) exp(i <m, x0>) if A^T m = 0, else 0.
inline Complex torus_period_exact(const IntVec& m, const HypersurfaceChart& sigma) {
  if (sigma.kind() != ChartKind::flat_subtorus) throw InvalidInput("exact periods need a flat subtorus");
  const Eigen::MatrixXi& a = sigma.lattice_directions();
  const int n = static_cast<int>(a.rows());
  for (int c = 0; c < a.cols(); ++c) {
    std::int64_t s = 0;
    for (int i = 0; i < n; ++i) s += m(i) * a(i, c);
    if (s != 0) return Complex(0.0, 0.0);
  }
  double phase0 = 0.0;
  for (int i = 0; i < n; ++i) phase0 += static_cast<double>(m(i)) * sigma.offset()(i);
  return std::pow(two_pi, a.cols() - 0.5 * n) * *sigma.exact_area_element() *
         Complex(std::cos(phase0), std::sin(phase0));
}

/// Integer direction proportional to a real one, with entries up to
/// `max_entry`; a line or plane along an irrational direction never closes.
inline Eigen::VectorXi rational_direction(const Vec& dir, int max_entry = 1000) {
  const double scale = dir.cwiseAbs().maxCoeff();
  if (!(scale > 0)) throw InvalidInput("zero direction");
  const Vec v = dir / scale;
  for (int q = 1; q <= max_entry; ++q) {
    const Vec w = v * q;
    bool ok = true;
    for (int i = 0; i < w.size(); ++i)
      if (std::abs(w(i) - std::round(w(i))) > 1e-9 * q) ok = false;
    if (ok) {
      Eigen::VectorXi out(w.size());
      int g = 0;
      for (int i = 0; i < w.size(); ++i) {
        out(i) = static_cast<int>(std::lround(w(i)));
        g = std::gcd(g, std::abs(out(i)));
      }
      return out / g;
    }
  }
  throw InvalidInput("not closed in torus");
}

/// Integer basis (columns) of {m in Z^n : A^T m = 0}, by unimodular column
/// reduction of A^T.
inline IntMat integer_kernel(const Eigen::MatrixXi& a) {
  const int n = static_cast<int>(a.rows());
  const int d = static_cast<int>(a.cols());
  IntMat t = a.transpose().cast<std::int64_t>();  // d x n
  IntMat u = IntMat::Identity(n, n);
  int pivot_col = 0;
  for (int row = 0; row < d && pivot_col < n; ++row) {
    // Euclid across columns pivot_col.. to leave a single nonzero entry.
    for (;;) {
      int best = -1;
      for (int c = pivot_col; c < n; ++c)
        if (t(row, c) != 0 && (best < 0 || std::llabs(t(row, c)) < std::llabs(t(row, best))))
          best = c;
      if (best < 0) break;
      t.col(pivot_col).swap(t.col(best));
      u.col(pivot_col).swap(u.col(best));
      bool done = true;
      for (int c = pivot_col + 1; c < n; ++c) {
        if (t(row, c) == 0) continue;
        const std::int64_t q = t(row, c) / t(row, pivot_col);
        t.col(c) -= q * t.col(pivot_col);
        u.col(c) -= q * u.col(pivot_col);
        if (t(row, c) != 0) done = false;
      }
      if (done) break;
    }
    if (t(row, pivot_col) != 0) ++pivot_col;
  }
  return u.rightCols(n - pivot_col);
}

struct KuznecovEntry {
  IntVec index;          // lattice point m, or (l, k) on the sphere
  double eigenvalue = 0.0;
  Complex period;
  double abs2 = 0.0;     // |period|^2 summed over the row's eigenfunctions
  double cumulative = 0.0;
};

struct KuznecovSeries {
  std::vector<KuznecovEntry> entries;  // sorted by eigenvalue
  DecayFit fit;                        // growth of N(lambda)
  double predicted_exponent = 0.0;
  std::vector<double> sample_lambda;
  std::vector<double> sample_count;
  double sup_period = 0.0;

  /// N(lambda) = sum of |period|^2 over eigenvalues <= lambda.
  double cumulative_at(double lambda) const {
    double n = 0.0;
    for (const auto& e : entries) {
      if (e.eigenvalue > lambda * (1 + 1e-12)) break;
      n = e.cumulative;
    }
    return n;
  }
};

namespace detail {

inline void finish_series(KuznecovSeries& s, double cap) {
  double acc = 0.0;
  for (auto& e : s.entries) {
    acc += e.abs2;
    e.cumulative = acc;
    s.sup_period = std::max(s.sup_period, std::abs(e.period));
  }
  const double lo = std::max(1.0, cap / 32.0);
  const int samples = 16;
  for (int i = 0; i < samples; ++i) {
    const double lam = lo * std::pow(cap / lo, static_cast<double>(i) / (samples - 1));
    s.sample_lambda.push_back(lam);
    s.sample_count.push_back(s.cumulative_at(lam));
  }
  s.fit = fit_loglog(s.sample_lambda, s.sample_count);
}

inline bool lattice_less(const IntVec& a, const IntVec& b) {
  const std::int64_t na = a.squaredNorm(), nb = b.squaredNorm();
  if (na != nb) return na < nb;
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

// Twiddle-table evaluation of all curve periods for |m| <= cap.
inline std::vector<KuznecovEntry> curve_periods(const HypersurfaceChart& sigma, double cap,
                                                int nodes) {
  const int n = sigma.model().dim();
  if (n != 2 || sigma.dim() != 1) throw InvalidInput("curve periods need a curve in the 2-torus");
  const double h = two_pi / nodes;
  std::vector<Vec> pts(nodes);
  std::vector<double> weight(nodes);
  for (int k = 0; k < nodes; ++k) {
    const auto [x, area] = detail::curve_sample(sigma, h * k);
    pts[k] = x;
    weight[k] = area * h / two_pi;
  }
  const int c = static_cast<int>(std::floor(cap));
  std::vector<std::vector<Complex>> e1(2 * c + 1, std::vector<Complex>(nodes)),
      e2(2 * c + 1, std::vector<Complex>(nodes));
  for (int j = -c; j <= c; ++j)
    for (int k = 0; k < nodes; ++k) {
      e1[j + c][k] = std::polar(1.0, j * pts[k](0));
      e2[j + c][k] = std::polar(1.0, j * pts[k](1)) * weight[k];
    }
  std::vector<KuznecovEntry> out;
  std::vector<Complex> terms(nodes);
  for (int m1 = -c; m1 <= c; ++m1)
    for (int m2 = -c; m2 <= c; ++m2) {
      if (m1 * m1 + m2 * m2 > cap * cap) continue;
      for (int k = 0; k < nodes; ++k) terms[k] = e1[m1 + c][k] * e2[m2 + c][k];
      KuznecovEntry e;
      e.index = IntVec(2);
      e.index << m1, m2;
      e.eigenvalue = std::sqrt(static_cast<double>(m1 * m1 + m2 * m2));
      e.period = pairwise_sum(terms);
      e.abs2 = std::norm(e.period);
      out.push_back(e);
    }
  return out;
}

}  // namespace detail

/// Kuznecov sums over |m| <= cap. Flat subtori enumerate the integer kernel
/// of A^T (all other periods vanish); curves are integrated numerically.
inline KuznecovSeries torus_kuznecov(const HypersurfaceChart& sigma, double cap,
                                     int nodes = default_period_nodes) {
  if (!(cap >= 1 && cap <= 2000)) throw InvalidInput("lattice cap must lie in [1, 2000]");
  const MetricModel& model = sigma.model();
  if (model.kind() != ModelKind::flat_torus) throw InvalidInput("torus_kuznecov needs a torus chart");
  const int n = model.dim();
  KuznecovSeries s;
  s.predicted_exponent = n - sigma.dim();
  if (sigma.kind() == ChartKind::flat_subtorus) {
    const IntMat k = integer_kernel(sigma.lattice_directions());
    const int kd = static_cast<int>(k.cols());
    const Mat kf = k.cast<double>();
    const Mat pinv = kf.completeOrthogonalDecomposition().pseudoInverse();
    std::vector<std::int64_t> bound(kd);
    std::size_t cells = 1;
    for (int i = 0; i < kd; ++i) {
      bound[i] = static_cast<std::int64_t>(std::floor(pinv.row(i).norm() * cap)) + 1;
      cells *= static_cast<std::size_t>(2 * bound[i] + 1);
    }
    if (cells > 50'000'000) throw InvalidInput("count budget exceeded");
    std::vector<std::int64_t> c(kd, 0);
    for (std::size_t idx = 0; idx < cells; ++idx) {
      std::size_t rest = idx;
      for (int i = 0; i < kd; ++i) {
        const std::size_t w = static_cast<std::size_t>(2 * bound[i] + 1);
        c[i] = static_cast<std::int64_t>(rest % w) - bound[i];
        rest /= w;
      }
      IntVec m = IntVec::Zero(n);
      for (int i = 0; i < kd; ++i) m += c[i] * k.col(i);
      const double norm2 = static_cast<double>(m.squaredNorm());
      if (norm2 > cap * cap) continue;
      KuznecovEntry e;
      e.index = m;
      e.eigenvalue = std::sqrt(norm2);
      e.period = torus_period_exact(m, sigma);
      e.abs2 = std::norm(e.period);
      s.entries.push_back(e);
    }
  } else {
    s.entries = detail::curve_periods(sigma, cap, nodes);
  }
  std::sort(s.entries.begin(), s.entries.end(), [](const KuznecovEntry& a, const KuznecovEntry& b) {
    return detail::lattice_less(a.index, b.index);
  });
  detail::finish_series(s, cap);
  return s;
}

/// P_l(0) by the recurrence P_l(0) = -(l-1)/l P_{l-2}(0).
inline double legendre_at_zero(int l) {
  if (l < 0) throw InvalidInput("degree must be nonnegative");
  if (l % 2 == 1) return 0.0;
  double p = 1.0;
  for (int k = 2; k <= l; k += 2) p *= -static_cast<double>(k - 1) / k;
  return p;
}

/// Period of the unit-normalized zonal harmonic Y_l^0 over the equator.
inline double sphere_zonal_period(int l) {
  return two_pi * std::sqrt((2.0 * l + 1.0) / (4.0 * pi)) * legendre_at_zero(l);
}

/// Orthonormal associated Legendre function: Y_l^k = p(l, k, cos theta)
/// e^{i k phi} has unit L^2 norm on S^2 (k >= 0).
inline double normalized_legendre(int l, int k, double x) {
  if (k < 0 || k > l) throw InvalidInput("order must lie in [0, l]");
  double pkk = std::sqrt(1.0 / (4.0 * pi));
  const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
  for (int i = 1; i <= k; ++i) pkk *= -std::sqrt((2.0 * i + 1.0) / (2.0 * i)) * s;
  if (l == k) return pkk;
  double prev = pkk;
  double cur = x * std::sqrt(2.0 * k + 3.0) * pkk;
  for (int j = k + 2; j <= l; ++j) {
    const double a = std::sqrt((4.0 * j * j - 1.0) / (static_cast<double>(j) * j - static_cast<double>(k) * k));
    const double b = std::sqrt(((j - 1.0) * (j - 1.0) - static_cast<double>(k) * k) /
                               (4.0 * (j - 1.0) * (j - 1.0) - 1.0));
    const double next = a * (x * cur - b * prev);
    prev = cur;
    cur = next;
  }
  return cur;
}

/// L^2(S^2) norm squared of Y_l^k by Gauss-Legendre in cos theta and the
/// trapezoid rule in phi.
inline double sphere_harmonic_norm2(int l, int k, int order = 0) {
  if (order <= 0) order = l + 9;  // exact for degree 2l + 16
  const GaussRule& g = gauss_legendre(order);
  double acc = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double p = normalized_legendre(l, k, g.nodes[i]);
    acc += g.weights[i] * p * p;
  }
  return acc * two_pi;  // |e^{ik phi}|^2 integrates to 2pi
}

/// Equator period of Y_l^k by trapezoid quadrature in phi.
inline Complex sphere_period_quadrature(int l, int k, int nodes) {
  const double p = normalized_legendre(l, std::abs(k), 0.0);
  std::vector<Complex> terms(nodes);
  for (int j = 0; j < nodes; ++j) terms[j] = std::polar(p, k * two_pi * j / nodes);
  return pairwise_sum(terms) * (two_pi / nodes);
}

inline constexpr int sphere_quadrature_degree_limit = 50;

/// Kuznecov sums for the equator of S^2 over degrees l <= cap, eigenvalue
/// sqrt(l(l+1)). Nonzonal terms are integrated for l <= 50 and vanish by
/// symmetry beyond.
inline KuznecovSeries sphere_kuznecov(int cap) {
  if (cap < 1 || cap > 500) throw InvalidInput("degree cap must lie in [1, 500]");
  KuznecovSeries s;
  s.predicted_exponent = 1.0;
  const int nodes = 2 * cap + 16;
  for (int l = 0; l <= cap; ++l) {
    KuznecovEntry e;
    e.index = IntVec(2);
    e.index << l, 0;
    e.eigenvalue = std::sqrt(static_cast<double>(l) * (l + 1));
    e.period = Complex(sphere_zonal_period(l), 0.0);
    e.abs2 = std::norm(e.period);
    if (l <= sphere_quadrature_degree_limit)
      for (int k = 1; k <= l; ++k)
        e.abs2 += std::norm(sphere_period_quadrature(l, k, nodes)) +
                  std::norm(sphere_period_quadrature(l, -k, nodes));
    s.entries.push_back(e);
  }
  detail::finish_series(s, std::sqrt(static_cast<double>(cap) * (cap + 1)));
  s.sup_period = 0.0;
  for (const auto& e : s.entries) s.sup_period = std::max(s.sup_period, std::abs(e.period));
  return s;
}

namespace detail {

inline std::int64_t count_squares(int n, std::int64_t rem) {
  if (n == 1) {
    if (rem == 0) return 1;
    const auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(rem))));
    return r * r == rem ? 2 : 0;
  }
  std::int64_t total = 0;
  const auto top = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(rem)) + 1e-9));
  for (std::int64_t x = -top; x <= top; ++x) {
    if (x * x > rem) continue;
    total += count_squares(n - 1, rem - x * x);
  }
  return total;
}

}  // namespace detail

/// #{m in Z^n : |m|^2 = lambda2}.
inline std::int64_t lattice_sphere_count(int n, std::int64_t lambda2) {
  if (n < 1) throw InvalidInput("dimension must be positive");
  if (lambda2 < 0) return 0;
  if (static_cast<double>(lambda2) > 1e8 / std::pow(2.0, n)) throw InvalidInput("count budget exceeded");
  return detail::count_squares(n, lambda2);
}

struct ParsevalCheck {
  double partial_sum = 0.0;  // sum_{|m| <= cap} |<f, e_m>|^2
  double norm2 = 0.0;        // ||f||^2
};

/// Bessel-inequality sanity check for f(x) = exp(cos x1 + sin x2) on T^2.
inline ParsevalCheck parseval_check(double cap, int nodes = 256) {
  const double h = two_pi / nodes;
  const int c = static_cast<int>(std::floor(cap));
  std::vector<Complex> g(2 * c + 1), k(2 * c + 1);
  for (int j = -c; j <= c; ++j) {
    Complex ag = 0, ak = 0;
    for (int i = 0; i < nodes; ++i) {
      const double x = h * i;
      ag += std::exp(std::cos(x)) * std::polar(1.0, -j * x);
      ak += std::exp(std::sin(x)) * std::polar(1.0, -j * x);
    }
    g[j + c] = ag * h;
    k[j + c] = ak * h;
  }
  ParsevalCheck out;
  for (int m1 = -c; m1 <= c; ++m1)
    for (int m2 = -c; m2 <= c; ++m2) {
      if (m1 * m1 + m2 * m2 > cap * cap) continue;
      out.partial_sum += std::norm(g[m1 + c] * k[m2 + c] / two_pi);
    }
  double n1 = 0, n2 = 0;
  for (int i = 0; i < nodes; ++i) {
    n1 += std::exp(2 * std::cos(h * i)) * h;
    n2 += std::exp(2 * std::sin(h * i)) * h;
  }
  out.norm2 = n1 * n2;
  return out;
}

}  // namespace pgeom
