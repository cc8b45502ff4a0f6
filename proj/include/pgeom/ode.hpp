#pragma once

// Adaptive Dormand-Prince 5(4) integrator with cubic Hermite dense output.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "pgeom/error.hpp"

namespace pgeom::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct Options {
  double rtol = 1e-10;
  double atol = 1e-12;
  double initial_step = 0.0;  // 0 selects a step from the local derivative
  double max_step = 0.0;      // 0 means unbounded
  std::size_t max_steps = 20'000'000;
  std::string failure_message = "integration failed";
};

enum class Control { proceed, stop };

template <std::size_t N>
struct Result {
  double t = 0.0;
  State<N> y{};
  State<N> dy{};
  std::size_t steps = 0;
  bool stopped = false;  // observer requested termination before t1
};

/// Piecewise cubic Hermite interpolant through (t, y, y') nodes.
/// Node times must be strictly monotone (either direction).
template <std::size_t N>
class HermiteTrajectory {
 public:
  void push(double t, const State<N>& y, const State<N>& dy) {
    t_.push_back(t);
    y_.push_back(y);
    dy_.push_back(dy);
  }

  bool empty() const noexcept { return t_.empty(); }
  std::size_t size() const noexcept { return t_.size(); }
  double front_time() const { return t_.front(); }
  double back_time() const { return t_.back(); }
  const std::vector<double>& times() const noexcept { return t_; }
  const State<N>& node(std::size_t i) const { return y_[i]; }
  const State<N>& node_derivative(std::size_t i) const { return dy_[i]; }

  bool covers(double t) const {
    if (t_.empty()) return false;
    const double lo = std::min(t_.front(), t_.back());
    const double hi = std::max(t_.front(), t_.back());
    return t >= lo && t <= hi;
  }

  /// Value (and optionally derivative) at t. Times outside the node range
  /// are clamped to the nearest end segment.
  State<N> evaluate(double t, State<N>* derivative = nullptr) const {
    if (t_.size() == 1) {
      if (derivative) *derivative = dy_[0];
      return y_[0];
    }
    const bool increasing = t_.back() > t_.front();
    std::size_t hi;
    if (increasing) {
      hi = static_cast<std::size_t>(
          std::upper_bound(t_.begin(), t_.end(), t) - t_.begin());
    } else {
      hi = static_cast<std::size_t>(
          std::upper_bound(t_.begin(), t_.end(), t, std::greater<>{}) -
          t_.begin());
    }
    hi = std::clamp<std::size_t>(hi, 1, t_.size() - 1);
    const std::size_t lo = hi - 1;
    const double h = t_[hi] - t_[lo];
    const double s = (t - t_[lo]) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    State<N> out;
    for (std::size_t k = 0; k < N; ++k) {
      out[k] = h00 * y_[lo][k] + h10 * h * dy_[lo][k] + h01 * y_[hi][k] +
               h11 * h * dy_[hi][k];
    }
    if (derivative) {
      const double d00 = (6 * s2 - 6 * s) / h;
      const double d10 = 3 * s2 - 4 * s + 1;
      const double d01 = (-6 * s2 + 6 * s) / h;
      const double d11 = 3 * s2 - 2 * s;
      for (std::size_t k = 0; k < N; ++k) {
        (*derivative)[k] = d00 * y_[lo][k] + d10 * dy_[lo][k] +
                           d01 * y_[hi][k] + d11 * dy_[hi][k];
      }
    }
    return out;
  }

 private:
  std::vector<double> t_;
  std::vector<State<N>> y_;
  std::vector<State<N>> dy_;
};

namespace detail {

template <std::size_t N>
bool all_finite(const State<N>& y) {
  return std::all_of(y.begin(), y.end(),
                     [](double v) { return std::isfinite(v); });
}

template <std::size_t N>
double error_norm(const State<N>& err, const State<N>& y0, const State<N>& y1,
                  const Options& opt) {
  double acc = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    const double sc =
        opt.atol + opt.rtol * std::max(std::abs(y0[k]), std::abs(y1[k]));
    const double e = err[k] / sc;
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(N));
}

}  // namespace detail

/// Integrates y' = rhs(t, y) from t0 to t1 (t1 < t0 integrates backwards).
///
/// `observer(t, y, dy)` is invoked at t0 and after every accepted step. It may
/// return Control::stop to end the integration early. Throws NumericalError
/// carrying `opt.failure_message` on step-size underflow, non-finite state or
/// exhaustion of the step budget.
template <std::size_t N, class Rhs, class Observer>
Result<N> integrate(Rhs&& rhs, double t0, const State<N>& y0, double t1,
                    const Options& opt, Observer&& observer) {
  // Dormand-Prince tableau.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                   a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                   a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                   b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  Result<N> res;
  res.t = t0;
  res.y = y0;
  res.dy = rhs(t0, y0);
  if (!detail::all_finite(res.dy)) throw NumericalError(opt.failure_message);
  if (observer(res.t, res.y, res.dy) == Control::stop || t0 == t1) {
    res.stopped = t0 != t1;
    return res;
  }

  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  double h = opt.initial_step;
  if (h <= 0.0) {
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      const double sc = opt.atol + opt.rtol * std::abs(y0[k]);
      d0 += (y0[k] / sc) * (y0[k] / sc);
      d1 += (res.dy[k] / sc) * (res.dy[k] / sc);
    }
    d0 = std::sqrt(d0 / N);
    d1 = std::sqrt(d1 / N);
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min(h, span);
  }
  if (opt.max_step > 0.0) h = std::min(h, opt.max_step);

  State<N> k2, k3, k4, k5, k6, k7, tmp, ynew, err;
  const State<N>& k1 = res.dy;
  int rejects_in_row = 0;

  while (dir * (t1 - res.t) > 0.0) {
    if (res.steps >= opt.max_steps) throw NumericalError(opt.failure_message);
    const double remaining = std::abs(t1 - res.t);
    bool last = false;
    if (h >= remaining) {
      h = remaining;
      last = true;
    }
    const double hs = dir * h;
    const double t = res.t;
    const State<N>& y = res.y;

    for (std::size_t k = 0; k < N; ++k) tmp[k] = y[k] + hs * a21 * k1[k];
    k2 = rhs(t + c2 * hs, tmp);
    for (std::size_t k = 0; k < N; ++k)
      tmp[k] = y[k] + hs * (a31 * k1[k] + a32 * k2[k]);
    k3 = rhs(t + c3 * hs, tmp);
    for (std::size_t k = 0; k < N; ++k)
      tmp[k] = y[k] + hs * (a41 * k1[k] + a42 * k2[k] + a43 * k3[k]);
    k4 = rhs(t + c4 * hs, tmp);
    for (std::size_t k = 0; k < N; ++k)
      tmp[k] =
          y[k] + hs * (a51 * k1[k] + a52 * k2[k] + a53 * k3[k] + a54 * k4[k]);
    k5 = rhs(t + c5 * hs, tmp);
    for (std::size_t k = 0; k < N; ++k)
      tmp[k] = y[k] + hs * (a61 * k1[k] + a62 * k2[k] + a63 * k3[k] +
                            a64 * k4[k] + a65 * k5[k]);
    k6 = rhs(t + hs, tmp);
    for (std::size_t k = 0; k < N; ++k)
      ynew[k] = y[k] + hs * (b1 * k1[k] + b3 * k3[k] + b4 * k4[k] +
                             b5 * k5[k] + b6 * k6[k]);
    k7 = rhs(t + hs, ynew);
    for (std::size_t k = 0; k < N; ++k)
      err[k] = hs * (e1 * k1[k] + e3 * k3[k] + e4 * k4[k] + e5 * k5[k] +
                     e6 * k6[k] + e7 * k7[k]);

    const bool finite = detail::all_finite(ynew) && detail::all_finite(k7);
    const double en =
        finite ? detail::error_norm(err, y, ynew, opt) : 1e10;

    if (en <= 1.0) {
      res.t = last ? t1 : t + hs;
      res.y = ynew;
      res.dy = k7;
      ++res.steps;
      rejects_in_row = 0;
      if (observer(res.t, res.y, res.dy) == Control::stop) {
        res.stopped = !last;
        return res;
      }
      const double fac =
          en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
      h *= fac;
    } else {
      ++rejects_in_row;
      h *= finite ? std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9) : 0.25;
    }
    if (opt.max_step > 0.0) h = std::min(h, opt.max_step);
    if (h < 1e-14 * std::max(1.0, std::abs(res.t)) || rejects_in_row > 60) {
      throw NumericalError(opt.failure_message);
    }
  }
  return res;
}

template <std::size_t N, class Rhs>
Result<N> integrate(Rhs&& rhs, double t0, const State<N>& y0, double t1,
                    const Options& opt) {
  return integrate<N>(std::forward<Rhs>(rhs), t0, y0, t1, opt,
                      [](double, const State<N>&, const State<N>&) {
                        return Control::proceed;
                      });
}

/// Integrates and records every accepted step for dense evaluation.
template <std::size_t N, class Rhs>
HermiteTrajectory<N> integrate_dense(Rhs&& rhs, double t0, const State<N>& y0,
                                     double t1, const Options& opt) {
  HermiteTrajectory<N> traj;
  integrate<N>(std::forward<Rhs>(rhs), t0, y0, t1, opt,
               [&](double t, const State<N>& y, const State<N>& dy) {
                 traj.push(t, y, dy);
                 return Control::proceed;
               });
  return traj;
}

}  // namespace pgeom::ode
