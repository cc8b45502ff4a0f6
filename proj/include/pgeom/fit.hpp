#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pgeom/error.hpp"

namespace pgeom {

/// Least-squares line through (log x, log y).
struct DecayFit {
  double exponent = 0.0;  // slope
  double constant = 0.0;  // intercept, log scale
  double residual = 0.0;  // max |log y - fitted|
  int points = 0;
};

inline DecayFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("fit needs at least two points");
  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0)) throw InvalidInput("fit abscissae must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(std::max(y[i], std::numeric_limits<double>::min()));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  DecayFit f;
  f.points = static_cast<int>(n);
  f.exponent = sxx > 0 ? sxy / sxx : 0.0;
  f.constant = my - f.exponent * mx;
  for (std::size_t i = 0; i < n; ++i)
    f.residual = std::max(f.residual, std::abs(ly[i] - f.constant - f.exponent * lx[i]));
  return f;
}

}  // namespace pgeom
