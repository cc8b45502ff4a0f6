#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

namespace pgeom {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

inline Vec unit_vector(int dim, int axis) {
  Vec e = Vec::Zero(dim);
  e(axis) = 1.0;
  return e;
}

/// Singular values of a symmetric matrix, in descending order.
inline std::vector<double> symmetric_singular_values(const Mat& m) {
  std::vector<double> out;
  if (m.size() == 0) return out;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()),
                                        Eigen::EigenvaluesOnly);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    out.push_back(std::abs(es.eigenvalues()(i)));
  std::sort(out.begin(), out.end(), std::greater<>{});
  return out;
}

/// Eigenvalues of a symmetric matrix, ascending.
inline std::vector<double> symmetric_eigenvalues(const Mat& m) {
  std::vector<double> out;
  if (m.size() == 0) return out;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()),
                                        Eigen::EigenvaluesOnly);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    out.push_back(es.eigenvalues()(i));
  return out;
}

/// Numerical rank: singular values above max(relative * largest, floor).
inline int numerical_rank(const std::vector<double>& singular_values,
                          double relative, double floor) {
  if (singular_values.empty()) return 0;
  const double largest = singular_values.front();
  const double threshold = std::max(relative * largest, floor);
  return static_cast<int>(std::count_if(
      singular_values.begin(), singular_values.end(),
      [threshold](double s) { return s > threshold; }));
}

/// Stable log(sinh(x)/x) for x >= 0.
inline double log_sinhc(double x) {
  x = std::abs(x);
  if (x < 1e-4) return x * x / 6.0;
  if (x < 20.0) return std::log(std::sinh(x) / x);
  return x - std::log(2.0) + std::log1p(-std::exp(-2.0 * x)) - std::log(x);
}

/// Stable log(cosh(x)).
inline double log_cosh(double x) {
  x = std::abs(x);
  return x + std::log1p(std::exp(-2.0 * x)) - std::log(2.0);
}

}  // namespace pgeom
