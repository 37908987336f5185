#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "chds/discretization.hpp"
#include "chds/fe_space.hpp"
#include "chds/mesh.hpp"

namespace testing {

using chds::Point;

inline Eigen::MatrixXd dense(const chds::SparseMatrix& m) { return Eigen::MatrixXd(m); }

/// Collapsed (Duffy) Gauss-Legendre rule on a triangle, independent of the library's 7-point rule.
/// Returns (barycentric, weight) pairs with weights summing to one.
inline std::vector<std::pair<std::array<double, 3>, double>> duffy_rule(int order) {
  // Gauss-Legendre nodes on [0, 1] by Newton iteration on P_order.
  std::vector<double> x(order), w(order);
  for (int i = 0; i < order; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = order * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= order; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = order * (z * p1 - p0) / (z * z - 1.0);
    x[i] = 0.5 * (1.0 - z);
    w[i] = 1.0 / ((1.0 - z * z) * dp * dp);  // half of the [-1, 1] weight
  }
  std::vector<std::pair<std::array<double, 3>, double>> rule;
  for (int i = 0; i < order; ++i)
    for (int j = 0; j < order; ++j) {
      const double s = x[i], t = x[j] * (1.0 - x[i]);
      // reference triangle area 1/2, Jacobian (1 - s); normalize to total weight 1
      rule.push_back({{1.0 - s - t, s, t}, 2.0 * w[i] * w[j] * (1.0 - x[i])});
    }
  return rule;
}

/// Integral over the mesh of g evaluated on the P1 interpolant values (per point) with a
/// high-order collapsed rule.
inline double integrate_p1_oracle(const chds::Mesh& mesh, const Eigen::VectorXd& coef,
                                  const std::function<double(double)>& g, int order = 8) {
  const auto rule = duffy_rule(order);
  double total = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const Point a = mesh.vertices()[tri[0]], b = mesh.vertices()[tri[1]], c = mesh.vertices()[tri[2]];
    const double area = 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
    for (const auto& [l, w] : rule) total += area * w * g(l[0] * coef[tri[0]] + l[1] * coef[tri[1]] + l[2] * coef[tri[2]]);
  }
  return total;
}

inline Eigen::VectorXd random_vector(int n, std::mt19937& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

/// Random P1 coefficients with (v, 1) = 0.
inline Eigen::VectorXd random_mean_zero(const chds::Discretization& disc, std::mt19937& rng) {
  Eigen::VectorXd v = random_vector(disc.scalar_space()->dof_count(), rng);
  v.array() -= disc.ones_mass().dot(v) / disc.area();
  return v;
}

/// Least-squares slope of log(err) against log(h).
inline double fitted_rate(const std::vector<double>& hs, const std::vector<double>& errs) {
  const int n = static_cast<int>(hs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(hs[i]), ly = std::log(errs[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace testing
