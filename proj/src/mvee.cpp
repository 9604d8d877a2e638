#include <algorithm>
#include <cmath>
#include <numbers>

#include "mwt/errors.hpp"
#include "mwt/reducing.hpp"

namespace mwt {

namespace {

double frac(double x) { return x - std::floor(x); }

// Inverse of the standard normal CDF (Acklam's rational approximation, refined
// by one Halley step); used to push low-discrepancy points onto the sphere.
double inverse_normal(double u) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                             1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                             6.680131188771972e+01,  -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                             -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                             3.754408661907416e+00};
  double x;
  if (u < 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (u > 1.0 - 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - u));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = u - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - u;
  const double g = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - g / (1.0 + 0.5 * x * g);
}

}  // namespace

std::vector<Vector> sphere_directions(int m, int count) {
  if (m < 1 || m > kMaxMatrixDim) throw InvalidArgumentError("direction dimension must be 1..4");
  if (count < 1) throw InvalidArgumentError("direction count must be positive");
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  const double golden = 0.5 * (1.0 + std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    Vector z(m);
    if (m == 1) {
      const double th = 2.0 * std::numbers::pi * k / count;
      z(0) = {std::cos(th), std::sin(th)};
    } else if (m == 2) {
      // Fibonacci lattice on the Bloch sphere S^2 = S^3 / U(1), plus a
      // quasi-random global phase.
      const double cz = 1.0 - 2.0 * (k + 0.5) / count;
      const double th = std::acos(std::clamp(cz, -1.0, 1.0));
      const double ph = 2.0 * std::numbers::pi * frac(k / golden);
      const double g = 2.0 * std::numbers::pi * frac(k * std::numbers::sqrt2);
      const cplx phase{std::cos(g), std::sin(g)};
      z(0) = phase * std::cos(0.5 * th);
      z(1) = phase * std::polar(std::sin(0.5 * th), ph);
    } else {
      // Kronecker sequence with the generalized golden ratio of dimension 2m,
      // mapped through the normal quantile and normalized.
      const int dim = 2 * m;
      double phi = 2.0;
      for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (dim + 1));
      double s = 0.0;
      std::vector<double> g(static_cast<std::size_t>(dim));
      for (int i = 0; i < dim; ++i) {
        const double alpha = std::pow(1.0 / phi, i + 1);
        g[static_cast<std::size_t>(i)] = inverse_normal(frac(0.5 + alpha * (k + 1)));
        s += g[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(i)];
      }
      s = std::sqrt(s);
      for (int i = 0; i < m; ++i)
        z(i) = {g[static_cast<std::size_t>(2 * i)] / s, g[static_cast<std::size_t>(2 * i + 1)] / s};
    }
    out.push_back(z);
  }
  return out;
}

MveeResult mvee(const std::vector<Vector>& points, double tol, int max_iter) {
  if (points.empty()) throw InvalidArgumentError("MVEE needs at least one point");
  const int m = static_cast<int>(points.front().size());
  const std::size_t K = points.size();
  const double d = m;
  std::vector<double> u(K, 1.0 / static_cast<double>(K));
  std::vector<double> M(K);

  auto gram = [&] {
    Matrix x = Matrix::Zero(m, m);
    for (std::size_t k = 0; k < K; ++k) x += u[k] * (points[k] * points[k].adjoint());
    return x;
  };

  Matrix x = gram();
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::LLT<Matrix> llt(x);
    if (llt.info() != Eigen::Success) throw FitError("MVEE: points do not span C^m");
    for (std::size_t k = 0; k < K; ++k) M[k] = points[k].dot(llt.solve(points[k])).real();
    std::size_t jmax = 0, jmin = K;
    for (std::size_t k = 0; k < K; ++k) {
      if (M[k] > M[jmax]) jmax = k;
      if (u[k] > 0.0 && (jmin == K || M[k] < M[jmin])) jmin = k;
    }
    const double up = M[jmax] / d - 1.0;
    const double down = 1.0 - M[jmin] / d;
    if (up <= tol) {
      MveeResult r;
      r.h = (x * d).inverse();
      r.h = 0.5 * (r.h + r.h.adjoint());
      r.iterations = it;
      return r;
    }
    if (up >= down) {
      const double a = (M[jmax] - d) / (d * (M[jmax] - 1.0));
      for (double& v : u) v *= 1.0 - a;
      u[jmax] += a;
    } else {
      // Away step: shift weight off the least active support point.
      const double cap = u[jmin] / (1.0 - u[jmin]);
      const double a = M[jmin] > 1.0 ? std::min((d - M[jmin]) / (d * (M[jmin] - 1.0)), cap) : cap;
      for (double& v : u) v *= 1.0 + a;
      u[jmin] -= a;
      if (u[jmin] < 1e-300) u[jmin] = 0.0;
    }
    x = gram();
  }
  throw FitError("MVEE did not converge within " + std::to_string(max_iter) + " iterations");
}

}  // namespace mwt
