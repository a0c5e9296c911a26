#include "conedisp/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace conedisp {

namespace {
GaussRule build_rule(int n) {
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  return r;
}
}  // namespace

const GaussRule& gauss_legendre(int n) {
  static std::mutex m;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int n) {
  const auto& r = gauss_legendre(n);
  double c = 0.5 * (a + b), h = 0.5 * (b - a), s = 0.0;
  for (int i = 0; i < n; ++i) s += r.w[i] * f(c + h * r.x[i]);
  return s * h;
}

namespace {
void adapt(const std::function<double(double)>& f, double a, double b, double whole,
           double abs_tol, double rel_tol, int depth, AdaptiveResult& out) {
  double m = 0.5 * (a + b);
  double left = integrate_gl(f, a, m), right = integrate_gl(f, m, b);
  double err = std::abs(left + right - whole);
  if (err <= std::max(abs_tol, rel_tol * std::abs(left + right)) || depth <= 0) {
    out.value += left + right;
    out.error += err;
    out.panels += 2;
    return;
  }
  adapt(f, a, m, left, 0.5 * abs_tol, rel_tol, depth - 1, out);
  adapt(f, m, b, right, 0.5 * abs_tol, rel_tol, depth - 1, out);
}
}  // namespace

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, double rel_tol, int max_depth) {
  AdaptiveResult out;
  if (a == b) return out;
  adapt(f, a, b, integrate_gl(f, a, b), abs_tol, rel_tol, max_depth, out);
  return out;
}

}  // namespace conedisp
