#pragma once
#include <complex>
#include <functional>
#include <vector>

namespace conedisp {

struct GaussRule {
  std::vector<double> x;  // on [-1,1], increasing
  std::vector<double> w;
};

// Cached Gauss-Legendre rule with n points.
const GaussRule& gauss_legendre(int n);

// Gauss-Legendre with n points on [a,b].
double integrate_gl(const std::function<double(double)>& f, double a, double b, int n = 20);

struct AdaptiveResult {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
};

// Recursive bisection comparing a 20-point rule with its two halves.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, double rel_tol, int max_depth = 40);

}  // namespace conedisp
