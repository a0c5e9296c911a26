#include <cmath>
#include <numbers>

#include "conedisp/chebyshev.hpp"
#include "conedisp/errors.hpp"
#include "conedisp/grid_function.hpp"
#include "conedisp/quadrature.hpp"
#include "doctest.h"

using namespace conedisp;

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  auto f = [](double x) { return std::pow(x, 19) + 3 * x * x; };
  CHECK(std::abs(integrate_gl(f, -1.0, 2.0, 10) -
                 ((std::pow(2.0, 20) - 1.0) / 20.0 + 9.0)) < 1e-9);
  double s = 0;
  for (double w : gauss_legendre(33).w) s += w;
  CHECK(std::abs(s - 2.0) < 1e-14);
}

TEST_CASE("adaptive quadrature handles a peaked integrand") {
  auto r = integrate_adaptive([](double x) { return 1.0 / (1e-4 + x * x); }, -1.0, 1.0, 1e-12, 1e-13);
  CHECK(std::abs(r.value - 2.0 / 1e-2 * std::atan(1.0 / 1e-2)) < 1e-8);
}

TEST_CASE("Chebyshev series value, derivative and integral") {
  auto xs = chebyshev_nodes(30, 0.5, 2.0);
  std::vector<double> v;
  for (double x : xs) v.push_back(std::exp(x) * std::sin(3 * x));
  auto s = ChebSeries<double>::from_values(0.5, 2.0, v);
  for (double x : {0.5, 0.77, 1.3, 2.0}) {
    CHECK(std::abs(s(x) - std::exp(x) * std::sin(3 * x)) < 1e-13);
    CHECK(std::abs(s.derivative()(x) - std::exp(x) * (std::sin(3 * x) + 3 * std::cos(3 * x))) < 1e-11);
  }
  auto F = [](double x) { return std::exp(x) * (std::sin(3 * x) - 3 * std::cos(3 * x)) / 10.0; };
  CHECK(std::abs(s.integral()(1.7) - (F(1.7) - F(0.5))) < 1e-13);
}

TEST_CASE("adaptive piecewise fit") {
  auto f = [](double x) { return std::tanh(20 * x) + x; };
  auto p = fit_adaptive(f, -2.0, 2.0, 24, 1e-14, 1.0, 1e-6);
  for (double x = -2.0; x <= 2.0; x += 0.013) CHECK(std::abs(p(x) - f(x)) < 1e-12);
  CHECK(p.panels().size() > 4);
}

TEST_CASE("grid function interpolation order and errors") {
  std::vector<double> x, y;
  for (int i = 0; i <= 40; ++i) {
    x.push_back(i * 0.05);
    y.push_back(std::cos(x.back()));
  }
  GridFunction<double> g(x, y, {}, 5);
  CHECK(std::abs(g(1.234) - std::cos(1.234)) < 1e-9);
  CHECK_THROWS_AS(g(3.0), Error);
  CHECK_THROWS_AS(GridFunction<double>(x, y, {}, 3), Error);
  std::vector<double> bad = {0.0, 1.0, 1.0};
  CHECK_THROWS_AS(GridFunction<double>(bad, {1, 2, 3}), Error);
}
