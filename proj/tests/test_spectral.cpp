#include <doctest.h>

#include <cmath>
#include <json.hpp>
#include <numbers>

#include "conedisp/errors.hpp"
#include "conedisp/spectral.hpp"

using namespace conedisp;
using std::numbers::pi;

namespace {

double bump(double u) { return std::abs(u) < 1 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0; }

const ReducedOperator& free_line() {
  static const ReducedOperator op = make_model_operator(0.5, [](double) { return 0.0; });
  return op;
}

std::vector<double> free_points() {
  std::vector<double> xs = {-3, 0, 2, 5, 40, 11};
  for (double x : bump_nodes(0.0, 3.0, 48)) xs.push_back(x);
  return xs;
}

const SpectralCache& free_cache() {
  static const SpectralCache c(free_line(), free_points());
  return c;
}

// no bound states, a well and an inverse-square tail
const ReducedOperator& well() {
  static const ReducedOperator op = [] {
    ModelOptions mo;
    mo.symmetric = true;
    const double nu = 1.5, k = nu * nu - 0.25;
    return make_model_operator(
        nu, [k](double x) { return k / (1 + x * x) - 0.5 / std::pow(std::cosh(x), 2); }, mo);
  }();
  return op;
}

const SpectralCache& well_cache() {
  static const SpectralCache c = [] {
    std::vector<double> xs = {-4, 1, 3};
    for (double x : bump_nodes(1.0, 1.0, 40)) xs.push_back(x);
    return SpectralCache(well(), xs);
  }();
  return c;
}

cd free_schrodinger(double t, double D) {
  return std::conj(std::exp(cd(0, D * D / (4 * t))) / std::sqrt(cd(0, 4 * pi * t)));
}

KernelOptions window(double a, double b) {
  KernelOptions k;
  k.window = a;
  k.window_end = b;
  return k;
}

}  // namespace

TEST_CASE("free density is cos(lambda (x - y)) / pi") {
  const auto& op = free_line();
  for (double l : {1e-3, 0.4, 3.0, 17.0})
    for (auto [x, y] : {std::pair{0.0, 0.0}, {2.0, -3.0}, {-7.5, 4.0}})
      CHECK(density(op, l, x, y) == doctest::Approx(std::cos(l * (x - y)) / pi).epsilon(1e-9));
  CHECK_THROWS_AS(density(op, 0.0, 0, 0), Error);
}

TEST_CASE("cached density matches direct evaluation") {
  const auto& c = free_cache();
  for (double l : {1e-4, 0.3, 1.7, 7.3, 25.0})
    for (auto [i, j] : {std::pair{2, 0}, {4, 0}, {3, 4}, {1, 1}}) {
      double D = c.points()[i] - c.points()[j];
      CHECK(std::abs(c.density(l, i, j) - std::cos(l * D) / pi) < 1e-8);
    }
  const auto& w = well_cache();
  for (double l : {2e-4, 0.05, 0.9, 4.2, 19.0}) {
    for (auto [i, j] : {std::pair{0, 1}, {2, 0}, {1, 2}, {2, 2}}) {
      double ref = density(well(), l, w.points()[i], w.points()[j]);
      CHECK(std::abs(w.density(l, i, j) - ref) < 1e-7 * (1 + std::abs(ref)));
      CHECK(w.density(l, i, j) == doctest::Approx(w.density(l, j, i)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(w.density(40.0, 0, 0), Error);
  CHECK_THROWS_AS(w.index(0.123), Error);
}

TEST_CASE("smooth window") {
  CHECK(smooth_window(1.0, 2.0, 4.0) == 1.0);
  CHECK(smooth_window(4.0, 2.0, 4.0) == 0.0);
  CHECK(smooth_window(3.0, 2.0, 4.0) == doctest::Approx(0.5));
  double prev = 1.0;
  for (double l = 2.0; l <= 4.0; l += 0.01) {
    double s = smooth_window(l, 2.0, 4.0);
    CHECK(s <= prev + 1e-15);
    prev = s;
  }
}

TEST_CASE("free Schroedinger kernel is the heat kernel at imaginary time") {
  const auto& c = free_cache();
  for (double t : {1.0, 10.0, 100.0})
    for (auto [i, j] : {std::pair{1, 1}, {2, 0}, {3, 0}, {5, 2}}) {
      double D = c.points()[i] - c.points()[j];
      auto k = kernel(c, Evolution::Schrodinger, t, i, j, window(10, 20));
      CHECK(std::abs(k.value - free_schrodinger(t, D)) < 1e-7);
      CHECK(k.error < 1e-8);
    }
  // stationary point beyond the window: the truncated kernel misses the main contribution
  auto k = kernel(c, Evolution::Schrodinger, 1.0, 4, 1, window(10, 20));
  CHECK(std::abs(k.value) < 0.05);
  // default window needs lambda up to 2 * 50 / sqrt(t)
  CHECK_THROWS_AS(kernel(c, Evolution::Schrodinger, 0.1, 0, 0), Error);
  CHECK_THROWS_AS(kernel(c, Evolution::Schrodinger, -1.0, 0, 0), Error);
  CHECK_THROWS_AS(kernel(c, Evolution::Schrodinger, 1.0, 0, 999), Error);
}

TEST_CASE("free sine kernel is half the indicator of the light cone") {
  const auto& c = free_cache();
  // away from |D| = t the smoothing of the window is negligible
  auto inside = kernel(c, Evolution::WaveSin, 8.0, 1, 3, window(14, 28));
  CHECK(inside.value.real() == doctest::Approx(0.5).epsilon(2e-3));
  CHECK(std::abs(inside.value.imag()) < 1e-12);
  auto outside = kernel(c, Evolution::WaveSin, 8.0, 4, 1, window(14, 28));
  CHECK(std::abs(outside.value) < 1e-3);
}

TEST_CASE("free cos kernel translates a bump") {
  const auto& c = free_cache();
  auto phi = bump_test_function(c, 0.0, 3.0, 48);
  std::vector<std::pair<std::size_t, double>> src;
  for (std::size_t k = 0; k < phi.idx.size(); ++k) src.push_back({phi.idx[k], phi.weight[k]});
  for (double t : {2.0, 4.0, 9.0}) {
    for (std::size_t i : {std::size_t{0}, std::size_t{2}, std::size_t{3}, std::size_t{5}}) {
      double x = c.points()[i];
      double ref = 0.5 * (bump((x - t) / 3.0) + bump((x + t) / 3.0));
      auto k = apply_kernel(c, Evolution::WaveCos, t, i, src, window(15, 30));
      CHECK(std::abs(k.value - ref) < 1e-4);
    }
  }
}

TEST_CASE("cos kernel at short time reproduces the test function (completeness)") {
  // the well has no bound states, so the continuous spectrum is complete
  const auto& c = well_cache();
  auto phi = bump_test_function(c, 1.0, 1.0, 40);
  std::vector<std::pair<std::size_t, double>> src;
  for (std::size_t k = 0; k < phi.idx.size(); ++k) src.push_back({phi.idx[k], phi.weight[k]});
  for (std::size_t i : {std::size_t{0}, std::size_t{1}, std::size_t{2}, std::size_t{10}}) {
    double x = c.points()[i];
    auto k = apply_kernel(c, Evolution::WaveCos, 0.01, i, src, window(15, 30));
    CHECK(std::abs(k.value - bump(x - 1.0)) < 1e-3);
  }
}

TEST_CASE("weights, admissible sigma and the functional") {
  const auto& c = free_cache();
  CHECK(sigma_max(free_line()) == doctest::Approx(0.5));
  CHECK(decay_weight(free_line(), 0.25, 2.0) == doctest::Approx(std::pow(5.0, -0.375)));
  CHECK_THROWS_AS(check_sigma(free_line(), 0.6, false), Error);
  CHECK_NOTHROW(check_sigma(free_line(), 0.6, true));
  CHECK_THROWS_AS(check_sigma(free_line(), -0.1, true), Error);
  CHECK_THROWS_AS(schrodinger_kernel(c, 1.0, 0, 0, 0.7, window(10, 20)), Error);

  auto k = schrodinger_kernel(c, 10.0, 2, 0, 0.5, window(10, 20));
  double w = decay_weight(free_line(), 0.5, 2.0) * decay_weight(free_line(), 0.5, -3.0);
  CHECK(std::abs(k.value - w * free_schrodinger(10.0, 5.0)) < 1e-8);

  auto phi = bump_test_function(c, 0.0, 3.0, 48);
  // int |phi'| = 2 max phi, int phi by direct quadrature
  double mass = 0.0;
  for (double u = -1.0 + 5e-5; u < 1.0; u += 1e-4) mass += 3.0 * 1e-4 * bump(u);
  CHECK(phi.norm == doctest::Approx(2.0 * std::exp(-1.0) + mass).epsilon(1e-6));

  auto f = weighted_wave_functional(c, 2.0, 2, 0.0, phi, Evolution::WaveCos, window(15, 30));
  CHECK_FALSE(f.degenerate);
  double ref = 0.5 * (bump(0.0) + bump(4.0 / 3.0)) * decay_weight(free_line(), 0.0, 2.0) / phi.norm;
  CHECK(f.value == doctest::Approx(ref).epsilon(1e-3));

  TestFunction zero = phi;
  for (auto& q : zero.weight) q = 0.0;
  zero.norm = 0.0;
  auto z = weighted_wave_functional(c, 2.0, 2, 0.0, zero);
  CHECK(z.degenerate);
  CHECK(z.value == 0.0);
  CHECK_THROWS_AS(weighted_wave_functional(c, 2.0, 2, 0.0, phi, Evolution::Schrodinger), Error);
}

TEST_CASE("nonstationary kernel entries are small and refinement contracts") {
  const auto& c = free_cache();
  // e^{i t lambda^2 + i lambda D} with its stationary point at -D/2t < 0
  // D = 0 has its stationary point at the origin: error estimates shrink with level
  KernelOptions a = window(10, 20), b = window(10, 20);
  b.level = 1;
  auto k0 = kernel(c, Evolution::Schrodinger, 30.0, 3, 2, a);
  auto k1 = kernel(c, Evolution::Schrodinger, 30.0, 3, 2, b);
  CHECK(k1.error <= k0.error + 1e-15);
  CHECK(k1.pieces > k0.pieces);
  CHECK(std::abs(k1.value - k0.value) < 1e-10);
}

TEST_CASE("decay fits and point sets") {
  auto t = log_times(1.0, 100.0, 8);
  std::vector<double> s;
  for (double x : t) s.push_back(3.0 * std::pow(x, -1.5));
  auto f = fit_decay(Evolution::Schrodinger, 0.5, t, s);
  CHECK(f.slope == doctest::Approx(-1.5));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0));
  CHECK(f.residual < 1e-12);
  auto j = nlohmann::json::parse(f.to_json());
  CHECK(j["slope"].get<double>() == doctest::Approx(-1.5));
  CHECK(j["evolution"] == "schrodinger");
  CHECK(f.to_csv().rfind("t,sup,fit\n", 0) == 0);
  CHECK(t.front() == 1.0);
  CHECK(t.back() == 100.0);
  CHECK_THROWS_AS(fit_decay(Evolution::WaveCos, 0, {1, 2}, {1, 1}), Error);
  CHECK_THROWS_AS(fit_decay(Evolution::WaveCos, 0, log_times(1, 20, 8), s), Error);  // 1.3 decades
  auto bad = s;
  bad[3] = 0.0;
  CHECK_THROWS_AS(fit_decay(Evolution::WaveCos, 0, t, bad), Error);
  auto rev = t;
  std::swap(rev[2], rev[3]);
  CHECK_THROWS_AS(fit_decay(Evolution::WaveCos, 0, rev, s), Error);

  auto r = schrodinger_region(160.0, std::pow(2.0, 0.25));
  CHECK(r.front() == doctest::Approx(-160.0));
  CHECK(r.back() == doctest::Approx(160.0));
  CHECK(std::is_sorted(r.begin(), r.end()));
  auto wf = wave_front_points(20.0, 5.0, 0.5);
  CHECK(wf.size() == 42);
  CHECK(wf.back() == doctest::Approx(25.0));

  const auto& c = free_cache();
  auto fits = schrodinger_decay(c, log_times(10.0, 400.0, 8), {0, 1, 2}, {0.0, 0.5}, window(10, 20));
  REQUIRE(fits.size() == 2);
  // sup over D in {0,2,3,5} of |K| is (4 pi t)^{-1/2}
  CHECK(fits[0].slope == doctest::Approx(-0.5).epsilon(1e-6));
  CHECK(fits[1].sups[0] <= fits[0].sups[0]);
  CHECK(fits[0].argmax_i.size() == 8);
}
