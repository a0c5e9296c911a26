#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/hankel.hpp>
#include <cmath>
#include <json.hpp>
#include <numbers>

#include "conedisp/errors.hpp"
#include "conedisp/scattering.hpp"
#include "conedisp/specfun.hpp"

using namespace conedisp;
using std::numbers::pi;

namespace {

cd boost_outgoing(double nu, double lambda, double xi) {
  const cd beta = std::sqrt(pi / 2) * std::exp(cd(0, (2 * nu + 1) * pi / 4));
  const double z = lambda * xi;
  return beta * std::sqrt(z) * boost::math::cyl_hankel_1(nu, z);
}

ReducedOperator inverse_square_half_line(double nu, double lo = 0.5) {
  ModelOptions mo;
  mo.min_xi = lo;
  mo.label = "inverse-square";
  const double c = nu * nu - 0.25;
  return make_model_operator(nu, [c](double x) { return c / (x * x); }, mo);
}

ReducedOperator sech_family(double nu, double c) {
  ModelOptions mo;
  mo.symmetric = true;
  const double k = nu * nu - 0.25;
  return make_model_operator(
      nu, [k, c](double x) { return k / (1 + x * x) - c / std::pow(std::cosh(x), 2); }, mo);
}

double rel(cd a, cd b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("far-field data vanishes correction for pure inverse square") {
  auto op = inverse_square_half_line(std::sqrt(2.0));
  auto ff = jost_far_field(op, +1, 0.3, 50.0);
  CHECK(ff.born_size < 1e-14);
  CHECK(rel(ff.data.f, boost_outgoing(op.nu(), 0.3, 50.0)) < 1e-12);
}

TEST_CASE("Jost solution of the pure inverse square is the Hankel wave") {
  for (double nu : {std::sqrt(2.0), 1.0, 2.5}) {
    auto op = inverse_square_half_line(nu);
    for (double lambda : {0.05, 0.5, 3.0}) {
      JostPair jp(op, lambda);
      CHECK_FALSE(jp.has_minus());
      for (double t : {1.0, 2.0, 5.0, 20.0}) {
        double xi = t / lambda;
        if (xi > jp.anchor() || xi < 0.5) continue;
        CAPTURE(nu);
        CAPTURE(lambda);
        CAPTURE(xi);
        CHECK(rel(jp.plus(xi).f, boost_outgoing(nu, lambda, xi)) < 1e-6);
      }
      // beyond the anchor the far-field formula is used
      CHECK(rel(jp.plus(2 * jp.anchor()).f, boost_outgoing(nu, lambda, 2 * jp.anchor())) < 1e-9);
    }
  }
}

TEST_CASE("free line: plane waves, W = 2 i lambda, no reflection") {
  auto op = make_model_operator(0.5, [](double) { return 0.0; });
  for (double lambda : {0.01, 0.7, 4.0}) {
    JostPair jp(op, lambda);
    CHECK(rel(jp.W(), cd(0, 2 * lambda)) < 1e-9);
    CHECK(std::abs(jp.alpha_minus()) < 1e-9);
    CHECK(rel(jp.beta_minus(), cd(1, 0)) < 1e-9);
    for (double xi : {-7.0, 0.0, 3.5}) {
      CHECK(rel(jp.plus(xi).f, std::exp(cd(0, lambda * xi))) < 1e-9);
      CHECK(rel(jp.minus(xi).f, std::exp(cd(0, -lambda * xi))) < 1e-9);
    }
  }
  auto rt = reflection_transmission(op, 1.0);
  CHECK(std::abs(rt.flux_residual) < 1e-9);
}

TEST_CASE("hyperboloid Jost pair invariants") {
  auto op = reduce(ProfileSpec::hyperboloid(1.0, 1, 1));
  for (double lambda : {1e-4, 1e-3, 0.01, 0.1, 0.5, 1.0, 3.0, 10.0, 50.0}) {
    CAPTURE(lambda);
    JostPair jp(op, lambda);
    // Wronskian constancy and lower bound
    CHECK(jp.W_spread() < 1e-6 * std::abs(jp.W()) + 1e-12);
    CHECK(std::abs(jp.W()) >= 2 * lambda * (1 - 1e-6));
    CHECK(rel(jp.beta_minus(), jp.W() / cd(0, 2 * lambda)) < 1e-8);
    // flux conservation, relative to |beta|^2 which grows like lambda^{2-4nu}
    double b2 = std::norm(jp.beta_minus());
    CHECK(std::abs(b2 - std::norm(jp.alpha_minus()) - 1) < 1e-8 * b2);
    // W(f+, conj f+) = -2 i lambda wherever it is sampled, against |f+||f+'|
    for (double xi : {-1.0, 0.0, 2.0}) {
      Cauchy f = jp.plus(xi);
      double scale = lambda >= 0.1 ? 2 * lambda : std::abs(f.f) * std::abs(f.fp);
      CHECK(std::abs(wronskian(f, conj(f)) - cd(0, -2 * lambda)) < 1e-8 * scale);
    }
    // symmetric potential: f-(xi) = f+(-xi)
    for (double xi : {0.5, 3.0, 30.0}) CHECK(rel(jp.minus(-xi).f, jp.plus(xi).f) < 1e-10);
    // reflected pair gives the same W
    Cauchy a = jp.plus(1.3), b = jp.minus(1.3);
    Cauchy ra{jp.minus(-1.3).f, -jp.minus(-1.3).fp}, rb{jp.plus(-1.3).f, -jp.plus(-1.3).fp};
    CHECK(rel(wronskian(rb, ra), wronskian(b, a)) < 1e-10);
  }
}

TEST_CASE("negative lambda conjugates the Jost data") {
  auto op = reduce(ProfileSpec::hyperboloid(1.0, 1, 1));
  for (double lambda : {0.2, 1.7, 6.0}) {
    JostPair p(op, lambda), m(op, -lambda);
    CHECK(rel(m.W(), std::conj(p.W())) < 1e-12);
    for (double xi : {-3.0, 0.4, 9.0}) {
      CHECK(std::abs(m.plus(xi).f - std::conj(p.plus(xi).f)) <= 1e-12 * std::abs(p.plus(xi).f));
      CHECK(std::abs(m.minus(xi).fp - std::conj(p.minus(xi).fp)) <= 1e-12 * std::abs(p.minus(xi).fp));
    }
  }
}

TEST_CASE("large-lambda scattering approaches free behaviour") {
  auto op = reduce(ProfileSpec::hyperboloid(1.0, 1, 1));
  double cb = 0, ca = 0, cw = 0;
  for (double lambda : {10.0, 20.0, 35.0, 50.0}) {
    auto rt = reflection_transmission(op, lambda);
    CHECK(std::abs(rt.flux_residual) < 1e-6);
    JostPair jp(op, lambda);
    cb = std::max(cb, std::abs(rt.beta - 1.0) * lambda);
    ca = std::max(ca, std::abs(rt.alpha) * lambda * lambda);
    cw = std::max(cw, std::abs(jp.W() - cd(0, 2 * lambda)));
  }
  MESSAGE("fitted constants: |beta-1| lambda <= " << cb << ", |alpha| lambda^2 <= " << ca
                                                  << ", |W - 2 i lambda| <= " << cw);
  CHECK(cb < 10);
  CHECK(ca < 10);
  CHECK(cw < 10);
}

TEST_CASE("anchor too small is reported") {
  auto op = reduce(ProfileSpec::hyperboloid(1.0, 1, 1));
  JostOptions o;
  o.anchor_min = 1.0;
  o.anchor_scale = 1.0;
  o.anchor_sqrt = 0.0;
  CHECK_THROWS_AS(JostPair(op, 1.0, o), Error);
  try {
    JostPair(op, 1.0, o);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AnchorTooSmall);
  }
}

TEST_CASE("zero-energy basis of the pure inverse square") {
  const double nu = std::sqrt(2.0);
  auto op = inverse_square_half_line(nu);
  ZeroEnergyBasis zb(op);
  for (double x : {0.7, 3.0, 40.0, 900.0}) {
    auto u1 = zb.u1_plus(x), u0 = zb.u0_plus(x);
    CHECK(std::abs(u1.f.real() / std::pow(x, 0.5 - nu) - 1) < 1e-9);
    // lower limit xi0 in the reduction integral adds a multiple of u1
    double expect = std::pow(x, 0.5 + nu) - std::pow(zb.xi0(), 2 * nu) * std::pow(x, 0.5 - nu);
    CHECK(std::abs(u0.f.real() - expect) <
          1e-8 * (std::pow(x, 0.5 + nu) + std::pow(zb.xi0(), 2 * nu) * std::pow(x, 0.5 - nu)));
    CHECK(std::abs(wronskian(u0, u1).real() + 2 * nu) < 1e-8);
  }
}

TEST_CASE("hyperboloid zero-energy basis matches the closed-form harmonics") {
  auto op = reduce(ProfileSpec::hyperboloid(1.0, 1, 1));
  ZeroEnergyBasis zb(op);
  const double nu = op.nu();
  CHECK_FALSE(is_resonant(zb));
  CHECK(zb.W11_spread() < 1e-6);
  // normalisation at the far end
  CHECK(std::abs(zb.u1_plus(op.domain_radius()).f.real() * std::pow(op.domain_radius(), nu - 0.5) - 1) < 1e-4);
  for (double x : {-30.0, -2.0, 0.0, 1.0, 7.0, 60.0}) {
    CHECK(std::abs(wronskian(zb.u0_plus(x), zb.u1_plus(x)).real() + 2 * nu) < 1e-6 * 2 * nu);
    CHECK(std::abs(wronskian(zb.u0_minus(x), zb.u1_minus(x)).real() - 2 * nu) < 1e-6 * 2 * nu);
  }
  // r^{1/2} e^{-y}, y = int_0^xi 1/r, solves the zero-energy equation for n = 1
  boost::math::quadrature::tanh_sinh<double> ts;
  auto y = [&](double xi) {
    if (xi == 0) return 0.0;
    return ts.integrate([&](double s) { return 1.0 / op.map->r_of_xi(s).r; }, 0.0, xi);
  };
  auto harmonic = [&](double xi) { return std::sqrt(op.map->r_of_xi(xi).r) * std::exp(-y(xi)); };
  const double k = zb.u1_plus(0.0).f.real() / harmonic(0.0);
  for (double x : {-8.0, -3.0, 1.5, 4.0, 12.0})
    CHECK(std::abs(zb.u1_plus(x).f.real() / (k * harmonic(x)) - 1) < 1e-6);
  // symmetric operator: W11 from one side only
  Cauchy u = zb.u1_plus(0.0);
  CHECK(std::abs(zb.W11() + 2 * (u.f * u.fp).real()) < 1e-9 * std::abs(zb.W11()));
  std::vector<double> xs;
  for (int i = -10; i <= 10; ++i) xs.push_back(0.1 * i);
  auto g = zb.grid("u1+", xs);
  CHECK(std::abs(g(0.25) - zb.u1_plus(0.25).f.real()) < 1e-6);
}

TEST_CASE("resonance scan") {
  SUBCASE("Poschl-Teller half-bound state at c = 2") {
    auto scan = resonance_scan([](double c) { return sech_family(0.5, c); }, 1.5, 2.5, 5, 1e-7);
    REQUIRE(scan.roots.size() == 1);
    CHECK(std::abs(scan.roots[0] - 2.0) < 1e-5);
  }
  SUBCASE("nu = sqrt 2 family") {
    const double nu = std::sqrt(2.0);
    ZeroEnergyBasis z0(sech_family(nu, 0.0));
    CHECK(z0.W11() > 0);
    auto scan = resonance_scan([nu](double c) { return sech_family(nu, c); }, 0.0, 10.0, 21, 1e-6);
    REQUIRE_FALSE(scan.roots.empty());
    MESSAGE("first resonant coupling c* = " << scan.roots[0]);
    ZeroEnergyBasis zs(sech_family(nu, scan.roots[0]));
    CHECK(is_resonant(zs, 1e-5));
  }
  SUBCASE("no sign change") {
    CHECK_THROWS_AS(resonance_scan([](double c) { return sech_family(0.5, c); }, 0.1, 0.5, 3), Error);
  }
}

TEST_CASE("catalogue operators are nonresonant") {
  std::vector<ProfileSpec> cat = {
      ProfileSpec::hyperboloid(1.0, 1, 1), ProfileSpec::hyperboloid(0.5, 1, 2),
      ProfileSpec::hyperboloid(1.0, 3, 0), ProfileSpec::hyperboloid(1.0, 2, 1),
      ProfileSpec::spliced_sphere(1.0, 4.0, 1, 1), ProfileSpec::closed_form({1.0, 0.5}, 1, 1)};
  for (const auto& s : cat) {
    auto op = reduce(s);
    ZeroEnergyBasis zb(op);
    CAPTURE(to_string(s.kind));
    CHECK_FALSE(is_resonant(zb));
    CHECK(zb.W11_spread() < 1e-6);
    // each pair is checked on its own half, where neither member is the growing mode
    for (double x : {0.0, 4.0, 30.0}) {
      CHECK(std::abs(wronskian(zb.u0_plus(x), zb.u1_plus(x)).real() + 2 * op.nu()) < 1e-6 * 2 * op.nu());
      CHECK(std::abs(wronskian(zb.u0_minus(-x), zb.u1_minus(-x)).real() - 2 * op.nu()) < 1e-6 * 2 * op.nu());
    }
  }
}

TEST_CASE("perturbed basis") {
  auto op = reduce(ProfileSpec::hyperboloid(1.0, 1, 1));
  ZeroEnergyBasis zb(op);
  for (int side : {+1, -1})
    for (double lambda : {1e-4, 1e-3, 1e-2, 0.05}) {
      PerturbedBasis pb(zb, side, lambda);
      CHECK(pb.residual() < 1e-8);
      CHECK(pb.correction_constant() < 1.0);
      double x = 1.2 * pb.u1_lo();
      CHECK(std::abs(wronskian(pb.u1(x), pb.u0(x)).real() - 1) < 1e-10);
    }
  // tiny lambda reproduces the zero-energy basis
  PerturbedBasis pb(zb, +1, 1e-7);
  for (double x : {8.0, 50.0, 400.0}) {
    CHECK(std::abs(pb.u0(x).f.real() / zb.u0_plus(x).f.real() - 1) < 1e-9);
    CHECK(std::abs(pb.u1(x).f.real() * 2 * op.nu() / zb.u1_plus(x).f.real() - 1) < 1e-6);
  }
  CHECK_THROWS_AS(PerturbedBasis(zb, +1, 1.0), Error);
}

TEST_CASE("connection coefficients") {
  const double nu = std::sqrt(2.0);
  const cd beta = outgoing_phase(nu);
  const double a1 = 1 / (std::pow(2.0, nu) * boost::math::tgamma(nu + 1));
  const double a2 = -boost::math::tgamma(nu) * std::pow(2.0, nu) / pi;
  SUBCASE("pure inverse square") {
    auto op = inverse_square_half_line(nu);
    ZeroEnergyBasis zb(op);
    for (double lambda : {1e-3, 1e-4}) {
      JostPair jp(op, lambda);
      auto cc = connection_coefficients(jp, zb, +1);
      CHECK(cc.spread_a < 1e-4);
      CHECK(cc.spread_b < 1e-4);
      cd an = cc.a / (beta * std::pow(lambda, 0.5 + nu));
      cd bn = cc.b / (cd(0, 1) * beta * std::pow(lambda, 0.5 - nu));
      // the u1 window cut at c/lambda adds an O(1) imaginary part to a
      CHECK(std::abs(an.real() - a1) < 1e-2 * a1);
      CHECK(std::abs(bn - 2 * nu * a2) < 1e-2 * std::abs(2 * nu * a2));
      // reconstruction on the window
      PerturbedBasis pb(zb, +1, lambda);
      for (double t : {0.3, 0.6, 0.9}) {
        double x = pb.u1_lo() + t * (pb.hi() - pb.u1_lo());
        cd rec = cc.a * pb.u0(x).f + cc.b * pb.u1(x).f;
        CHECK(rel(rec, jp.plus(x).f) < 1e-4);
      }
    }
  }
  SUBCASE("hyperboloid, both sides, bounded rescaled coefficients") {
    auto op = reduce(ProfileSpec::hyperboloid(1.0, 1, 1));
    ZeroEnergyBasis zb(op);
    for (double lambda : {1e-4, 1e-3, 1e-2}) {
      JostPair jp(op, lambda);
      for (int side : {+1, -1}) {
        auto cc = connection_coefficients(jp, zb, side);
        CHECK(cc.spread_a < 1e-4);
        CHECK(cc.spread_b < 1e-4);
        double ra = std::abs(cc.a) * std::pow(lambda, -0.5 - nu);
        double rb = std::abs(cc.b) * std::pow(lambda, -0.5 + nu);
        CHECK(ra > 0.1);
        CHECK(ra < 10);
        CHECK(rb > 0.1);
        CHECK(rb < 10);
      }
    }
  }
}

TEST_CASE("Wronskian power law") {
  std::vector<double> lams;
  for (int i = 0; i < 12; ++i) lams.push_back(1e-4 * std::pow(100.0, i / 11.0));
  for (auto [d, n] : {std::pair{1, 1}, std::pair{3, 0}}) {
    auto op = reduce(ProfileSpec::hyperboloid(1.0, d, n));
    auto fit = powerlaw_fit(op, lams);
    CAPTURE(op.nu());
    CHECK(std::abs(fit.exponent - (1 - 2 * op.nu())) < 0.05);
    // W ~ i e^{i nu pi} lambda^{1-2nu} W0 with W0 real
    CHECK(std::abs(fit.constant.imag()) < 0.05 * std::abs(fit.constant));
  }
  CHECK_THROWS_AS(powerlaw_fit(reduce(ProfileSpec::hyperboloid(1.0, 1, 1)), {0.1, 0.01}), Error);
}

TEST_CASE("Agmon distance") {
  boost::math::quadrature::tanh_sinh<double> ts;
  for (double nu : {1.0, std::sqrt(2.0)}) {
    for (double lambda : {0.3, 1e-2, 1e-4}) {
      double xt = std::sqrt(nu * nu / (lambda * lambda) - 1);
      double ref = 2 * ts.integrate(
                           [&](double x) { return std::sqrt(std::max(0.0, nu * nu / (1 + x * x) - lambda * lambda)); },
                           0.0, xt);
      CHECK(std::abs(agmon_distance(nu, lambda) - ref) < 1e-8 * ref);
    }
    // d_A / |log lambda| -> 2 nu
    double r = agmon_distance(nu, 1e-12) / std::abs(std::log(1e-12));
    CHECK(std::abs(r - 2 * nu) < 0.05 * 2 * nu);
  }
  CHECK(agmon_distance(1.0, 2.0) == 0.0);
}

TEST_CASE("scattering data export") {
  auto op = reduce(ProfileSpec::hyperboloid(1.0, 1, 1));
  auto d = compute_scattering(op, {1e-3, 0.5});
  REQUIRE(d.rows.size() == 2);
  CHECK(d.rows[0].a_plus.has_value());
  CHECK_FALSE(d.rows[1].a_plus.has_value());
  auto j = nlohmann::json::parse(d.to_json());
  CHECK(j["rows"].size() == 2);
  CHECK(j["rows"][1]["a_plus"].is_null());
  auto csv = d.to_csv();
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
