#pragma once
#include <complex>
#include <optional>
#include <string>

namespace conedisp {

using cd = std::complex<double>;

enum class BesselRegime { Series, Recurrence, Asymptotic };
std::string to_string(BesselRegime r);

struct BesselJY {
  double nu = 0.0, x = 0.0;
  double J = 0.0, Y = 0.0, Jp = 0.0, Yp = 0.0;
  BesselRegime regime = BesselRegime::Series;
};

// J_nu, Y_nu and derivatives for real order 0 <= nu <= 50 and x > 0.
// Small x uses Temme's series for Y_mu, moderate x Steed's complex continued
// fraction, large x the Hankel expansion.
BesselJY bessel_jy(double nu, double x);

struct Hankel {
  cd H, Hp;  // H^{(1)}_nu(x) and its x-derivative
};
Hankel hankel_plus(double nu, double x);

// Reference routes used to cross-check the main evaluator.
// Power series in long double; Y only for non-integer nu.
BesselJY bessel_jy_series(double nu, double x);
// Hankel asymptotic expansion; empty if the terms stop decreasing before
// reaching double precision.
std::optional<BesselJY> bessel_jy_asymptotic(double nu, double x, double tol = 1e-16);

// Reciprocal gamma series coefficients: 1/Gamma(z) = sum_{k>=1} c_k z^k.
double reciprocal_gamma_series(double z);

// Leading small-argument coefficients: sqrt(x) J_nu(x) ~ alpha1 x^{1/2+nu},
// sqrt(x) Y_nu(x) ~ alpha2 x^{1/2-nu}.
double small_arg_j_coeff(double nu);
double small_arg_y_coeff(double nu);

// Phase constant of the outgoing free solution, sqrt(pi/2) e^{i(2nu+1)pi/4}.
cd outgoing_phase(double nu);

struct FreeWave {
  cd f, fp;  // value and xi-derivative
};
// beta_nu sqrt(lambda xi) H_nu(lambda xi): the outgoing solution of
// -u'' + (nu^2-1/4) xi^{-2} u = lambda^2 u, normalised to e^{i lambda xi} at infinity.
FreeWave free_outgoing(double nu, double lambda, double xi);

}  // namespace conedisp
