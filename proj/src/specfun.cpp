#include "conedisp/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "conedisp/errors.hpp"

namespace conedisp {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kFpMin = std::numeric_limits<double>::min() / kEps;

constexpr std::array<double, 26> kRecipGamma = {
    1.0,
    0.5772156649015329,
    -0.6558780715202538,
    -0.0420026350340952,
    0.1665386113822915,
    -0.0421977345555443,
    -0.0096219715278770,
    0.0072189432466630,
    -0.0011651675918591,
    -0.0002152416741149,
    0.0001280502823882,
    -0.0000201348547807,
    -0.0000012504934821,
    0.0000011330272320,
    -0.0000002056338417,
    0.0000000061160950,
    0.0000000050020075,
    -0.0000000011812746,
    0.0000000001043427,
    0.0000000000077823,
    -0.0000000000036968,
    0.0000000000005100,
    -0.0000000000000206,
    -0.0000000000000054,
    0.0000000000000014,
    0.0000000000000001,
};

// gam1 = (1/G(1-mu) - 1/G(1+mu)) / (2 mu), gam2 = (1/G(1-mu) + 1/G(1+mu)) / 2
void temme_gammas(double mu, double& gam1, double& gam2) {
  // Horner in mu^2 for each parity
  double e = 0.0, o = 0.0;
  for (int k = 26; k >= 2; k -= 2) e = e * mu * mu + kRecipGamma[k - 1];
  for (int k = 25; k >= 1; k -= 2) o = o * mu * mu + kRecipGamma[k - 1];
  gam1 = -e;  // sum over even k of c_k mu^{k-2}
  gam2 = o;   // sum over odd k of c_k mu^{k-1}
}

void check_args(double nu, double x) {
  if (!(nu >= 0.0) || nu > 50.0) throw Error(ErrorCode::OrderTooLarge, "order outside [0,50]");
  if (!(x > 0.0)) throw Error(ErrorCode::NonPositiveArgument, "Bessel argument must be positive");
}

BesselJY temme_steed(double nu, double x) {
  constexpr int kMaxIt = 1000000;
  constexpr double kXmin = 2.0;
  const int nl = (x < kXmin) ? static_cast<int>(nu + 0.5)
                             : std::max(0, static_cast<int>(nu - x + 1.5));
  const double xmu = nu - nl, xmu2 = xmu * xmu;
  const double xi = 1.0 / x, xi2 = 2.0 * xi, w = xi2 / kPi;

  // CF1 for J'_nu / J_nu
  int isign = 1;
  double h = nu * xi;
  if (h < kFpMin) h = kFpMin;
  double b = xi2 * nu, d = 0.0, c = h;
  int i = 0;
  for (; i < kMaxIt; ++i) {
    b += xi2;
    d = b - d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = b - 1.0 / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    double del = c * d;
    h *= del;
    if (d < 0.0) isign = -isign;
    if (std::abs(del - 1.0) < kEps) break;
  }
  if (i >= kMaxIt) throw Error(ErrorCode::ConvergenceFailure, "Bessel CF1 did not converge");

  double rjl = isign * kFpMin, rjpl = h * rjl;
  const double rjl1 = rjl, rjp1 = rjpl;
  double fact = nu * xi;
  for (int l = nl - 1; l >= 0; --l) {
    double t = fact * rjl + rjpl;
    fact -= xi;
    rjpl = fact * t - rjl;
    rjl = t;
  }
  if (rjl == 0.0) rjl = kEps;
  const double f = rjpl / rjl;

  double rjmu, rymu, rymup, ry1;
  BesselRegime regime;
  if (x < kXmin) {
    regime = BesselRegime::Series;
    const double x2 = 0.5 * x, pimu = kPi * xmu;
    const double fct = (std::abs(pimu) < kEps) ? 1.0 : pimu / std::sin(pimu);
    double dd = -std::log(x2), e = xmu * dd;
    const double fct2 = (std::abs(e) < kEps) ? 1.0 : std::sinh(e) / e;
    double gam1, gam2;
    temme_gammas(xmu, gam1, gam2);
    const double gampl = gam2 - xmu * gam1, gammi = gam2 + xmu * gam1;
    double ff = 2.0 / kPi * fct * (gam1 * std::cosh(e) + gam2 * fct2 * dd);
    e = std::exp(e);
    double p = e / (gampl * kPi);
    double q = 1.0 / (e * kPi * gammi);
    const double pimu2 = 0.5 * pimu;
    const double fct3 = (std::abs(pimu2) < kEps) ? 1.0 : std::sin(pimu2) / pimu2;
    const double r = kPi * pimu2 * fct3 * fct3;
    double cc = 1.0;
    dd = -x2 * x2;
    double sum = ff + r * q, sum1 = p;
    int k = 1;
    for (; k < kMaxIt; ++k) {
      ff = (k * ff + p + q) / (k * k - xmu2);
      cc *= dd / k;
      p /= (k - xmu);
      q /= (k + xmu);
      double del = cc * (ff + r * q);
      sum += del;
      double del1 = cc * p - k * del;
      sum1 += del1;
      if (std::abs(del) < (1.0 + std::abs(sum)) * kEps) break;
    }
    if (k >= kMaxIt) throw Error(ErrorCode::ConvergenceFailure, "Temme series did not converge");
    rymu = -sum;
    ry1 = -sum1 * xi2;
    rymup = xmu * xi * rymu - ry1;
    rjmu = w / (rymup - f * rymu);
  } else {
    regime = BesselRegime::Recurrence;
    // Steed's CF2 for p + i q = (J' + i Y') / (J + i Y)
    double a = 0.25 - xmu2, p = -0.5 * xi, q = 1.0;
    const double br = 2.0 * x;
    double bi = 2.0;
    double fc = a * xi / (p * p + q * q);
    double cr = br + q * fc, ci = bi + p * fc;
    double den = br * br + bi * bi;
    double dr = br / den, di = -bi / den;
    double dlr = cr * dr - ci * di, dli = cr * di + ci * dr;
    double t = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = t;
    int k = 1;
    for (; k < kMaxIt; ++k) {
      a += 2 * k;
      bi += 2.0;
      dr = a * dr + br;
      di = a * di + bi;
      if (std::abs(dr) + std::abs(di) < kFpMin) dr = kFpMin;
      fc = a / (cr * cr + ci * ci);
      cr = br + cr * fc;
      ci = bi - ci * fc;
      if (std::abs(cr) + std::abs(ci) < kFpMin) cr = kFpMin;
      den = dr * dr + di * di;
      dr /= den;
      di /= -den;
      dlr = cr * dr - ci * di;
      dli = cr * di + ci * dr;
      t = p * dlr - q * dli;
      q = p * dli + q * dlr;
      p = t;
      if (std::abs(dlr - 1.0) + std::abs(dli) < kEps) break;
    }
    if (k >= kMaxIt) throw Error(ErrorCode::ConvergenceFailure, "Steed CF2 did not converge");
    const double gam = (p - f) / q;
    rjmu = std::sqrt(w / ((p - f) * gam + q));
    rjmu = std::copysign(rjmu, rjl);
    rymu = rjmu * gam;
    rymup = rymu * (p + q / gam);
    ry1 = xmu * xi * rymu - rymup;
  }
  const double scale = rjmu / rjl;
  BesselJY out;
  out.nu = nu;
  out.x = x;
  out.regime = regime;
  out.J = rjl1 * scale;
  out.Jp = rjp1 * scale;
  for (int k = 1; k <= nl; ++k) {
    double t = (xmu + k) * xi2 * ry1 - rymu;
    rymu = ry1;
    ry1 = t;
  }
  out.Y = rymu;
  out.Yp = nu * xi * rymu - ry1;
  return out;
}

// P + iQ style sums of the Hankel expansion for a single order.
bool hankel_pq(double nu, double x, double tol, double& P, double& Q) {
  const double m = 4.0 * nu * nu;
  double term = 1.0;
  P = 1.0;
  Q = 0.0;
  double prev = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= (m - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (k * 8.0 * x);
    double a = std::abs(term);
    if (a < tol) return true;
    if (a > prev && k > 2) return false;
    prev = a;
    // i^k pattern: a_k enters P for even k with sign (-1)^{k/2}, Q for odd k with (-1)^{(k-1)/2}
    switch (k % 4) {
      case 0: P += term; break;
      case 1: Q += term; break;
      case 2: P -= term; break;
      case 3: Q -= term; break;
    }
  }
  return false;
}

}  // namespace

std::string to_string(BesselRegime r) {
  switch (r) {
    case BesselRegime::Series: return "series";
    case BesselRegime::Recurrence: return "recurrence";
    case BesselRegime::Asymptotic: return "asymptotic";
  }
  return "?";
}

double reciprocal_gamma_series(double z) {
  double s = 0.0;
  for (int k = 26; k >= 1; --k) s = (s + kRecipGamma[k - 1]) * z;
  return s;
}

std::optional<BesselJY> bessel_jy_asymptotic(double nu, double x, double tol) {
  check_args(nu, x);
  double P0, Q0, P1, Q1;
  if (!hankel_pq(nu, x, tol, P0, Q0) || !hankel_pq(nu + 1.0, x, tol, P1, Q1)) return std::nullopt;
  const double amp = std::sqrt(2.0 / (kPi * x));
  auto jy = [&](double n, double P, double Q, double& J, double& Y) {
    double om = x - (0.5 * n + 0.25) * kPi;
    double c = std::cos(om), s = std::sin(om);
    J = amp * (P * c - Q * s);
    Y = amp * (P * s + Q * c);
  };
  BesselJY out;
  out.nu = nu;
  out.x = x;
  out.regime = BesselRegime::Asymptotic;
  double J1, Y1;
  jy(nu, P0, Q0, out.J, out.Y);
  jy(nu + 1.0, P1, Q1, J1, Y1);
  out.Jp = nu / x * out.J - J1;
  out.Yp = nu / x * out.Y - Y1;
  return out;
}

BesselJY bessel_jy(double nu, double x) {
  check_args(nu, x);
  if (x >= 25.0 + nu * nu) {
    if (auto a = bessel_jy_asymptotic(nu, x)) return *a;
  }
  return temme_steed(nu, x);
}

BesselJY bessel_jy_series(double nu, double x) {
  check_args(nu, x);
  using ld = long double;
  auto jser = [&](ld n, ld& J, ld& Jp) {
    // J_n(x) = sum (-1)^k (x/2)^{2k+n} / (k! Gamma(k+n+1))
    ld half = static_cast<ld>(x) / 2;
    ld t = std::pow(half, n) / std::tgamma(n + 1);
    J = 0;
    Jp = 0;
    for (int k = 0; k < 400; ++k) {
      J += t;
      Jp += t * (2 * k + n) / static_cast<ld>(x);
      t *= -(half * half) / ((k + 1) * (k + 1 + n));
      if (std::abs(t) < 1e-22L * std::abs(J) && k > 5) break;
    }
  };
  BesselJY out;
  out.nu = nu;
  out.x = x;
  out.regime = BesselRegime::Series;
  ld J, Jp;
  jser(nu, J, Jp);
  out.J = static_cast<double>(J);
  out.Jp = static_cast<double>(Jp);
  if (std::abs(nu - std::round(nu)) > 1e-12) {
    // J_{-nu} through the reflection of the same series; Gamma of a negative
    // non-integer is finite so the series form still applies.
    ld Jm = 0, Jmp = 0;
    {
      ld n = -static_cast<ld>(nu);
      ld half = static_cast<ld>(x) / 2;
      ld t = std::pow(half, n) / std::tgamma(n + 1);
      for (int k = 0; k < 400; ++k) {
        Jm += t;
        Jmp += t * (2 * k + n) / static_cast<ld>(x);
        t *= -(half * half) / ((k + 1) * (k + 1 + n));
        if (std::abs(t) < 1e-22L * std::abs(Jm) && k > 5) break;
      }
    }
    ld c = std::cos(static_cast<ld>(nu) * std::numbers::pi_v<long double>);
    ld s = std::sin(static_cast<ld>(nu) * std::numbers::pi_v<long double>);
    out.Y = static_cast<double>((J * c - Jm) / s);
    out.Yp = static_cast<double>((Jp * c - Jmp) / s);
  } else {
    out.Y = std::numeric_limits<double>::quiet_NaN();
    out.Yp = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

Hankel hankel_plus(double nu, double x) {
  auto b = bessel_jy(nu, x);
  return {cd(b.J, b.Y), cd(b.Jp, b.Yp)};
}

double small_arg_j_coeff(double nu) { return 1.0 / (std::pow(2.0, nu) * std::tgamma(nu + 1.0)); }

double small_arg_y_coeff(double nu) {
  if (nu == 0.0) throw Error(ErrorCode::InvalidInput, "Y_0 has a logarithmic leading term");
  return -std::tgamma(nu) * std::pow(2.0, nu) / kPi;
}

cd outgoing_phase(double nu) {
  return std::sqrt(kPi / 2.0) * std::polar(1.0, (2.0 * nu + 1.0) * kPi / 4.0);
}

FreeWave free_outgoing(double nu, double lambda, double xi) {
  const double z = lambda * xi;
  auto h = hankel_plus(nu, z);
  const cd beta = outgoing_phase(nu);
  const double sz = std::sqrt(z);
  FreeWave w;
  w.f = beta * sz * h.H;
  w.fp = beta * lambda * (h.H / (2.0 * sz) + sz * h.Hp);
  return w;
}

}  // namespace conedisp
