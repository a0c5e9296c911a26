#include "conedisp/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "conedisp/errors.hpp"
#include "conedisp/quadrature.hpp"
#include "conedisp/specfun.hpp"

namespace conedisp {

namespace {
constexpr double kPi = std::numbers::pi;
const cd I(0.0, 1.0);

// eta-view of a xi-function on the given side
Cauchy to_side(int side, Cauchy c) { return side > 0 ? c : Cauchy{c.f, -c.fp}; }

// integral over eta in [R, inf) of g(eta) with eta = R/s, s in (0,1]
template <class F>
auto tail_integral(double R, F g, int n = 40) {
  const auto& r = gauss_legendre(n);
  decltype(g(1.0)) acc{};
  for (int i = 0; i < n; ++i) {
    double s = 0.5 * (r.x[i] + 1.0);
    double eta = R / s;
    acc += (0.5 * r.w[i] * R / (s * s)) * g(eta);
  }
  return acc;
}
}  // namespace

FarField jost_far_field(const ReducedOperator& op, int side, double lambda, double R, int order) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::NonPositiveArgument, "lambda must be positive");
  if (side < 0 && op.half_line()) throw Error(ErrorCode::InvalidInput, "half-line operator has no left end");
  const double nu = op.nu();
  auto U = [&](double eta) { return op.U(side * eta); };
  const FreeWave w0 = free_outgoing(nu, lambda, R);
  const double I1 = tail_integral(R, [&](double eta) {
    return std::norm(free_outgoing(nu, lambda, eta).f) * U(eta);
  }, order);
  // oscillatory part f0^2 U = e^{2 i lambda eta} A(eta) by repeated integration by parts
  auto A = [&](double eta) {
    cd f = free_outgoing(nu, lambda, eta).f;
    return f * f * std::exp(cd(0.0, -2.0 * lambda * eta)) * U(eta);
  };
  const double h = R / 16.0;
  const cd a0 = A(R), ap = A(R + h), am = A(R - h), ap2 = A(R + 2 * h), am2 = A(R - 2 * h);
  const cd d1 = (-ap2 + 8.0 * ap - 8.0 * am + am2) / (12.0 * h);
  const cd d2 = (-ap2 + 16.0 * ap - 30.0 * a0 + 16.0 * am - am2) / (12.0 * h * h);
  const cd iw = cd(0.0, 2.0 * lambda);
  const cd I2 = -std::exp(cd(0.0, 2.0 * lambda * R)) * (a0 / iw - d1 / (iw * iw) + d2 / (iw * iw * iw));
  const cd W0 = cd(0.0, -2.0 * lambda);
  FarField out;
  cd cf = (w0.f * I1 - std::conj(w0.f) * I2) / W0;
  cd cfp = (w0.fp * I1 - std::conj(w0.fp) * I2) / W0;
  out.data = {w0.f + cf, w0.fp + cfp};
  out.born_size = std::abs(cf) / std::abs(w0.f);
  return out;
}

FarField zero_energy_far_field(const ReducedOperator& op, int side, double R) {
  if (side < 0 && op.half_line()) throw Error(ErrorCode::InvalidInput, "half-line operator has no left end");
  const double nu = op.nu();
  auto U = [&](double eta) { return op.U(side * eta); };
  const double q = std::pow(R, 0.5 - nu), qp = (0.5 - nu) * std::pow(R, -0.5 - nu);
  const double p = std::pow(R, 0.5 + nu), pp = (0.5 + nu) * std::pow(R, -0.5 + nu);
  const double J1 = tail_integral(R, [&](double eta) { return std::pow(eta, 1.0 - 2.0 * nu) * U(eta); });
  const double J2 = tail_integral(R, [&](double eta) { return eta * U(eta); });
  const double W = -2.0 * nu;  // W(p, q)
  FarField out;
  double c = (p * J1 - q * J2) / W;
  double cp = (pp * J1 - qp * J2) / W;
  out.data = {cd(q + c), cd(qp + cp)};
  out.born_size = std::abs(c) / q;
  return out;
}

// ------------------------------------------------------------------ Jost

JostPair::JostPair(const ReducedOperator& op, double lambda, JostOptions opt)
    : op_(&op), lambda_(lambda), neg_(lambda < 0.0) {
  if (lambda == 0.0 || !std::isfinite(lambda))
    throw Error(ErrorCode::NonPositiveArgument, "lambda must be nonzero");
  lambda = std::abs(lambda);
  R_ = std::max({opt.anchor_min, opt.anchor_scale / lambda, opt.anchor_sqrt / std::sqrt(lambda)});
  // the Wronskian is averaged over [-2, 2]
  const double ext = opt.extent > 0.0 ? std::max(opt.extent, 2.5) : R_;
  const double E = lambda * lambda;
  auto fp = jost_far_field(op, +1, lambda, R_);
  born_ = fp.born_size;
  if (born_ > opt.max_born)
    throw Error(ErrorCode::AnchorTooSmall, "Born correction at the anchor exceeds the limit");
  const double lower = op.half_line() ? op.lower_end() : -ext;
  tp_ = OdeTrack(&op, E, R_, fp.data, lower, opt.ode);
  if (!op.half_line()) {
    auto fm = jost_far_field(op, -1, lambda, R_);
    born_ = std::max(born_, fm.born_size);
    tm_ = OdeTrack(&op, E, -R_, to_side(-1, fm.data), ext, opt.ode);
    const double pts[] = {-2.0, -1.0, 0.0, 1.0, 2.0};
    cd acc{};
    cd vals[5];
    for (int i = 0; i < 5; ++i) {
      vals[i] = wronskian(tm_.at(pts[i]), tp_.at(pts[i]));
      acc += vals[i];
    }
    W_ = acc / 5.0;
    Cauchy a = tm_.at(0.0), b = tp_.at(0.0);
    W_scale_ = std::abs(a.f) * std::abs(b.fp) + std::abs(a.fp) * std::abs(b.f);
    for (auto v : vals) W_spread_ = std::max(W_spread_, std::abs(v - W_));
    const cd tw = cd(0.0, 2.0 * lambda);
    bm_ = W_ / tw;
    bp_ = W_ / tw;
    am_ = wronskian(a, conj(b)) / (-tw);
    ap_ = wronskian(conj(a), b) / (-tw);
  }
  if (born_ > opt.max_born)
    throw Error(ErrorCode::AnchorTooSmall, "Born correction at the anchor exceeds the limit");
}

Cauchy JostPair::plus(double xi) const { return fix(plus_pos(xi)); }
Cauchy JostPair::minus(double xi) const { return fix(minus_pos(xi)); }

Cauchy JostPair::plus_pos(double xi) const {
  if (tp_.covers(xi)) return tp_.at(xi);
  if (xi > R_) return jost_far_field(*op_, +1, std::abs(lambda_), xi, 12).data;
  if (op_->half_line()) throw Error(ErrorCode::OutOfGrid, "below the half-line end");
  Cauchy m = minus_pos(xi);
  return {ap_ * m.f + bp_ * std::conj(m.f), ap_ * m.fp + bp_ * std::conj(m.fp)};
}

Cauchy JostPair::minus_pos(double xi) const {
  if (op_->half_line()) throw Error(ErrorCode::InvalidInput, "half-line operator has no left Jost solution");
  if (tm_.covers(xi)) return tm_.at(xi);
  if (xi < -R_) return to_side(-1, jost_far_field(*op_, -1, std::abs(lambda_), -xi, 12).data);
  Cauchy p = plus_pos(xi);
  return {am_ * p.f + bm_ * std::conj(p.f), am_ * p.fp + bm_ * std::conj(p.fp)};
}

WronskianResult compute_wronskian(const ReducedOperator& op, double lambda, JostOptions opt) {
  JostPair jp(op, lambda, opt);
  if (!jp.has_minus()) throw Error(ErrorCode::InvalidInput, "Wronskian needs both ends");
  WronskianResult r{jp.W(), jp.W_spread() / std::abs(jp.W()), jp.W_scale(), jp.anchor(), jp.born_size()};
  if (r.spread > 1e-6) throw Error(ErrorCode::NonConstantWronskian, "Wronskian varies across sample points");
  return r;
}

// ------------------------------------------------------------ zero energy

ZeroEnergyBasis::ZeroEnergyBasis(const ReducedOperator& op, ZeroEnergyOptions opt)
    : op_(&op), nu_(op.nu()), xi0_(opt.xi0), far_(opt.far), two_sided_(!op.half_line()) {
  auto fp = zero_energy_far_field(op, +1, far_);
  born_ = fp.born_size;
  const double lower = two_sided_ ? -opt.extent : op.lower_end();
  u1p_ = OdeTrack(&op, 0.0, far_, fp.data, lower, opt.ode);
  if (two_sided_) {
    auto fm = zero_energy_far_field(op, -1, far_);
    born_ = std::max(born_, fm.born_size);
    u1m_ = OdeTrack(&op, 0.0, -far_, to_side(-1, fm.data), opt.extent, opt.ode);
  }
  // the reduction integral needs u1 free of zeros beyond xi0
  auto shift = [&](const OdeTrack& t, int side, double x0) {
    for (double z : t.sign_changes_real()) {
      double eta = side * z;
      if (eta >= x0 - 1.0) x0 = std::max(x0, eta + 5.0);
    }
    if (x0 >= 0.5 * far_) throw Error(ErrorCode::BlowupDetected, "u1 vanishes up to the far anchor");
    return x0;
  };
  xi0_ = shift(u1p_, +1, xi0_);
  {
    Cauchy c = u1p_.at(xi0_);
    Cauchy d{cd(0.0), cd(2.0 * nu_) / c.f};
    u0p_fwd_ = OdeTrack(&op, 0.0, xi0_, d, far_ * 0.999, opt.ode);
    u0p_bwd_ = OdeTrack(&op, 0.0, xi0_, d, lower, opt.ode);
  }
  if (two_sided_) {
    double x0m = shift(u1m_, -1, opt.xi0);
    xi0_ = std::max(xi0_, x0m);
    // rebuild the right side if the left forced a larger xi0
    Cauchy c = u1p_.at(xi0_);
    Cauchy d{cd(0.0), cd(2.0 * nu_) / c.f};
    u0p_fwd_ = OdeTrack(&op, 0.0, xi0_, d, far_ * 0.999, opt.ode);
    u0p_bwd_ = OdeTrack(&op, 0.0, xi0_, d, lower, opt.ode);
    Cauchy cm = u1m_.at(-xi0_);
    Cauchy dm{cd(0.0), -cd(2.0 * nu_) / cm.f};
    u0m_fwd_ = OdeTrack(&op, 0.0, -xi0_, dm, -far_ * 0.999, opt.ode);
    u0m_bwd_ = OdeTrack(&op, 0.0, -xi0_, dm, opt.extent, opt.ode);

    Cauchy a = u1p_.at(0.0), b = u1m_.at(0.0);
    W11_ = wronskian(a, b).real();
    W11_scale_ = std::sqrt((std::norm(a.f) + std::norm(a.fp)) * (std::norm(b.f) + std::norm(b.fp)));
    for (double x : {-2.0, -1.0, 1.0, 2.0})
      W11_spread_ = std::max(W11_spread_, std::abs(wronskian(u1p_.at(x), u1m_.at(x)).real() - W11_));
    W11_spread_ /= W11_scale_;
  } else {
    W11_ = std::numeric_limits<double>::quiet_NaN();
  }
}

Cauchy ZeroEnergyBasis::u0_plus(double xi) const {
  return xi >= xi0_ ? u0p_fwd_.at(xi) : u0p_bwd_.at(xi);
}
Cauchy ZeroEnergyBasis::u0_minus(double xi) const {
  if (!two_sided_) throw Error(ErrorCode::InvalidInput, "half-line operator has no left basis");
  return xi <= -xi0_ ? u0m_fwd_.at(xi) : u0m_bwd_.at(xi);
}
Cauchy ZeroEnergyBasis::u0_side(int side, double eta) const {
  return side > 0 ? u0_plus(eta) : to_side(-1, u0_minus(-eta));
}
Cauchy ZeroEnergyBasis::u1_side(int side, double eta) const {
  return side > 0 ? u1_plus(eta) : to_side(-1, u1_minus(-eta));
}

GridFunction<double> ZeroEnergyBasis::grid(const std::string& which,
                                           const std::vector<double>& xs) const {
  std::vector<double> v, d;
  for (double x : xs) {
    Cauchy c;
    if (which == "u1+") c = u1_plus(x);
    else if (which == "u1-") c = u1_minus(x);
    else if (which == "u0+") c = u0_plus(x);
    else if (which == "u0-") c = u0_minus(x);
    else throw Error(ErrorCode::InvalidInput, "unknown basis function " + which);
    v.push_back(c.f.real());
    d.push_back(c.fp.real());
  }
  return GridFunction<double>(xs, v, d, 5);
}

bool is_resonant(const ZeroEnergyBasis& zb, double tol) {
  return std::abs(zb.W11_normalised()) < tol;
}

ResonanceScan resonance_scan(const std::function<ReducedOperator(double)>& family, double c_lo,
                             double c_hi, int samples, double tol, ZeroEnergyOptions opt) {
  if (samples < 2) throw Error(ErrorCode::InvalidInput, "need at least two samples");
  auto w = [&](double c) {
    ReducedOperator op = family(c);
    ZeroEnergyBasis zb(op, opt);
    return zb.W11_normalised();
  };
  ResonanceScan out;
  for (int i = 0; i < samples; ++i) {
    double c = c_lo + (c_hi - c_lo) * i / (samples - 1);
    out.c.push_back(c);
    out.w11.push_back(w(c));
  }
  for (int i = 1; i < samples; ++i) {
    double fa = out.w11[i - 1], fb = out.w11[i];
    if (fa == 0.0) {
      out.roots.push_back(out.c[i - 1]);
      continue;
    }
    if ((fa > 0) == (fb > 0)) continue;
    double a = out.c[i - 1], b = out.c[i];
    while (b - a > tol) {
      double m = 0.5 * (a + b), fm = w(m);
      if ((fm > 0) == (fa > 0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    out.roots.push_back(0.5 * (a + b));
  }
  if (out.roots.empty()) throw Error(ErrorCode::NoRoot, "W11 keeps one sign on the scanned range");
  return out;
}

// -------------------------------------------------------- perturbed basis

PerturbedBasis::PerturbedBasis(const ZeroEnergyBasis& zb, int side, double lambda, double c)
    : lambda_(lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::NonPositiveArgument, "lambda must be positive");
  if (side < 0 && !zb.two_sided()) throw Error(ErrorCode::InvalidInput, "no left end");
  lo_ = zb.xi0();
  hi_ = c / lambda;
  if (hi_ > 0.999 * zb.far()) hi_ = 0.999 * zb.far();
  if (!(hi_ > 1.01 * lo_)) throw Error(ErrorCode::WindowEmpty, "c/lambda does not exceed xi0");
  const double nu = zb.nu(), l2 = lambda * lambda, k = l2 / (2.0 * nu);
  const int deg = 24;

  std::vector<double> br = {lo_};
  while (br.back() < hi_) br.push_back(std::min(hi_, br.back() * 1.5));
  if (br.size() >= 3 && (br.back() - br[br.size() - 2]) < 0.3 * (br[br.size() - 2] - br[br.size() - 3])) {
    br.erase(br.end() - 2);
  }
  const std::size_t np = br.size() - 1;
  std::vector<std::vector<double>> nodes(np), z0(np), z0d(np), z1(np), z1d(np);
  for (std::size_t p = 0; p < np; ++p) {
    nodes[p] = chebyshev_nodes(deg, br[p], br[p + 1]);
    for (double x : nodes[p]) {
      Cauchy a = zb.u0_side(side, x), b = zb.u1_side(side, x);
      z0[p].push_back(a.f.real());
      z0d[p].push_back(a.fp.real());
      z1[p].push_back(b.f.real());
      z1d[p].push_back(b.fp.real());
    }
  }
  // cumulative integral from lo_ of panel data g
  auto cumulative = [&](const std::vector<std::vector<double>>& g) {
    std::vector<std::vector<double>> out(np);
    double offset = 0.0;
    for (std::size_t p = 0; p < np; ++p) {
      auto s = ChebSeries<double>::from_values(br[p], br[p + 1], g[p]).integral();
      for (double x : nodes[p]) out[p].push_back(offset + s(x));
      offset += s(br[p + 1]);
    }
    return out;
  };
  auto u = z0;
  std::vector<std::vector<double>> A, B;
  bool converged = false;
  for (iters_ = 1; iters_ <= 400; ++iters_) {
    std::vector<std::vector<double>> ga(np), gb(np);
    for (std::size_t p = 0; p < np; ++p)
      for (int i = 0; i < deg; ++i) {
        ga[p].push_back(z0[p][i] * u[p][i]);
        gb[p].push_back(z1[p][i] * u[p][i]);
      }
    A = cumulative(ga);
    B = cumulative(gb);
    double change = 0.0;
    for (std::size_t p = 0; p < np; ++p)
      for (int i = 0; i < deg; ++i) {
        double v = z0[p][i] + k * (z1[p][i] * A[p][i] - z0[p][i] * B[p][i]);
        change = std::max(change, std::abs(v - u[p][i]) / std::max(std::abs(v), 1e-300));
        u[p][i] = v;
      }
    if (!std::isfinite(change)) break;
    if (change < 1e-15) {
      converged = true;
      break;
    }
  }
  if (!converged) throw Error(ErrorCode::IterationDiverged, "Volterra iteration did not settle");

  std::vector<ChebSeries<double>> s0, s0d, s1, s1d;
  std::vector<std::vector<double>> inv2(np);
  std::vector<std::vector<double>> du(np);
  for (std::size_t p = 0; p < np; ++p)
    for (int i = 0; i < deg; ++i) {
      du[p].push_back(z0d[p][i] + k * (z1d[p][i] * A[p][i] - z0d[p][i] * B[p][i]));
      inv2[p].push_back(1.0 / (u[p][i] * u[p][i]));
    }
  // u0 vanishes at xi0, so J = int_eta^hi u0^{-2} is taken from the right and
  // u1 is kept only beyond the first panel
  u1_lo_ = br[1];
  std::vector<double> Jright(np + 1, 0.0);
  std::vector<ChebSeries<double>> jpanel(np);
  for (std::size_t p = np; p-- > 1;) {
    jpanel[p] = ChebSeries<double>::from_values(br[p], br[p + 1], inv2[p]).integral();
    Jright[p] = Jright[p + 1] + jpanel[p](br[p + 1]);
  }
  for (std::size_t p = 0; p < np; ++p) {
    std::vector<double> v1(deg, 0.0), d1(deg, 0.0);
    for (int i = 0; p > 0 && i < deg; ++i) {
      double J = Jright[p + 1] + jpanel[p](br[p + 1]) - jpanel[p](nodes[p][i]);
      v1[i] = u[p][i] * J;
      d1[i] = du[p][i] * J - 1.0 / u[p][i];
    }
    s0.push_back(ChebSeries<double>::from_values(br[p], br[p + 1], u[p]));
    s0d.push_back(ChebSeries<double>::from_values(br[p], br[p + 1], du[p]));
    s1.push_back(ChebSeries<double>::from_values(br[p], br[p + 1], v1));
    s1d.push_back(ChebSeries<double>::from_values(br[p], br[p + 1], d1));
  }
  u0_ = PiecewiseCheb<double>(std::move(s0));
  du0_ = PiecewiseCheb<double>(std::move(s0d));
  u1_ = PiecewiseCheb<double>(std::move(s1));
  du1_ = PiecewiseCheb<double>(std::move(s1d));

  // residual of the ODE between nodes, and the size of the correction
  auto ddu = du0_.derivative();
  const ReducedOperator& op = zb.op();
  for (std::size_t p = 0; p < np; ++p) {
    for (int j = 0; j < 7; ++j) {
      double x = br[p] + (j + 0.5) / 7.0 * (br[p + 1] - br[p]);
      double z = zb.u0_side(side, x).f.real();
      double V = op.V(side * x);
      double val = u0_(x);
      double res = std::abs(ddu(x) - (V - l2) * val) / std::abs(val);
      residual_ = std::max(residual_, res);
      corr_c_ = std::max(corr_c_, std::abs(val / z - 1.0) / (l2 * x * x));
    }
  }
}

Cauchy PerturbedBasis::u0(double eta) const {
  if (eta < lo_ * (1 - 1e-12) || eta > hi_ * (1 + 1e-12)) throw Error(ErrorCode::OutOfGrid, "outside the matching window");
  return {cd(u0_(eta)), cd(du0_(eta))};
}
Cauchy PerturbedBasis::u1(double eta) const {
  if (eta < u1_lo_ * (1 - 1e-12) || eta > hi_ * (1 + 1e-12)) throw Error(ErrorCode::OutOfGrid, "outside the matching window");
  return {cd(u1_(eta)), cd(du1_(eta))};
}

ConnectionCoefficients connection_coefficients(const JostPair& jp, const ZeroEnergyBasis& zb,
                                               int side, double c) {
  const double lambda = jp.lambda(), nu = zb.nu();
  const double eps = std::min(0.25 / nu, 0.25);
  ConnectionCoefficients out;
  out.xi_star = std::pow(lambda, -1.0 + eps);
  PerturbedBasis pb(zb, side, lambda, c);
  const double pts[] = {out.xi_star, 0.5 * out.xi_star, 2.0 * out.xi_star};
  for (double x : pts)
    if (x < pb.u1_lo() || x > pb.hi())
      throw Error(ErrorCode::WindowEmpty, "matching points fall outside [xi0, c/lambda]");
  cd as[3], bs[3];
  for (int i = 0; i < 3; ++i) {
    double x = pts[i];
    Cauchy F = side > 0 ? jp.plus(x) : to_side(-1, jp.minus(-x));
    as[i] = -wronskian(F, pb.u1(x));
    bs[i] = wronskian(F, pb.u0(x));
  }
  out.a = as[0];
  out.b = bs[0];
  for (int i = 1; i < 3; ++i) {
    out.spread_a = std::max(out.spread_a, std::abs(as[i] - as[0]) / std::abs(as[0]));
    out.spread_b = std::max(out.spread_b, std::abs(bs[i] - bs[0]) / std::abs(bs[0]));
  }
  return out;
}

PowerLawFit powerlaw_fit(const ReducedOperator& op, const std::vector<double>& lambdas,
                         JostOptions opt) {
  if (lambdas.size() < 12) throw Error(ErrorCode::InsufficientSamples, "need at least 12 samples");
  PowerLawFit out;
  std::vector<double> lx, ly;
  for (double l : lambdas) {
    JostPair jp(op, l, opt);
    out.lambda.push_back(l);
    out.W.push_back(jp.W());
    lx.push_back(std::log(l));
    ly.push_back(std::log(std::abs(jp.W())));
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  out.exponent = sxy / sxx;
  double b = my - out.exponent * mx, rr = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) rr += std::pow(ly[i] - (b + out.exponent * lx[i]), 2);
  out.residual = std::sqrt(rr / n);
  std::size_t imin = std::min_element(out.lambda.begin(), out.lambda.end()) - out.lambda.begin();
  const double nu = op.nu(), l = out.lambda[imin];
  out.constant = out.W[imin] / (I * std::polar(1.0, nu * kPi) * std::pow(l, 1.0 - 2.0 * nu));
  return out;
}

ReflectionTransmission reflection_transmission(const ReducedOperator& op, double lambda,
                                               JostOptions opt) {
  JostPair jp(op, lambda, opt);
  if (!jp.has_minus()) throw Error(ErrorCode::InvalidInput, "needs both ends");
  ReflectionTransmission r{jp.alpha_minus(), jp.beta_minus(), 0.0};
  r.flux_residual = std::norm(r.beta) - std::norm(r.alpha) - 1.0;
  return r;
}

double agmon_distance(double nu, double lambda) {
  if (lambda >= nu) return 0.0;
  const double xt = std::sqrt(nu * nu / (lambda * lambda) - 1.0);
  // xi = xt (1 - u^2) removes the square-root endpoint
  auto f = [&](double u) {
    double xi = xt * (1.0 - u * u);
    double v = nu * nu / (1.0 + xi * xi) - lambda * lambda;
    return v > 0 ? std::sqrt(v) * 2.0 * xt * u : 0.0;
  };
  return 2.0 * integrate_adaptive(f, 0.0, 1.0, 1e-13, 1e-13).value;
}

ScatteringData compute_scattering(const ReducedOperator& op, const std::vector<double>& lambdas,
                                  JostOptions opt) {
  ScatteringData d;
  d.label = op.label;
  d.nu = op.nu();
  ZeroEnergyBasis zb(op);
  d.W11 = zb.W11();
  d.W11_normalised = zb.W11_normalised();
  const double eps = std::min(0.25 / d.nu, 0.25);
  for (double l : lambdas) {
    JostPair jp(op, l, opt);
    ScatteringRow row{l, jp.W(), jp.alpha_minus(), jp.beta_minus(), {}, {}, {}, {}, jp.W_spread()};
    double xs = std::pow(l, -1.0 + eps);
    if (0.5 * xs >= zb.xi0() && 2.0 * xs <= 1.0 / l) {
      auto cp = connection_coefficients(jp, zb, +1);
      auto cm = connection_coefficients(jp, zb, -1);
      row.a_plus = cp.a;
      row.b_plus = cp.b;
      row.a_minus = cm.a;
      row.b_minus = cm.b;
    }
    d.rows.push_back(row);
  }
  return d;
}

namespace {
std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

std::string ScatteringData::to_csv() const {
  std::ostringstream os;
  os << "lambda,re_W,im_W,re_alpha_minus,im_alpha_minus,re_beta_minus,im_beta_minus,"
        "re_a_plus,im_a_plus,re_b_plus,im_b_plus,re_a_minus,im_a_minus,re_b_minus,im_b_minus\n";
  auto opt = [](const std::optional<cd>& c) {
    return c ? num(c->real()) + "," + num(c->imag()) : std::string("nan,nan");
  };
  for (const auto& r : rows) {
    os << num(r.lambda) << ',' << num(r.W.real()) << ',' << num(r.W.imag()) << ','
       << num(r.alpha_minus.real()) << ',' << num(r.alpha_minus.imag()) << ','
       << num(r.beta_minus.real()) << ',' << num(r.beta_minus.imag()) << ',' << opt(r.a_plus)
       << ',' << opt(r.b_plus) << ',' << opt(r.a_minus) << ',' << opt(r.b_minus) << '\n';
  }
  return os.str();
}

std::string ScatteringData::to_json() const {
  using nlohmann::json;
  json j;
  j["label"] = label;
  j["nu"] = nu;
  j["W11"] = W11;
  j["W11_normalised"] = W11_normalised;
  auto c = [](cd v) { return json::array({v.real(), v.imag()}); };
  auto o = [&](const std::optional<cd>& v) { return v ? c(*v) : json(nullptr); };
  json rs = json::array();
  for (const auto& r : rows) {
    rs.push_back({{"lambda", r.lambda},
                  {"W", c(r.W)},
                  {"alpha_minus", c(r.alpha_minus)},
                  {"beta_minus", c(r.beta_minus)},
                  {"a_plus", o(r.a_plus)},
                  {"b_plus", o(r.b_plus)},
                  {"a_minus", o(r.a_minus)},
                  {"b_minus", o(r.b_minus)},
                  {"W_spread", r.W_spread}});
  }
  j["rows"] = rs;
  return j.dump(2);
}

}  // namespace conedisp
