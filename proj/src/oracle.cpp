#include "conedisp/oracle.hpp"

#include <algorithm>
#include <cmath>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "conedisp/errors.hpp"

namespace conedisp {

DiscreteOperator discretize(const ReducedOperator& op, double L, double h, Stencil s) {
  if (!(L > 0 && h > 0)) throw Error(ErrorCode::NonPositiveArgument, "box and spacing must be positive");
  const long n = std::lround(2.0 * L / h) - 1;
  if (n > 4000) throw Error(ErrorCode::TooLarge, "more than 4000 nodes");
  if (n < 5) throw Error(ErrorCode::InvalidInput, "grid too coarse");
  if (op.half_line()) throw Error(ErrorCode::InvalidInput, "two-sided operator expected");
  DiscreteOperator d;
  d.L = L;
  d.N = static_cast<int>(n);
  d.h = 2.0 * L / (n + 1);
  d.stencil = s;
  d.x.resize(n);
  d.V.resize(n);
  for (int i = 0; i < n; ++i) {
    d.x[i] = -L + (i + 1) * d.h;
    d.V[i] = op.V(d.x[i]);
  }
  return d;
}

namespace {

// lower band storage of H, kd = 1 or 2
std::vector<double> band(const DiscreteOperator& d, int& kd) {
  const int n = d.N;
  const double ih2 = 1.0 / (d.h * d.h);
  kd = d.stencil == Stencil::Second ? 1 : 2;
  std::vector<double> ab(static_cast<std::size_t>(kd + 1) * n, 0.0);
  // column-major lower band: ab[(i - j) + j * (kd + 1)]
  for (int j = 0; j < n; ++j) {
    if (kd == 1) {
      ab[j * 2] = 2.0 * ih2 + d.V[j];
      if (j + 1 < n) ab[1 + j * 2] = -ih2;
    } else {
      ab[j * 3] = 2.5 * ih2 + d.V[j];
      if (j + 1 < n) ab[1 + j * 3] = -(4.0 / 3.0) * ih2;
      if (j + 2 < n) ab[2 + j * 3] = (1.0 / 12.0) * ih2;
    }
  }
  return ab;
}

double apply_row(const DiscreteOperator& d, const double* u, int i) {
  const double ih2 = 1.0 / (d.h * d.h);
  auto at = [&](int k) { return k >= 0 && k < d.N ? u[k] : 0.0; };
  if (d.stencil == Stencil::Second) return (2.0 * u[i] - at(i - 1) - at(i + 1)) * ih2 + d.V[i] * u[i];
  return (2.5 * u[i] - (4.0 / 3.0) * (at(i - 1) + at(i + 1)) + (1.0 / 12.0) * (at(i - 2) + at(i + 2))) * ih2 +
         d.V[i] * u[i];
}

std::size_t grid_index(const DiscreteOperator& d, double x) {
  double r = (x + d.L) / d.h - 1.0;
  long k = std::lround(r);
  if (std::abs(r - k) > 1e-8 || k < 0 || k >= d.N) throw Error(ErrorCode::OutOfGrid, "point is not a grid node");
  return static_cast<std::size_t>(k);
}

}  // namespace

EigenSystem eigensystem(const DiscreteOperator& dop, double e_max) {
  EigenSystem es;
  es.dop = dop;
  const int n = dop.N;
  int kd = 0;
  auto ab = band(dop, kd);
  std::vector<double> w(n), z(static_cast<std::size_t>(n) * n);
  const bool all = !(e_max > 0);
  lapack_int m = 0;
  lapack_int info;
  if (kd == 1) {
    std::vector<double> dg(n), e(n);
    for (int j = 0; j < n; ++j) {
      dg[j] = ab[j * 2];
      e[j] = ab[1 + j * 2];
    }
    std::vector<lapack_int> supp(2 * static_cast<std::size_t>(n));
    info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', all ? 'A' : 'V', n, dg.data(), e.data(), -1e300, e_max, 0, 0,
                          0.0, &m, w.data(), z.data(), n, supp.data());
  } else {
    std::vector<double> q(static_cast<std::size_t>(n) * n);
    std::vector<lapack_int> fail(n);
    info = LAPACKE_dsbevx(LAPACK_COL_MAJOR, 'V', all ? 'A' : 'V', 'L', n, kd, ab.data(), kd + 1, q.data(), n,
                          -1e300, e_max, 0, 0, 0.0, &m, w.data(), z.data(), n, fail.data());
  }
  if (info != 0) throw Error(ErrorCode::ConvergenceFailure, "dense eigensolver failed");
  es.E.assign(w.begin(), w.begin() + m);
  z.resize(static_cast<std::size_t>(m) * n);  // column k = mode k
  es.psi = std::move(z);
  es.complete = m == n;
  std::vector<double> r(n);
  for (int k = 0; k < m; ++k) {
    const double* u = &es.psi[static_cast<std::size_t>(k) * n];
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      double v = apply_row(dop, u, i) - es.E[k] * u[i];
      s += v * v;
    }
    es.max_residual = std::max(es.max_residual, std::sqrt(s));
  }
  return es;
}

FDKernel fd_propagator(const EigenSystem& es, double t, Evolution ev, const std::vector<double>& points,
                       BandWindow bw) {
  const auto& d = es.dop;
  std::vector<std::size_t> idx;
  for (double x : points) idx.push_back(grid_index(d, x));
  std::vector<cd> g(es.modes());
  for (int k = 0; k < es.modes(); ++k) {
    const double E = es.E[k];
    const double l = std::sqrt(std::max(E, 0.0));
    double chi = bw.hi > 0 ? smooth_window(l, bw.lo, bw.hi) : 1.0;
    switch (ev) {
      case Evolution::Schrodinger: g[k] = std::exp(cd(0, t * E)); break;
      // E < 0 continues analytically: cos -> cosh, sin/l -> sinh/kappa
      case Evolution::WaveCos: g[k] = E >= 0 ? std::cos(t * l) : std::cosh(t * std::sqrt(-E)); break;
      case Evolution::WaveSin:
        if (E > 0)
          g[k] = std::sin(t * l) / l;
        else if (E < 0)
          g[k] = std::sinh(t * std::sqrt(-E)) / std::sqrt(-E);
        else
          g[k] = t;
        break;
    }
    g[k] *= chi;
  }
  FDKernel out;
  out.points = points;
  const std::size_t p = points.size();
  out.K.assign(p * p, 0.0);
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = a; b < p; ++b) {
      cd s = 0.0;
      for (int k = 0; k < es.modes(); ++k) s += g[k] * es.mode(k, idx[a]) * es.mode(k, idx[b]);
      out.K[a * p + b] = out.K[b * p + a] = s / d.h;
    }
  return out;
}

double band_energy_cap(BandWindow band_w) {
  // every mode the window lets through plus a margin
  return band_w.hi > 0 ? 1.5 * band_w.hi * band_w.hi + 50.0 : -1.0;
}

RichardsonKernel fd_propagator_richardson(const EigenSystem& coarse, const EigenSystem& fine, double t,
                                          Evolution ev, const std::vector<double>& points, BandWindow band_w) {
  if (coarse.dop.stencil != fine.dop.stencil || std::abs(coarse.dop.h - 2.0 * fine.dop.h) > 1e-12 * coarse.dop.h)
    throw Error(ErrorCode::InvalidInput, "fine grid must halve the coarse spacing");
  auto kc = fd_propagator(coarse, t, ev, points, band_w);
  auto kf = fd_propagator(fine, t, ev, points, band_w);
  const double r = coarse.dop.stencil == Stencil::Second ? 4.0 : 16.0;
  RichardsonKernel out;
  out.value = kf;
  for (std::size_t k = 0; k < kf.K.size(); ++k) {
    out.value.K[k] = (r * kf.K[k] - kc.K[k]) / (r - 1.0);
    out.change = std::max(out.change, std::abs(kf.K[k] - kc.K[k]));
  }
  out.residual = std::max(coarse.max_residual, fine.max_residual);
  return out;
}

RichardsonKernel fd_propagator_richardson(const ReducedOperator& op, double t, Evolution ev,
                                          const std::vector<double>& points, double h, BandWindow band_w,
                                          double L, Stencil s) {
  const double e_max = band_energy_cap(band_w);
  auto coarse = eigensystem(discretize(op, L, h, s), e_max);
  auto fine = eigensystem(discretize(op, L, 0.5 * h, s), e_max);
  return fd_propagator_richardson(coarse, fine, t, ev, points, band_w);
}

namespace {

struct State {
  cd f, fp;
};

cd wronskian(const State& a, const State& b) { return a.f * b.fp - a.fp * b.f; }

State start(const ReducedOperator& op, double lambda, double xi, int side) {
  const double c = op.tail_constant(), a = std::abs(xi);
  const cd ph = std::exp(cd(0, side * lambda * xi));
  const cd amp = 1.0 + cd(0, c / (2.0 * lambda * a));
  const cd damp = cd(0, -c / (2.0 * lambda * a * a)) * double(side);  // d amp / d xi
  return {ph * amp, ph * (cd(0, side * lambda) * amp + damp)};
}

// classical RK4 for f'' = (V - lambda^2) f from x0 to 0
State shoot(const ReducedOperator& op, double lambda, double x0, State s, double h) {
  const double E = lambda * lambda;
  const long steps = std::lround(std::abs(x0) / h);
  const double dx = -x0 / steps;
  double x = x0;
  auto rhs = [&](double xx, const State& u) { return State{u.fp, (op.V(xx) - E) * u.f}; };
  for (long k = 0; k < steps; ++k) {
    State k1 = rhs(x, s);
    State k2 = rhs(x + 0.5 * dx, {s.f + 0.5 * dx * k1.f, s.fp + 0.5 * dx * k1.fp});
    State k3 = rhs(x + 0.5 * dx, {s.f + 0.5 * dx * k2.f, s.fp + 0.5 * dx * k2.fp});
    State k4 = rhs(x + dx, {s.f + dx * k3.f, s.fp + dx * k3.fp});
    s.f += dx / 6.0 * (k1.f + 2.0 * k2.f + 2.0 * k3.f + k4.f);
    s.fp += dx / 6.0 * (k1.fp + 2.0 * k2.fp + 2.0 * k3.fp + k4.fp);
    x = x0 + (k + 1) * dx;
  }
  return s;
}

}  // namespace

ShootingResult shooting_scattering(const ReducedOperator& op, double lambda, double L, double h) {
  if (lambda < 0.05) throw Error(ErrorCode::UnstableShooting, "lambda below 0.05");
  if (op.half_line()) throw Error(ErrorCode::InvalidInput, "two-sided operator expected");
  if (L > op.domain_radius()) throw Error(ErrorCode::OutOfGrid, "box exceeds the tabulated domain");
  auto run = [&](double step, State& p, State& m) {
    p = shoot(op, lambda, L, start(op, lambda, L, +1), step);
    m = shoot(op, lambda, -L, start(op, lambda, -L, -1), step);
  };
  // RK4 error per unit length grows like lambda^5 h^4
  const double step = h / std::max(1.0, lambda);
  State p1, m1, p2, m2;
  run(step, p1, m1);
  run(0.5 * step, p2, m2);
  // RK4 is fourth order in the step
  auto extrap = [](cd a, cd b) { return (16.0 * b - a) / 15.0; };
  State p{extrap(p1.f, p2.f), extrap(p1.fp, p2.fp)}, m{extrap(m1.f, m2.f), extrap(m1.fp, m2.fp)};
  ShootingResult r;
  r.W = wronskian(m, p);
  const double scale = std::abs(m.f) * std::abs(p.fp) + std::abs(m.fp) * std::abs(p.f);
  r.step_change = std::abs(wronskian(m1, p1) - wronskian(m2, p2)) / std::abs(r.W);
  if (!std::isfinite(r.W.real()) || std::abs(r.W) < 1e-12 * scale || r.step_change > 1e-3)
    throw Error(ErrorCode::UnstableShooting, "shooting did not settle under step halving");
  const cd tw(0, 2.0 * lambda);
  r.beta_minus = r.W / tw;
  r.alpha_minus = wronskian(m, {std::conj(p.f), std::conj(p.fp)}) / (-tw);
  return r;
}

}  // namespace conedisp
