#include "conedisp/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <json.hpp>

#include "conedisp/chebyshev.hpp"
#include "conedisp/errors.hpp"
#include "conedisp/quadrature.hpp"

namespace conedisp {

namespace {
constexpr double kPi = std::numbers::pi;
const cd kI(0.0, 1.0);

// samples at a point are interpolated in lambda as they are while the
// oscillation e^{2 i lambda x} stays below this phase across a panel
constexpr double kDirectPhase = 6.0;
// pieces with less total phase than this are done by Gauss-Legendre
constexpr double kGLPhase = 60.0;

bool use_direct(double x, double width) { return 2.0 * std::abs(x) * width <= kDirectPhase; }

std::vector<double> bary_weights(int n) {
  std::vector<double> w(n);
  for (int k = 0; k < n; ++k) w[k] = ((k % 2) ? -1.0 : 1.0) * std::sin(kPi * (k + 0.5) / n);
  return w;
}

template <class T>
T bary(const std::vector<double>& x, const std::vector<double>& w, const T* f, double t) {
  T num{};
  double den = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    double d = t - x[j];
    if (d == 0.0) return f[j];
    double q = w[j] / d;
    num += q * f[j];
    den += q;
  }
  return num / den;
}

struct Phase {
  double t2 = 0.0, s = 0.0;  // psi = t2 lambda^2 + s lambda
  double operator()(double l) const { return (t2 * l + s) * l; }
  double d(double l) const { return 2.0 * t2 * l + s; }
};

// int_u^v e^{i psi} g with Chebyshev collocation of p' + i psi' p = g
cd levin(const Phase& ph, double u, double v, const std::vector<double>& y,
         const std::vector<double>& bw, const std::vector<cd>& g) {
  const int n = static_cast<int>(y.size());
  std::vector<cd> M(n * n), rhs(g);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double Dij = (bw[j] / bw[i]) / (y[i] - y[j]);
      M[i * n + j] = Dij;
      diag -= Dij;
    }
    M[i * n + i] = cd(diag, ph.d(y[i]));
  }
  std::vector<lapack_int> piv(n);
  lapack_int info = LAPACKE_zgesv(LAPACK_ROW_MAJOR, n, 1, M.data(), n, piv.data(), rhs.data(), 1);
  if (info != 0) throw Error(ErrorCode::QuadratureNotConverged, "Levin collocation is singular");
  cd pu = bary(y, bw, rhs.data(), u), pv = bary(y, bw, rhs.data(), v);
  return pv * std::exp(kI * ph(v)) - pu * std::exp(kI * ph(u));
}

// One complex exponential term of the density on a panel: e^{i lambda s} c(lambda)
struct Term {
  double s;
  std::vector<cd> c;
};

void add_term(std::vector<Term>& ts, double s, const std::vector<cd>& v, cd scale) {
  for (auto& t : ts)
    if (t.s == s) {
      for (std::size_t k = 0; k < v.size(); ++k) t.c[k] += scale * v[k];
      return;
    }
  Term t{s, std::vector<cd>(v.size())};
  for (std::size_t k = 0; k < v.size(); ++k) t.c[k] = scale * v[k];
  ts.push_back(std::move(t));
}

struct Rep {
  double s;
  std::vector<cd> v;
};

std::vector<Rep> rep_plus(const SpectralCache::Panel& P, double x, std::size_t k) {
  const std::size_t n = P.lam.size();
  if (use_direct(x, P.b - P.a)) return {{0.0, P.fp[k]}};
  if (x >= 0) {
    Rep r{x, std::vector<cd>(n)};
    for (std::size_t j = 0; j < n; ++j) r.v[j] = std::exp(cd(0, -P.lam[j] * x)) * P.fp[k][j];
    return {r};
  }
  Rep r1{-x, std::vector<cd>(n)}, r2{x, std::vector<cd>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    cd m = std::exp(cd(0, P.lam[j] * x)) * P.fm[k][j];
    r1.v[j] = P.ap[j] * m;
    r2.v[j] = P.bp[j] * std::conj(m);
  }
  return {r1, r2};
}

std::vector<Rep> rep_minus(const SpectralCache::Panel& P, double x, std::size_t k) {
  const std::size_t n = P.lam.size();
  if (use_direct(x, P.b - P.a)) return {{0.0, P.fm[k]}};
  if (x <= 0) {
    Rep r{-x, std::vector<cd>(n)};
    for (std::size_t j = 0; j < n; ++j) r.v[j] = std::exp(cd(0, P.lam[j] * x)) * P.fm[k][j];
    return {r};
  }
  Rep r1{x, std::vector<cd>(n)}, r2{-x, std::vector<cd>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    cd m = std::exp(cd(0, -P.lam[j] * x)) * P.fp[k][j];
    r1.v[j] = P.am[j] * m;
    r2.v[j] = P.bm[j] * std::conj(m);
  }
  return {r1, r2};
}

// density terms on a panel for target i against weighted sources
std::vector<Term> panel_terms(const SpectralCache& c, const SpectralCache::Panel& P, std::size_t i,
                              const std::vector<std::pair<std::size_t, double>>& src) {
  const auto& xs = c.points();
  const std::size_t n = P.lam.size();
  std::vector<Term> out;
  std::vector<cd> prod(n);
  for (auto [j, q] : src) {
    std::size_t g = xs[i] >= xs[j] ? i : j, l = xs[i] >= xs[j] ? j : i;
    auto A = rep_plus(P, xs[g], g);
    auto B = rep_minus(P, xs[l], l);
    for (const auto& a : A)
      for (const auto& b : B) {
        for (std::size_t k = 0; k < n; ++k)
          prod[k] = a.v[k] * b.v[k] * (kI * P.lam[k] / kPi) / P.W[k];
        add_term(out, a.s + b.s, prod, q);
      }
  }
  return out;
}

double density_from_terms(const std::vector<Term>& ts, const std::vector<double>& lam,
                          const std::vector<double>& bw, double l) {
  double e = 0.0;
  for (const auto& t : ts) e += 2.0 * (std::exp(cd(0, l * t.s)) * bary(lam, bw, t.c.data(), l)).real();
  return e;
}

struct EvoTerm {
  Phase ph;
  cd coef;
  bool conj;
};

// exponential pieces of g(t, lambda) e(lambda) for one density term e^{i lambda s} c + cc
std::vector<EvoTerm> evolution_terms(Evolution ev, double t, double s) {
  switch (ev) {
    case Evolution::Schrodinger:
      return {{{t, s}, 1.0, false}, {{t, -s}, 1.0, true}};
    case Evolution::WaveCos:
      return {{{0, s + t}, 0.5, false}, {{0, s - t}, 0.5, false}, {{0, -s + t}, 0.5, true}, {{0, -s - t}, 0.5, true}};
    case Evolution::WaveSin:
      return {{{0, s + t}, 1.0 / (2.0 * kI), false},
              {{0, s - t}, -1.0 / (2.0 * kI), false},
              {{0, -s + t}, 1.0 / (2.0 * kI), true},
              {{0, -s - t}, -1.0 / (2.0 * kI), true}};
  }
  return {};
}

cd evolution_factor(Evolution ev, double t, double l) {
  switch (ev) {
    case Evolution::Schrodinger: return std::exp(cd(0, t * l * l));
    case Evolution::WaveCos: return std::cos(t * l);
    case Evolution::WaveSin: return std::sin(t * l) / l;
  }
  return 0.0;
}

double phase_span(const Phase& ph, double u, double v) {
  double span = std::abs(ph(v) - ph(u));
  if (ph.t2 != 0.0) {
    double l0 = -ph.s / (2.0 * ph.t2);
    if (l0 > u && l0 < v) span = std::abs(ph(l0) - ph(u)) + std::abs(ph(v) - ph(l0));
  }
  return span;
}

// breakpoints grading towards the stationary point of ph inside (u, v)
std::vector<double> graded_breaks(const Phase& ph, double u, double v) {
  std::vector<double> br = {u, v};
  if (ph.t2 > 0.0) {
    const double l0 = -ph.s / (2.0 * ph.t2), delta = 1.0 / std::sqrt(ph.t2);
    if (l0 > u && l0 < v) br.push_back(l0);
    for (double d = delta; d < 2.0 * (v - u) + std::abs(l0 - u) + std::abs(l0 - v); d *= 2.0) {
      if (l0 + d > u && l0 + d < v) br.push_back(l0 + d);
      if (l0 - d > u && l0 - d < v) br.push_back(l0 - d);
    }
  }
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  return br;
}

int gl_order(double phase) { return std::min(96, 16 + static_cast<int>(std::ceil(0.6 * phase))); }

struct Integrator {
  const SpectralCache& c;
  Evolution ev;
  double t, w0, w1;
  std::vector<double> bw;
  std::size_t pieces = 0;

  double chi(double l) const { return smooth_window(l, w0, w1); }

  // amplitude multiplying e^{i psi} for an evolution term, at lambda
  cd amp(const std::vector<double>& lam, const Term& T, const EvoTerm& E, double l) const {
    cd v = bary(lam, bw, T.c.data(), l);
    if (E.conj) v = std::conj(v);
    v *= E.coef * chi(l);
    if (ev == Evolution::WaveSin) v /= l;
    return v;
  }

  cd run(std::size_t i, const std::vector<std::pair<std::size_t, double>>& src, int level) {
    cd total = 0.0;
    pieces = 0;
    const auto& panels = c.panels();
    for (std::size_t p = 0; p < panels.size(); ++p) {
      const auto& P = panels[p];
      if (P.a >= w1) break;
      const double u = P.a, v = std::min(P.b, w1);
      auto terms = panel_terms(c, P, i, src);
      if (p == 0) total += low_end(P, terms);
      // the whole panel at once while every exponential stays slow
      double span = 0.0;
      for (const auto& T : terms)
        for (const auto& E : evolution_terms(ev, t, T.s)) span = std::max(span, phase_span(E.ph, u, v));
      if (span <= kGLPhase) {
        total += full(P, terms, u, v, span, level);
        continue;
      }
      for (const auto& T : terms)
        for (const auto& E : evolution_terms(ev, t, T.s)) total += piecewise(P, T, E, u, v, level);
    }
    return total;
  }

  // [0, lambda_min]: density frozen at lambda_min
  cd low_end(const SpectralCache::Panel& P, const std::vector<Term>& terms) {
    const double l0 = c.lambda_min();
    const double e = density_from_terms(terms, P.lam, bw, l0);
    const auto& g = gauss_legendre(16);
    cd acc = 0.0;
    for (std::size_t k = 0; k < g.x.size(); ++k) {
      double l = 0.5 * l0 * (g.x[k] + 1.0);
      acc += 0.5 * l0 * g.w[k] * evolution_factor(ev, t, l) * chi(l);
    }
    ++pieces;
    return acc * e;
  }

  cd full(const SpectralCache::Panel& P, const std::vector<Term>& terms, double u, double v, double span,
          int level) {
    const int m = 1 << level;
    const auto& g = gauss_legendre(gl_order(span / m));
    cd acc = 0.0;
    for (int q = 0; q < m; ++q) {
      double a = u + (v - u) * q / m, b = u + (v - u) * (q + 1) / m;
      for (std::size_t k = 0; k < g.x.size(); ++k) {
        double l = 0.5 * (a + b) + 0.5 * (b - a) * g.x[k];
        acc += 0.5 * (b - a) * g.w[k] * evolution_factor(ev, t, l) * chi(l) *
               density_from_terms(terms, P.lam, bw, l);
      }
      ++pieces;
    }
    return acc;
  }

  cd piecewise(const SpectralCache::Panel& P, const Term& T, const EvoTerm& E, double u, double v, int level) {
    auto br = graded_breaks(E.ph, u, v);
    cd acc = 0.0;
    const int m = 1 << level;
    const int n = static_cast<int>(P.lam.size());
    for (std::size_t q = 0; q + 1 < br.size(); ++q) {
      for (int r = 0; r < m; ++r) {
        double a = br[q] + (br[q + 1] - br[q]) * r / m, b = br[q] + (br[q + 1] - br[q]) * (r + 1) / m;
        double span = phase_span(E.ph, a, b);
        ++pieces;
        if (span <= kGLPhase) {
          const auto& g = gauss_legendre(gl_order(span));
          for (std::size_t k = 0; k < g.x.size(); ++k) {
            double l = 0.5 * (a + b) + 0.5 * (b - a) * g.x[k];
            acc += 0.5 * (b - a) * g.w[k] * std::exp(kI * E.ph(l)) * amp(P.lam, T, E, l);
          }
        } else {
          auto y = chebyshev_nodes(n, a, b);
          std::vector<cd> gy(n);
          for (int k = 0; k < n; ++k) gy[k] = amp(P.lam, T, E, y[k]);
          acc += levin(E.ph, a, b, y, bw, gy);
        }
      }
    }
    return acc;
  }
};

void resolve_window(double t, const KernelOptions& o, double& w0, double& w1) {
  w0 = o.window > 0 ? o.window : std::max(10.0, 50.0 / std::sqrt(t));
  w1 = o.window_end > 0 ? o.window_end : 2.0 * w0;
  if (!(w1 > w0)) throw Error(ErrorCode::InvalidInput, "window end must exceed its start");
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(Evolution e) {
  switch (e) {
    case Evolution::Schrodinger: return "schrodinger";
    case Evolution::WaveCos: return "wave_cos";
    case Evolution::WaveSin: return "wave_sin";
  }
  return "?";
}

double density(const ReducedOperator& op, double lambda, double xi, double xip, JostOptions opt) {
  if (!(lambda > 0)) throw Error(ErrorCode::NonPositiveArgument, "lambda must be positive");
  opt.extent = std::max({opt.extent, std::abs(xi) + 1.0, std::abs(xip) + 1.0});
  JostPair jp(op, lambda, opt);
  double hi = std::max(xi, xip), lo = std::min(xi, xip);
  return -(2.0 * lambda / kPi) * (jp.plus(hi).f * jp.minus(lo).f / jp.W()).imag();
}

JostOptions CacheOptions::default_jost() {
  JostOptions j;
  j.ode.abs_tol = 1e-12;
  j.ode.rel_tol = 1e-10;
  return j;
}

double smooth_window(double l, double lo, double hi) {
  if (l <= lo) return 1.0;
  if (l >= hi) return 0.0;
  double u = (l - lo) / (hi - lo);
  double a = std::exp(-1.0 / (1.0 - u)), b = std::exp(-1.0 / u);
  return a / (a + b);
}

SpectralCache::SpectralCache(const ReducedOperator& op, std::vector<double> points, CacheOptions opt)
    : op_(&op), xs_(std::move(points)), opt_(opt) {
  if (xs_.empty()) throw Error(ErrorCode::InvalidInput, "no sample points");
  if (!(opt_.lambda_min > 0 && opt_.lambda_min < 1 && opt_.lambda_max > 1))
    throw Error(ErrorCode::InvalidInput, "cache range must straddle lambda = 1");
  for (double a = opt_.lambda_min; a < 1.0; a *= 2.0) {
    Panel P;
    P.a = a;
    P.b = std::min(1.0, 2.0 * a);
    panels_.push_back(std::move(P));
  }
  for (double a = 1.0; a < opt_.lambda_max - 1e-12; a += opt_.panel_width)
  {
    Panel P;
    P.a = a;
    P.b = std::min(opt_.lambda_max, a + opt_.panel_width);
    panels_.push_back(std::move(P));
  }
  const std::size_t np = xs_.size();
  struct Job {
    std::size_t panel, node;
  };
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < panels_.size(); ++p) {
    auto& P = panels_[p];
    P.lam = chebyshev_nodes(opt_.nodes, P.a, P.b);
    const std::size_t n = P.lam.size();
    P.W.resize(n);
    P.am.resize(n);
    P.bm.resize(n);
    P.ap.resize(n);
    P.bp.resize(n);
    P.fp.assign(np, {});
    P.fm.assign(np, {});
    for (std::size_t k = 0; k < np; ++k) {
      bool dir = use_direct(xs_[k], P.b - P.a);
      if (xs_[k] >= 0 || dir) P.fp[k].resize(n);
      if (xs_[k] <= 0 || dir) P.fm[k].resize(n);
    }
    for (std::size_t j = 0; j < n; ++j) jobs.push_back({p, j});
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex fail_mu;
  auto worker = [&] {
    for (;;) {
      std::size_t q = next.fetch_add(1);
      if (q >= jobs.size()) return;
      try {
        auto& P = panels_[jobs[q].panel];
        const std::size_t j = jobs[q].node;
        const double w = P.b - P.a;
        JostOptions jo = opt_.jost;
        double ext = 20.0;
        for (double x : xs_)
          if (use_direct(x, w)) ext = std::max(ext, std::abs(x) + 1.0);
        jo.extent = ext;
        JostPair jp(*op_, P.lam[j], jo);
        P.W[j] = jp.W();
        P.am[j] = jp.alpha_minus();
        P.bm[j] = jp.beta_minus();
        P.ap[j] = jp.alpha_plus();
        P.bp[j] = jp.beta_plus();
        for (std::size_t k = 0; k < np; ++k) {
          if (!P.fp[k].empty()) P.fp[k][j] = jp.plus(xs_[k]).f;
          if (!P.fm[k].empty()) P.fm[k][j] = jp.minus(xs_[k]).f;
        }
      } catch (...) {
        std::lock_guard<std::mutex> g(fail_mu);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  unsigned nt = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < nt; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::size_t SpectralCache::index(double x) const {
  for (std::size_t k = 0; k < xs_.size(); ++k)
    if (xs_[k] == x) return k;
  throw Error(ErrorCode::OutOfGrid, "point not in the cache");
}

bool SpectralCache::direct(std::size_t panel, std::size_t point) const {
  return use_direct(xs_.at(point), panels_.at(panel).b - panels_.at(panel).a);
}

double SpectralCache::density(double lambda, std::size_t i, std::size_t j) const {
  if (lambda < opt_.lambda_min || lambda > opt_.lambda_max)
    throw Error(ErrorCode::OutOfGrid, "lambda outside the cached range");
  auto it = std::find_if(panels_.begin(), panels_.end(), [&](const Panel& P) { return lambda <= P.b; });
  auto terms = panel_terms(*this, *it, i, {{j, 1.0}});
  return density_from_terms(terms, it->lam, bary_weights(opt_.nodes), lambda);
}

KernelValue apply_kernel(const SpectralCache& c, Evolution ev, double t, std::size_t i,
                         const std::vector<std::pair<std::size_t, double>>& src, KernelOptions opt) {
  if (!(t > 0)) throw Error(ErrorCode::NonPositiveArgument, "t must be positive");
  if (i >= c.points().size()) throw Error(ErrorCode::OutOfGrid, "target index");
  for (auto [j, q] : src)
    if (j >= c.points().size()) throw Error(ErrorCode::OutOfGrid, "source index");
  KernelValue out;
  resolve_window(t, opt, out.window, out.window_end);
  if (out.window_end > c.lambda_max() * (1 + 1e-12))
    throw Error(ErrorCode::OutOfGrid, "window reaches beyond the cached lambda range");
  Integrator in{c, ev, t, out.window, out.window_end, bary_weights(c.nodes())};
  out.value = in.run(i, src, opt.level + (opt.estimate_error ? 1 : 0));
  out.pieces = in.pieces;
  if (opt.estimate_error) {
    cd coarse = in.run(i, src, opt.level);
    out.error = std::abs(out.value - coarse);
  }
  if (!std::isfinite(out.value.real()) || !std::isfinite(out.value.imag()))
    throw Error(ErrorCode::QuadratureNotConverged, "non-finite kernel value");
  return out;
}

KernelValue kernel(const SpectralCache& c, Evolution ev, double t, std::size_t i, std::size_t j,
                   KernelOptions opt) {
  return apply_kernel(c, ev, t, i, {{j, 1.0}}, opt);
}

double decay_weight(const ReducedOperator& op, double sigma, double x) {
  return std::pow(1.0 + x * x, -0.5 * (0.5 * op.d + sigma));
}

double sigma_max(const ReducedOperator& op) { return op.nu() - 0.5 * (op.d - 1); }

void check_sigma(const ReducedOperator& op, double sigma, bool allow_beyond) {
  if (sigma < 0 || (!allow_beyond && sigma > sigma_max(op) + 1e-12))
    throw Error(ErrorCode::InvalidSigma, "sigma outside [0, nu - (d-1)/2]");
}

KernelValue schrodinger_kernel(const SpectralCache& c, double t, std::size_t i, std::size_t j,
                               double sigma, KernelOptions opt, bool allow_beyond) {
  check_sigma(c.op(), sigma, allow_beyond);
  auto k = kernel(c, Evolution::Schrodinger, t, i, j, opt);
  double w = decay_weight(c.op(), sigma, c.points()[i]) * decay_weight(c.op(), sigma, c.points()[j]);
  k.value *= w;
  k.error *= w;
  return k;
}

KernelValue wave_kernel(const SpectralCache& c, double t, std::size_t i, std::size_t j, double sigma,
                        Evolution flavor, KernelOptions opt, bool allow_beyond) {
  if (flavor == Evolution::Schrodinger) throw Error(ErrorCode::InvalidInput, "wave flavour expected");
  check_sigma(c.op(), sigma, allow_beyond);
  auto k = kernel(c, flavor, t, i, j, opt);
  double w = decay_weight(c.op(), sigma, c.points()[i]) * decay_weight(c.op(), sigma, c.points()[j]);
  k.value *= w;
  k.error *= w;
  return k;
}

std::vector<double> bump_nodes(double c, double h, int n) {
  const auto& g = gauss_legendre(n);
  std::vector<double> x(n);
  for (int k = 0; k < n; ++k) x[k] = c + h * g.x[k];
  return x;
}

namespace {
double bump(double u) { return std::abs(u) < 1 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0; }
double dbump(double u) {
  return std::abs(u) < 1 ? bump(u) * (-2.0 * u / std::pow(1.0 - u * u, 2)) : 0.0;
}
}  // namespace

TestFunction bump_test_function(const SpectralCache& cache, double c, double h, int n) {
  const auto& g = gauss_legendre(n);
  auto xs = bump_nodes(c, h, n);
  TestFunction tf;
  for (int k = 0; k < n; ++k) {
    tf.idx.push_back(cache.index(xs[k]));
    tf.weight.push_back(h * g.w[k] * bump(g.x[k]));
  }
  tf.norm = h * integrate_adaptive([&](double u) { return std::abs(dbump(u)) / h + bump(u); }, -1.0, 1.0,
                                   1e-13, 1e-12)
                    .value;
  return tf;
}

FunctionalValue weighted_wave_functional(const SpectralCache& c, double t, std::size_t i, double sigma,
                                         const TestFunction& phi, Evolution flavor, KernelOptions opt,
                                         bool allow_beyond) {
  if (flavor == Evolution::Schrodinger) throw Error(ErrorCode::InvalidInput, "wave flavour expected");
  check_sigma(c.op(), sigma, allow_beyond);
  FunctionalValue out;
  bool zero = phi.norm == 0.0 || std::all_of(phi.weight.begin(), phi.weight.end(), [](double w) { return w == 0.0; });
  if (zero) {
    out.degenerate = true;
    return out;
  }
  std::vector<std::pair<std::size_t, double>> src;
  for (std::size_t k = 0; k < phi.idx.size(); ++k)
    src.push_back({phi.idx[k], phi.weight[k] * decay_weight(c.op(), sigma, c.points()[phi.idx[k]])});
  auto k = apply_kernel(c, flavor, t, i, src, opt);
  double w = decay_weight(c.op(), sigma, c.points()[i]) / phi.norm;
  out.value = std::abs(k.value) * w;
  out.error = k.error * w;
  return out;
}

DecayFit fit_decay(Evolution ev, double sigma, const std::vector<double>& times, const std::vector<double>& sups) {
  if (times.size() != sups.size() || times.size() < 8)
    throw Error(ErrorCode::InsufficientSamples, "need at least 8 matching time and value samples");
  if (!(times.front() > 0) || std::log10(times.back() / times.front()) < 1.5 - 1e-12)
    throw Error(ErrorCode::InsufficientSamples, "times must span 1.5 decades");
  DecayFit f;
  f.evolution = ev;
  f.sigma = sigma;
  f.times = times;
  f.sups = sups;
  const double n = static_cast<double>(times.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] > 0 && sups[k] > 0)) throw Error(ErrorCode::BadFit, "log-log fit needs positive data");
    if (k > 0 && !(times[k] > times[k - 1])) throw Error(ErrorCode::BadFit, "times must increase");
    mx += std::log(times[k]) / n;
    my += std::log(sups[k]) / n;
  }
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    double dx = std::log(times[k]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(sups[k]) - my);
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t k = 0; k < times.size(); ++k)
    f.residual = std::max(f.residual, std::abs(std::log(sups[k]) - f.intercept - f.slope * std::log(times[k])));
  return f;
}

std::vector<DecayFit> schrodinger_decay(const SpectralCache& c, const std::vector<double>& times,
                                        const std::vector<std::size_t>& region,
                                        const std::vector<double>& sigmas, KernelOptions opt,
                                        bool allow_beyond) {
  for (double s : sigmas) check_sigma(c.op(), s, allow_beyond);
  const auto& xs = c.points();
  std::vector<std::vector<double>> sup(sigmas.size(), std::vector<double>(times.size(), 0.0));
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> arg(
      sigmas.size(), std::vector<std::pair<std::size_t, std::size_t>>(times.size()));
  for (std::size_t q = 0; q < times.size(); ++q)
    for (std::size_t a = 0; a < region.size(); ++a)
      for (std::size_t b = a; b < region.size(); ++b) {
        std::size_t i = region[a], j = region[b];
        double k = std::abs(kernel(c, Evolution::Schrodinger, times[q], i, j, opt).value);
        for (std::size_t s = 0; s < sigmas.size(); ++s) {
          double v = k * decay_weight(c.op(), sigmas[s], xs[i]) * decay_weight(c.op(), sigmas[s], xs[j]);
          if (v > sup[s][q]) {
            sup[s][q] = v;
            arg[s][q] = {i, j};
          }
        }
      }
  std::vector<DecayFit> out;
  for (std::size_t s = 0; s < sigmas.size(); ++s) {
    auto f = fit_decay(Evolution::Schrodinger, sigmas[s], times, sup[s]);
    for (auto [i, j] : arg[s]) {
      f.argmax_i.push_back(i);
      f.argmax_j.push_back(j);
    }
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<DecayFit> wave_decay(const SpectralCache& c, const std::vector<double>& times,
                                 const std::vector<std::vector<std::size_t>>& region_per_time,
                                 const std::vector<double>& sigmas, const TestFunction& phi,
                                 KernelOptions opt, bool allow_beyond) {
  if (region_per_time.size() != times.size())
    throw Error(ErrorCode::InvalidInput, "one region per time expected");
  std::vector<DecayFit> out;
  for (double s : sigmas) {
    std::vector<double> sup(times.size(), 0.0);
    std::vector<std::size_t> arg(times.size(), 0);
    for (std::size_t q = 0; q < times.size(); ++q)
      for (std::size_t i : region_per_time[q]) {
        auto v = weighted_wave_functional(c, times[q], i, s, phi, Evolution::WaveCos, opt, allow_beyond);
        if (v.value > sup[q]) {
          sup[q] = v.value;
          arg[q] = i;
        }
      }
    auto f = fit_decay(Evolution::WaveCos, s, times, sup);
    f.argmax_i = arg;
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<double> schrodinger_region(double reach, double ratio) {
  std::vector<double> xs;
  for (int k = -10; k <= 10; ++k) xs.push_back(k);
  for (double r = 10.0 * ratio; r <= reach * (1 + 1e-12); r *= ratio) {
    xs.push_back(r);
    xs.push_back(-r);
  }
  std::sort(xs.begin(), xs.end());
  return xs;
}

std::vector<double> wave_front_points(double t, double hw, double step) {
  std::vector<double> xs;
  const int m = static_cast<int>(std::floor(hw / step + 1e-9));
  for (int k = -m; k <= m; ++k) {
    xs.push_back(t + k * step);
    xs.push_back(-(t + k * step));
  }
  std::sort(xs.begin(), xs.end());
  return xs;
}

std::vector<double> log_times(double a, double b, int n) {
  if (!(a > 0 && b > a && n >= 2)) throw Error(ErrorCode::InvalidInput, "log_times needs 0 < a < b, n >= 2");
  std::vector<double> t(n);
  for (int k = 0; k < n; ++k) t[k] = a * std::pow(b / a, static_cast<double>(k) / (n - 1));
  t.back() = b;
  return t;
}

std::vector<DecayFit> run_schrodinger_decay(const ReducedOperator& op, const DecayRunOptions& o) {
  for (double s : o.sigmas) check_sigma(op, s, o.allow_beyond);
  SpectralCache c(op, schrodinger_region(o.reach, o.ratio), o.cache);
  std::vector<std::size_t> all(c.points().size());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  return schrodinger_decay(c, o.times, all, o.sigmas, o.kernel, o.allow_beyond);
}

std::vector<DecayFit> run_wave_decay(const ReducedOperator& op, const DecayRunOptions& o) {
  for (double s : o.sigmas) check_sigma(op, s, o.allow_beyond);
  auto nodes = bump_nodes(o.bump_center, o.bump_half_width, o.bump_nodes);
  std::vector<double> pts = nodes;
  std::vector<std::vector<double>> targets;
  for (double t : o.times) {
    auto f = wave_front_points(t, o.front_half_width, o.front_step);
    f.push_back(o.bump_center);
    pts.insert(pts.end(), f.begin(), f.end());
    targets.push_back(std::move(f));
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  SpectralCache c(op, pts, o.cache);
  auto phi = bump_test_function(c, o.bump_center, o.bump_half_width, o.bump_nodes);
  std::vector<std::vector<std::size_t>> region;
  for (const auto& f : targets) {
    std::vector<std::size_t> r;
    for (double x : f) r.push_back(c.index(x));
    region.push_back(std::move(r));
  }
  return wave_decay(c, o.times, region, o.sigmas, phi, o.kernel, o.allow_beyond);
}

std::string DecayFit::to_csv() const {
  std::ostringstream os;
  os << "t,sup,fit\n";
  for (std::size_t k = 0; k < times.size(); ++k)
    os << num(times[k]) << ',' << num(sups[k]) << ','
       << num(std::exp(intercept + slope * std::log(times[k]))) << '\n';
  return os.str();
}

std::string DecayFit::to_json() const {
  nlohmann::json j;
  j["evolution"] = to_string(evolution);
  j["sigma"] = sigma;
  j["slope"] = slope;
  j["intercept"] = intercept;
  j["residual"] = residual;
  j["times"] = times;
  j["sups"] = sups;
  j["argmax_i"] = argmax_i;
  j["argmax_j"] = argmax_j;
  return j.dump(2);
}

}  // namespace conedisp
