#pragma once
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "conedisp/scattering.hpp"

namespace conedisp {

enum class Evolution { Schrodinger, WaveCos, WaveSin };
std::string to_string(Evolution e);

// Spectral density of H at (xi, xi'): e = -(2 lambda / pi) Im[f+(max) f-(min) / W].
// With this normalisation int_0^inf e dlambda = delta(xi - xi').
double density(const ReducedOperator& op, double lambda, double xi, double xip, JostOptions opt = {});

struct CacheOptions {
  double lambda_min = 1.0 / 65536.0;  // dyadic panels from here up to 1
  double lambda_max = 32.0;
  double panel_width = 2.0;  // above lambda = 1
  int nodes = 20;
  JostOptions jost = default_jost();
  static JostOptions default_jost();
};

// Jost data of one operator at Chebyshev nodes of lambda-panels, sampled at a
// fixed set of points. Immutable after construction.
class SpectralCache {
 public:
  struct Panel {
    double a, b;
    std::vector<double> lam;
    std::vector<cd> W, am, bm, ap, bp;
    // per point: f+ and f- at the nodes (left empty where not needed)
    std::vector<std::vector<cd>> fp, fm;
  };

  SpectralCache(const ReducedOperator& op, std::vector<double> points, CacheOptions opt = {});

  const ReducedOperator& op() const { return *op_; }
  const std::vector<double>& points() const { return xs_; }
  std::size_t index(double x) const;
  const std::vector<Panel>& panels() const { return panels_; }
  double lambda_min() const { return opt_.lambda_min; }
  double lambda_max() const { return opt_.lambda_max; }
  int nodes() const { return opt_.nodes; }
  // true where the raw samples at this point are interpolated directly in lambda
  bool direct(std::size_t panel, std::size_t point) const;

  // interpolated density between cached points i and j
  double density(double lambda, std::size_t i, std::size_t j) const;

 private:
  const ReducedOperator* op_;
  std::vector<double> xs_;
  CacheOptions opt_;
  std::vector<Panel> panels_;
};

// Smooth cutoff: 1 below lo, 0 above hi, C-infinity in between.
double smooth_window(double lambda, double lo, double hi);

struct KernelOptions {
  double window = -1.0;      // taper start; default max(10, 50/sqrt(t))
  double window_end = -1.0;  // taper end; default 2 * window
  bool estimate_error = true;
  int level = 0;  // extra bisections of every quadrature piece
};

struct KernelValue {
  cd value;
  double error = 0.0;  // |value - value at one level coarser|
  double window = 0.0, window_end = 0.0;
  std::size_t pieces = 0;
};

// int_0^inf g(t, lambda) chi(lambda) e(lambda; x_i, x_j) dlambda with g = e^{i t lambda^2},
// cos(t lambda) or sin(t lambda)/lambda.
KernelValue kernel(const SpectralCache& c, Evolution ev, double t, std::size_t i, std::size_t j,
                   KernelOptions opt = {});

// sum_j q_j K(t; x_i, x_j)
KernelValue apply_kernel(const SpectralCache& c, Evolution ev, double t, std::size_t i,
                         const std::vector<std::pair<std::size_t, double>>& sources,
                         KernelOptions opt = {});

// w(x) = <x>^{-d/2 - sigma}
double decay_weight(const ReducedOperator& op, double sigma, double x);
// largest admissible sigma, nu - (d-1)/2
double sigma_max(const ReducedOperator& op);
void check_sigma(const ReducedOperator& op, double sigma, bool allow_beyond);

// w(x_i) K(t; x_i, x_j) w(x_j)
KernelValue schrodinger_kernel(const SpectralCache& c, double t, std::size_t i, std::size_t j,
                               double sigma, KernelOptions opt = {}, bool allow_beyond = false);
KernelValue wave_kernel(const SpectralCache& c, double t, std::size_t i, std::size_t j, double sigma,
                        Evolution flavor = Evolution::WaveCos, KernelOptions opt = {},
                        bool allow_beyond = false);

// Test function sampled on quadrature nodes that are cached points.
struct TestFunction {
  std::vector<std::size_t> idx;  // cached point indices
  std::vector<double> weight;    // quadrature weight * phi
  double norm = 0.0;             // int |phi'| + |phi|
};
// C-infinity bump supported on [c - h, c + h], sampled at n Gauss-Legendre nodes.
std::vector<double> bump_nodes(double c, double h, int n);
TestFunction bump_test_function(const SpectralCache& cache, double c, double h, int n);

struct FunctionalValue {
  double value = 0.0;
  double error = 0.0;
  bool degenerate = false;  // phi = 0
};
// |sum_j q_j w(x_i) w(x_j) K(t; x_i, x_j)| / int(|phi'| + |phi|)
FunctionalValue weighted_wave_functional(const SpectralCache& c, double t, std::size_t i, double sigma,
                                         const TestFunction& phi, Evolution flavor = Evolution::WaveCos,
                                         KernelOptions opt = {}, bool allow_beyond = false);

struct DecayFit {
  Evolution evolution = Evolution::Schrodinger;
  double sigma = 0.0;
  std::vector<double> times, sups;
  std::vector<std::size_t> argmax_i, argmax_j;
  double slope = 0.0, intercept = 0.0, residual = 0.0;
  std::string to_csv() const;
  std::string to_json() const;
};

// log-log fit of sup_t; needs >= 8 increasing times spanning >= 1.5 decades
DecayFit fit_decay(Evolution ev, double sigma, const std::vector<double>& times,
                   const std::vector<double>& sups);

// Weighted sup of |K| over all pairs drawn from `region` (cached point indices),
// one value per time, for each sigma in `sigmas`.
std::vector<DecayFit> schrodinger_decay(const SpectralCache& c, const std::vector<double>& times,
                                        const std::vector<std::size_t>& region,
                                        const std::vector<double>& sigmas, KernelOptions opt = {},
                                        bool allow_beyond = false);

// Weighted wave functional sup over `region` for each time; region may depend on t.
std::vector<DecayFit> wave_decay(const SpectralCache& c, const std::vector<double>& times,
                                 const std::vector<std::vector<std::size_t>>& region_per_time,
                                 const std::vector<double>& sigmas, const TestFunction& phi,
                                 KernelOptions opt = {}, bool allow_beyond = false);

// Point sets used by the decay runs.
std::vector<double> schrodinger_region(double reach, double ratio);
std::vector<double> wave_front_points(double t, double half_width, double step);
// n log-spaced times from a to b inclusive
std::vector<double> log_times(double a, double b, int n);

// Whole decay experiments, cache included.
struct DecayRunOptions {
  std::vector<double> times = log_times(10.0, 1000.0, 8);
  std::vector<double> sigmas = {0.0};
  bool allow_beyond = false;
  double reach = 160.0;  // Schroedinger pairs: integers in [-10, 10] and +-10 ratio^k up to reach
  double ratio = 1.189207115002721;  // 2^{1/4}
  double front_half_width = 5.0, front_step = 0.5;  // wave targets around +-t, plus 0
  double bump_center = 0.0, bump_half_width = 3.0;
  int bump_nodes = 32;
  CacheOptions cache;
  KernelOptions kernel = [] {
    KernelOptions k;
    k.estimate_error = false;
    return k;
  }();
};
std::vector<DecayFit> run_schrodinger_decay(const ReducedOperator& op, const DecayRunOptions& o);
std::vector<DecayFit> run_wave_decay(const ReducedOperator& op, const DecayRunOptions& o);

}  // namespace conedisp
