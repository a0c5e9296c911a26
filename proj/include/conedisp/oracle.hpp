#pragma once
#include <complex>
#include <vector>

#include "conedisp/profile.hpp"
#include "conedisp/spectral.hpp"

namespace conedisp {

enum class Stencil { Second, Fourth };

// -d^2/dxi^2 + V on [-L, L] with Dirichlet ends, sampled at the N interior nodes x_i = -L + (i+1) h.
struct DiscreteOperator {
  double L = 40.0;
  double h = 0.0;
  int N = 0;
  Stencil stencil = Stencil::Second;
  std::vector<double> x, V;
};

// Throws TooLarge when N > 4000.
DiscreteOperator discretize(const ReducedOperator& op, double L, double h, Stencil s = Stencil::Second);

struct EigenSystem {
  DiscreteOperator dop;
  std::vector<double> E;    // ascending
  std::vector<double> psi;  // mode k at psi[k * N + i], unit l2 norm
  double max_residual = 0.0;  // max_k |H psi_k - E_k psi_k|_2
  bool complete = false;      // all N modes present
  int modes() const { return static_cast<int>(E.size()); }
  double mode(int k, int i) const { return psi[static_cast<std::size_t>(k) * dop.N + i]; }
};

// Dense symmetric eigendecomposition; keeps modes with E <= e_max when e_max is finite.
EigenSystem eigensystem(const DiscreteOperator& dop, double e_max = -1.0);

struct FDKernel {
  std::vector<double> points;
  std::vector<cd> K;  // row-major over points, continuum normalisation (divided by h)
  cd at(std::size_t i, std::size_t j) const { return K[i * points.size() + j]; }
};

// Optional band limit chi(sqrt(E)) with the same smooth taper as the spectral kernels.
struct BandWindow {
  double lo = -1.0, hi = -1.0;  // inactive when hi <= 0
};

// sum_k g(t, E_k) psi_k(x) psi_k(x') / h at grid points; g is e^{itE}, cos(t sqrt E) or sin(t sqrt E)/sqrt E.
FDKernel fd_propagator(const EigenSystem& es, double t, Evolution ev, const std::vector<double>& points,
                       BandWindow band = {});

struct RichardsonKernel {
  FDKernel value;      // (4 K_{h/2} - K_h) / 3 (second order) or (16 K_{h/2} - K_h) / 15
  double change = 0.0;  // max |K_{h/2} - K_h|
  double residual = 0.0;
};
// Eigenvalue cutoff that keeps every mode a band window passes.
double band_energy_cap(BandWindow band);

// Points must lie on both grids.
RichardsonKernel fd_propagator_richardson(const EigenSystem& coarse, const EigenSystem& fine, double t,
                                          Evolution ev, const std::vector<double>& points, BandWindow band = {});
RichardsonKernel fd_propagator_richardson(const ReducedOperator& op, double t, Evolution ev,
                                          const std::vector<double>& points, double h, BandWindow band,
                                          double L = 40.0, Stencil s = Stencil::Second);

struct ShootingResult {
  cd W, alpha_minus, beta_minus;
  double step_change = 0.0;  // |W_h - W_{h/2}| / |W|
};

// RK4 from +-L inwards, started from plane waves with the first-order amplitude correction
// 1 + i c / (2 lambda |xi|) of an inverse-square tail c / xi^2.
ShootingResult shooting_scattering(const ReducedOperator& op, double lambda, double L = 4000.0, double h = 0.02);

}  // namespace conedisp
