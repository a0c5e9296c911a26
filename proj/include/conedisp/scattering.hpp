#pragma once
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "conedisp/ode_track.hpp"

namespace conedisp {

// Wronskian f g' - f' g.
inline cd wronskian(const Cauchy& f, const Cauchy& g) { return f.f * g.fp - f.fp * g.f; }
inline Cauchy conj(const Cauchy& c) { return {std::conj(c.f), std::conj(c.fp)}; }

struct FarField {
  Cauchy data;             // value and outward derivative d/deta at eta = R
  double born_size = 0.0;  // size of the first correction relative to the base solution
};

// Outgoing Jost data at eta = R > 0 on one side (side = +1: xi = eta, side = -1:
// xi = -eta). The base is the exact inverse-square solution; the remainder of the
// potential enters through one Born step computed from the tail table.
FarField jost_far_field(const ReducedOperator& op, int side, double lambda, double R,
                        int order = 40);
// Subordinate zero-energy data, base xi^{1/2-nu}.
FarField zero_energy_far_field(const ReducedOperator& op, int side, double R);

struct JostOptions {
  double anchor_min = 40.0;
  double anchor_scale = 100.0;  // anchor >= anchor_scale / lambda
  double anchor_sqrt = 250.0;   // anchor >= anchor_sqrt / sqrt(lambda)
  double extent = -1.0;         // track half-length; default = anchor
  double max_born = 0.1;
  OdeOptions ode;
};

// Jost solutions f+ ~ e^{i lambda xi} at +inf and f- ~ e^{-i lambda xi} at -inf.
// The referenced operator must outlive this object. Negative lambda gives
// f(xi, -lambda) = conj f(xi, lambda).
class JostPair {
 public:
  JostPair(const ReducedOperator& op, double lambda, JostOptions opt = {});

  double lambda() const { return lambda_; }
  double anchor() const { return R_; }
  double born_size() const { return born_; }
  bool has_minus() const { return !op_->half_line(); }

  Cauchy plus(double xi) const;
  Cauchy minus(double xi) const;

  // W(f-, f+) averaged over interior points and its spread.
  cd W() const { return fix(W_); }
  double W_spread() const { return W_spread_; }
  double W_scale() const { return W_scale_; }
  // f- = alpha_minus f+ + beta_minus conj(f+); f+ = alpha_plus f- + beta_plus conj(f-)
  cd alpha_minus() const { return fix(am_); }
  cd beta_minus() const { return fix(bm_); }
  cd alpha_plus() const { return fix(ap_); }
  cd beta_plus() const { return fix(bp_); }
  std::size_t steps() const { return tp_.steps() + tm_.steps(); }

 private:
  cd fix(cd z) const { return neg_ ? std::conj(z) : z; }
  Cauchy fix(Cauchy c) const { return neg_ ? conj(c) : c; }
  Cauchy plus_pos(double xi) const;
  Cauchy minus_pos(double xi) const;
  const ReducedOperator* op_;
  double lambda_, R_, born_ = 0.0;
  bool neg_ = false;
  OdeTrack tp_, tm_;
  cd W_{}, am_{}, bm_{}, ap_{}, bp_{};
  double W_spread_ = 0.0, W_scale_ = 0.0;
};

struct WronskianResult {
  cd W;
  double spread = 0.0;  // max deviation over sample points, relative to W_scale
  double scale = 0.0;
  double anchor = 0.0;
  double born_size = 0.0;
};
WronskianResult compute_wronskian(const ReducedOperator& op, double lambda, JostOptions opt = {});

struct ZeroEnergyOptions {
  double xi0 = 5.0;
  double far = 1e5;      // where the subordinate data are imposed
  double extent = 60.0;  // how far each solution is carried past the origin
  OdeOptions ode;
};

// u1+ (u1-) subordinate at +inf (-inf), normalised to |xi|^{1/2-nu};
// u0+ = 2 nu u1+ int_{xi0}^{xi} u1+^{-2}, so W(u0+, u1+) = -2 nu; u0- mirrors it.
class ZeroEnergyBasis {
 public:
  ZeroEnergyBasis(const ReducedOperator& op, ZeroEnergyOptions opt = {});

  Cauchy u1_plus(double xi) const { return u1p_.at(xi); }
  Cauchy u1_minus(double xi) const { return u1m_.at(xi); }
  Cauchy u0_plus(double xi) const;
  Cauchy u0_minus(double xi) const;
  // side view in eta = side * xi with eta-derivatives
  Cauchy u0_side(int side, double eta) const;
  Cauchy u1_side(int side, double eta) const;

  double xi0() const { return xi0_; }
  double far() const { return far_; }
  double nu() const { return nu_; }
  bool two_sided() const { return two_sided_; }
  // W(u1+, u1-) at xi = 0 and over a few interior points
  double W11() const { return W11_; }
  double W11_spread() const { return W11_spread_; }
  // |(u1+, u1+')(0)| |(u1-, u1-')(0)|; W11 / scale is the sine of their angle
  double W11_scale() const { return W11_scale_; }
  double W11_normalised() const { return W11_ / W11_scale_; }
  double far_born() const { return born_; }
  const ReducedOperator& op() const { return *op_; }

  // samples on a grid for export
  GridFunction<double> grid(const std::string& which, const std::vector<double>& xs) const;

 private:
  const ReducedOperator* op_;
  double nu_, xi0_, far_, born_ = 0.0;
  bool two_sided_;
  OdeTrack u1p_, u1m_, u0p_fwd_, u0p_bwd_, u0m_fwd_, u0m_bwd_;
  double W11_ = 0.0, W11_spread_ = 0.0, W11_scale_ = 1.0;
};

// Default nonresonance margin: |W11| > 0.01 scale.
bool is_resonant(const ZeroEnergyBasis& zb, double tol = 1e-8);

struct ResonanceScan {
  std::vector<double> c, w11;  // normalised W11 samples
  std::vector<double> roots;   // bisected to |dc| <= tol
};
ResonanceScan resonance_scan(const std::function<ReducedOperator(double)>& family, double c_lo,
                             double c_hi, int samples, double tol = 1e-6,
                             ZeroEnergyOptions opt = {});

// Low-energy solutions on [xi0, c/lambda] by Volterra iteration around the
// zero-energy basis; W(u1(.,lambda), u0(.,lambda)) = 1.
class PerturbedBasis {
 public:
  PerturbedBasis(const ZeroEnergyBasis& zb, int side, double lambda, double c = 1.0);
  double lambda() const { return lambda_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  // u1 is available on [u1_lo, hi]
  double u1_lo() const { return u1_lo_; }
  int iterations() const { return iters_; }
  // values in eta = side * xi with eta-derivatives
  Cauchy u0(double eta) const;
  Cauchy u1(double eta) const;
  // max |(u0(lambda)'' - (V - lambda^2) u0(lambda))| / max|u0(lambda)| at check points
  double residual() const { return residual_; }
  // fitted C in |u0(lambda)/u0 - 1| <= C lambda^2 eta^2
  double correction_constant() const { return corr_c_; }

 private:
  double lambda_, lo_, hi_, u1_lo_ = 0.0;
  int iters_ = 0;
  double residual_ = 0.0, corr_c_ = 0.0;
  PiecewiseCheb<double> u0_, du0_, u1_, du1_;
};

struct ConnectionCoefficients {
  cd a, b;              // f = a u0(.,lambda) + b u1(.,lambda)
  double spread_a = 0.0, spread_b = 0.0;
  double xi_star = 0.0;
};
// side +1 uses f+, side -1 uses f-.
ConnectionCoefficients connection_coefficients(const JostPair& jp, const ZeroEnergyBasis& zb,
                                               int side, double c = 1.0);

struct PowerLawFit {
  double exponent = 0.0;
  double residual = 0.0;  // rms of the log fit
  cd constant;            // W / (i e^{i nu pi} lambda^{1-2nu}) at the smallest lambda
  std::vector<double> lambda;
  std::vector<cd> W;
};
PowerLawFit powerlaw_fit(const ReducedOperator& op, const std::vector<double>& lambdas,
                         JostOptions opt = {});

struct ReflectionTransmission {
  cd alpha, beta;
  double flux_residual = 0.0;  // |beta|^2 - |alpha|^2 - 1
};
ReflectionTransmission reflection_transmission(const ReducedOperator& op, double lambda,
                                               JostOptions opt = {});

// Agmon distance across the barrier (nu^2 <xi>^{-2} - lambda^2)_+.
double agmon_distance(double nu, double lambda);

struct ScatteringRow {
  double lambda;
  cd W, alpha_minus, beta_minus;
  std::optional<cd> a_plus, b_plus, a_minus, b_minus;
  double W_spread = 0.0;
};

struct ScatteringData {
  std::string label;
  double nu = 0.0;
  double W11 = 0.0, W11_normalised = 0.0;
  std::vector<ScatteringRow> rows;
  std::string to_csv() const;
  std::string to_json() const;
};
ScatteringData compute_scattering(const ReducedOperator& op, const std::vector<double>& lambdas,
                                  JostOptions opt = {});

}  // namespace conedisp
