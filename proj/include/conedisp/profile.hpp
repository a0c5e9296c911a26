#pragma once
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "conedisp/grid_function.hpp"
#include "conedisp/potential.hpp"

namespace conedisp {

enum class ProfileKind { Hyperboloid, SplicedSphere, Sampled, ClosedForm, Cylinder };

struct ProfileSpec {
  ProfileKind kind = ProfileKind::Hyperboloid;
  double a = 1.0;          // hyperboloid scale / neck radius
  double sphere_radius = 4.0;
  std::vector<double> coeffs;  // r^2 = x^2 + sum_k coeffs[k] <x>^{-k}
  std::vector<double> xs, rs;  // sampled data
  int d = 1;              // dimension of the cross-section
  int n = 1;              // cross-section eigen-index
  double mu = -1.0;       // cross-section frequency; < 0 means sqrt(n(n+d-1))

  static ProfileSpec hyperboloid(double a, int d = 1, int n = 1);
  static ProfileSpec spliced_sphere(double neck, double radius, int d = 1, int n = 1);
  static ProfileSpec closed_form(std::vector<double> c, int d = 1, int n = 1);
  static ProfileSpec sampled(std::vector<double> x, std::vector<double> r, int d = 1, int n = 1);
  static ProfileSpec cylinder(int d = 1, int n = 1);
  // CSV with columns x,r (header optional)
  static ProfileSpec from_csv(const std::string& path, int d = 1, int n = 1);
};

std::string to_string(ProfileKind k);

struct ProfileJet {
  double r, dr, ddr;
};

// Warped radius r(x) with exact first and second derivatives.
class Profile {
 public:
  explicit Profile(ProfileSpec spec);
  ProfileJet operator()(double x) const;
  double r(double x) const { return (*this)(x).r; }
  const ProfileSpec& spec() const { return spec_; }
  double mu() const;
  double nu() const;
  // x-range where the shape deviates from its conical ends
  double feature_scale() const;
  // valid x-range; infinite for analytic kinds
  std::pair<double, double> support() const;

 private:
  ProfileJet sampled_jet(double x) const;
  ProfileSpec spec_;
  double fd_step_ = 0.0;
  std::shared_ptr<const PiecewiseCheb<double>> sampled_fit_;
};

// xi(x) = int_0^x sqrt(1 + r'^2) and its inverse.
class ArclengthMap {
 public:
  explicit ArclengthMap(std::shared_ptr<const Profile> p);
  double xi(double x) const;
  double x_of_xi(double xi) const;
  const Profile& profile() const { return *p_; }
  // r, dr/dxi, d^2r/dxi^2 at arclength xi
  ProfileJet r_of_xi(double xi) const;

 private:
  std::shared_ptr<const Profile> p_;
  std::vector<double> bx_, bxi_;  // panel breaks and cumulative arclength
  double xlo_, xhi_;
};

struct Reparam {
  GridFunction<double> xi_of_x;
  GridFunction<double> r_of_xi;
  double quadrature_error = 0.0;
};

// Tabulates xi(x) on a uniform x-grid of spacing `resolution` and r(xi) on the
// image grid. Throws RangeTooCoarse if 10- and 20-point rules on one cell
// disagree by more than 1e-12.
Reparam arclength_reparam(const Profile& p, std::pair<double, double> x_range, double resolution);

// One-dimensional operator -d^2/dxi^2 + V(xi).
class ReducedOperator {
 public:
  ReducedOperator() = default;
  ReducedOperator(double nu, PotentialTable table, double domain_radius);

  double nu() const { return nu_; }
  double V(double xi) const { return table_.V(xi); }
  double dV(double xi) const { return table_.dV(xi); }
  double U(double xi) const { return table_.U(xi); }
  double tail_constant() const { return table_.tail_constant(); }
  double domain_radius() const { return domain_radius_; }
  bool half_line() const { return table_.half_line(); }
  double lower_end() const { return table_.lower_end(); }
  const PotentialTable& table() const { return table_; }

  int d = 1, n = 1;
  double mu = 0.0;
  std::string label;
  std::shared_ptr<const ArclengthMap> map;  // present when built from a profile
  bool symmetric = false;                   // V(-xi) = V(xi)

 private:
  double nu_ = 0.5;
  double domain_radius_ = 200.0;
  PotentialTable table_;
};

struct ModelOptions {
  double domain_radius = 200.0;
  double core_radius = 20.0;
  double min_xi = -std::numeric_limits<double>::infinity();
  bool symmetric = false;
  std::string label = "model";
};

// Operator from an explicit potential whose tail is (nu^2-1/4) xi^{-2} + O(xi^{-3}).
ReducedOperator make_model_operator(double nu, std::function<double(double)> V,
                                    ModelOptions opt = {});

// Reduced potential rho^2 + rho' + mu^2/r^2 of a profile at mode (d, n).
ReducedOperator reduce(const ProfileSpec& spec);

struct TailReport {
  double slope = 0.0;          // log-log slope of |V - (nu^2-1/4)<xi>^-2|; -inf if it vanishes
  double tail_constant = 0.0;  // nu^2 - 1/4
  double max_residual = 0.0;
  bool ok = false;             // slope <= -2.8
};

TailReport verify_tail(const ReducedOperator& op, double xi_min = 10.0, double xi_max = -1.0);

double mode_mu(int d, int n);
double mode_nu(int d, double mu);

}  // namespace conedisp
