#pragma once
#include <functional>
#include <limits>

#include "conedisp/chebyshev.hpp"

namespace conedisp {

// Tabulated potential on the whole line (or a half line). The core interval
// holds V directly; beyond it the table stores T(s) = xi^3 (V - c xi^{-2}) as a
// function of s = 1/|xi|, so the inverse-square part is exact at any distance.
class PotentialTable {
 public:
  struct Options {
    double core_radius = 20.0;
    // finite value => half-line table on [min_xi, inf)
    double min_xi = -std::numeric_limits<double>::infinity();
    int degree = 24;
    double rel_tol = 1e-15;
    double panel_width = 1.0;
  };

  PotentialTable() = default;
  PotentialTable(const std::function<double(double)>& V, double tail_constant, Options opt);

  double V(double xi) const {
    if (xi > core_) {
      const double s = 1.0 / xi;
      return s * s * (c_ + s * right_(s));
    }
    if (xi < -core_ && has_left_) {
      const double s = -1.0 / xi;
      return s * s * (c_ + s * left_(s));
    }
    return core_fit_(xi);
  }
  double dV(double xi) const;
  // V minus the pure inverse-square part c xi^{-2}
  double U(double xi) const;

  double tail_constant() const { return c_; }
  double core_radius() const { return core_; }
  double lower_end() const { return lower_; }
  bool half_line() const { return !has_left_; }
  // largest relative deviation from the source seen at off-node check points
  double fit_error() const { return fit_error_; }
  std::size_t panel_count() const;

 private:
  double c_ = 0.0, core_ = 0.0, lower_ = 0.0;
  bool has_left_ = true;
  PiecewiseCheb<double> core_fit_, right_, left_;
  PiecewiseCheb<double> core_d_, right_d_, left_d_;
  double fit_error_ = 0.0;
};

}  // namespace conedisp
