#pragma once
#include <array>
#include <complex>
#include <utility>
#include <vector>

#include "conedisp/profile.hpp"

namespace conedisp {

using cd = std::complex<double>;

struct OdeOptions {
  double abs_tol = 1e-14;
  double rel_tol = 1e-12;
  double min_step = 1e-13;
  std::size_t max_steps = 20'000'000;
};

struct Cauchy {
  cd f, fp;  // value and xi-derivative
};

// Solution of -f'' + V f = E f started from Cauchy data at xi_start and carried
// to xi_end with an adaptive 7(8) Runge-Kutta-Fehlberg scheme. Accepted steps are
// kept as checkpoints; values in between come from a short re-integration from
// the nearest checkpoint, so queries inherit the stepping tolerance.
class OdeTrack {
 public:
  OdeTrack() = default;
  OdeTrack(const ReducedOperator* op, double energy, double xi_start, Cauchy data, double xi_end,
           OdeOptions opt = {});

  Cauchy at(double xi) const;
  std::vector<Cauchy> at(const std::vector<double>& xis) const;
  bool covers(double xi) const;
  std::size_t steps() const { return s_.size(); }
  double xi_start() const { return sigma_ * s_.front(); }
  double xi_end() const { return sigma_ * s_.back(); }
  // largest |f| seen along the track
  double max_abs() const { return max_abs_; }
  // xi positions where Re f or Im f changes sign (coarse, checkpoint resolution)
  std::vector<double> sign_changes_real() const;

 private:
  using State = std::array<double, 4>;
  Cauchy advance(std::size_t k, double s) const;
  const ReducedOperator* op_ = nullptr;
  double E_ = 0.0;
  double sigma_ = 1.0;  // xi = sigma * s, integration runs in increasing s
  OdeOptions opt_;
  std::vector<double> s_;
  std::vector<State> y_;
  double max_abs_ = 0.0;
};

}  // namespace conedisp
