#include "conedisp/ode_track.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>

#include "conedisp/errors.hpp"

namespace conedisp {

namespace odeint = boost::numeric::odeint;

namespace {
using State = std::array<double, 4>;

struct Rhs {
  const ReducedOperator* op;
  double E, sigma;
  void operator()(const State& x, State& dx, double s) const {
    const double q = op->V(sigma * s) - E;
    dx[0] = x[2];
    dx[1] = x[3];
    dx[2] = q * x[0];
    dx[3] = q * x[1];
  }
};

using Stepper = odeint::runge_kutta_fehlberg78<State>;
using Controlled = odeint::controlled_runge_kutta<Stepper>;

Controlled make_stepper(const OdeOptions& o) {
  return Controlled(Controlled::error_checker_type(o.abs_tol, o.rel_tol));
}
}  // namespace

OdeTrack::OdeTrack(const ReducedOperator* op, double energy, double xi_start, Cauchy data,
                   double xi_end, OdeOptions opt)
    : op_(op), E_(energy), sigma_(xi_end >= xi_start ? 1.0 : -1.0), opt_(opt) {
  double s = sigma_ * xi_start;
  const double s1 = sigma_ * xi_end;
  cd dyds = sigma_ * data.fp;
  State x = {data.f.real(), data.f.imag(), dyds.real(), dyds.imag()};
  s_.push_back(s);
  y_.push_back(x);
  max_abs_ = std::abs(data.f);
  Rhs rhs{op_, E_, sigma_};
  auto st = make_stepper(opt_);
  // start with a step resolving both the local wavelength and the potential scale
  double k = std::sqrt(std::abs(op_->V(xi_start) - E_)) + 1e-3;
  double dt = std::min(0.05 / k, std::max(1e-3, 0.01 * std::abs(xi_start)));
  while (s < s1) {
    // error control alone can stride over a compact well from far away
    dt = std::min(dt, 0.1 * (1.0 + std::abs(s)));
    if (s + dt > s1) dt = s1 - s;
    if (s_.size() > opt_.max_steps)
      throw Error(ErrorCode::StepSizeUnderflow, "step budget exhausted");
    auto res = st.try_step(rhs, x, s, dt);
    if (res == odeint::fail) {
      if (dt < opt_.min_step * std::max(1.0, std::abs(s)))
        throw Error(ErrorCode::StepSizeUnderflow, "adaptive step fell below the floor");
      continue;
    }
    double a = std::hypot(x[0], x[1]);
    if (!std::isfinite(a) || a > 1e250) throw Error(ErrorCode::BlowupDetected, "solution overflow");
    max_abs_ = std::max(max_abs_, a);
    s_.push_back(s);
    y_.push_back(x);
  }
}

bool OdeTrack::covers(double xi) const {
  double s = sigma_ * xi;
  return s >= s_.front() - 1e-12 * std::max(1.0, std::abs(s)) &&
         s <= s_.back() + 1e-12 * std::max(1.0, std::abs(s));
}

Cauchy OdeTrack::advance(std::size_t k, double s) const {
  State x = y_[k];
  double t = s_[k];
  if (s > t) {
    Rhs rhs{op_, E_, sigma_};
    auto st = make_stepper(opt_);
    double dt = (k + 1 < s_.size()) ? s_[k + 1] - s_[k] : s - t;
    while (t < s) {
      if (t + dt > s) dt = s - t;
      if (st.try_step(rhs, x, t, dt) == odeint::fail) {
        if (dt < opt_.min_step * std::max(1.0, std::abs(t)))
          throw Error(ErrorCode::StepSizeUnderflow, "hop step underflow");
      }
    }
  }
  return {cd(x[0], x[1]), sigma_ * cd(x[2], x[3])};
}

Cauchy OdeTrack::at(double xi) const {
  if (!covers(xi)) throw Error(ErrorCode::OutOfGrid, "point outside the integrated track");
  double s = std::clamp(sigma_ * xi, s_.front(), s_.back());
  std::size_t k = std::upper_bound(s_.begin(), s_.end(), s) - s_.begin();
  k = k == 0 ? 0 : k - 1;
  return advance(k, s);
}

std::vector<Cauchy> OdeTrack::at(const std::vector<double>& xis) const {
  std::vector<Cauchy> out;
  out.reserve(xis.size());
  for (double x : xis) out.push_back(at(x));
  return out;
}

std::vector<double> OdeTrack::sign_changes_real() const {
  std::vector<double> z;
  for (std::size_t k = 1; k < y_.size(); ++k)
    if ((y_[k][0] > 0) != (y_[k - 1][0] > 0)) z.push_back(sigma_ * 0.5 * (s_[k] + s_[k - 1]));
  return z;
}

}  // namespace conedisp
