#include "conedisp/potential.hpp"

#include <algorithm>
#include <cmath>

#include "conedisp/errors.hpp"

namespace conedisp {

namespace {
PiecewiseCheb<double> fit_tail(const std::function<double(double)>& T, double s_top, int degree,
                               double tol) {
  // geometric panels towards s = 0, each refined adaptively
  std::vector<ChebSeries<double>> all;
  const double cuts[] = {0.0, s_top / 256, s_top / 64, s_top / 16, s_top / 4, s_top};
  for (int i = 0; i < 5; ++i) {
    double a = cuts[i], b = cuts[i + 1];
    auto p = fit_adaptive(T, a, b, degree, tol, b - a, (b - a) / 64);
    for (const auto& q : p.panels()) all.push_back(q);
  }
  return PiecewiseCheb<double>(std::move(all));
}
}  // namespace

PotentialTable::PotentialTable(const std::function<double(double)>& V, double tail_constant,
                               Options opt)
    : c_(tail_constant), core_(opt.core_radius) {
  has_left_ = !std::isfinite(opt.min_xi);
  lower_ = has_left_ ? -std::numeric_limits<double>::infinity() : opt.min_xi;
  if (!has_left_ && !(opt.min_xi > 0.0 && opt.min_xi < core_))
    throw Error(ErrorCode::InvalidInput, "half-line table needs 0 < min_xi < core radius");
  const double a = has_left_ ? -core_ : opt.min_xi;
  core_fit_ = fit_adaptive(V, a, core_, opt.degree, opt.rel_tol, opt.panel_width,
                           opt.panel_width / 256);
  auto Tr = [&](double s) {
    double xi = 1.0 / s;
    return xi * xi * xi * (V(xi) - c_ * s * s);
  };
  right_ = fit_tail(Tr, 1.0 / core_, opt.degree, opt.rel_tol);
  if (has_left_) {
    auto Tl = [&](double s) {
      double xi = -1.0 / s;
      return -xi * xi * xi * (V(xi) - c_ * s * s);
    };
    left_ = fit_tail(Tl, 1.0 / core_, opt.degree, opt.rel_tol);
  }
  core_d_ = core_fit_.derivative();
  right_d_ = right_.derivative();
  if (has_left_) left_d_ = left_.derivative();

  // spot check between nodes
  double err = 0.0;
  auto probe = [&](double xi) {
    double v = V(xi), t = this->V(xi);
    double scale = std::max(std::abs(v), c_ != 0.0 ? std::abs(c_) / (xi * xi) : 1e-300);
    err = std::max(err, std::abs(v - t) / std::max(scale, 1e-300));
  };
  for (double xi = a + 0.0137; xi < core_; xi += 0.0731) probe(xi);
  for (double xi = core_ * 1.013; xi < 1e6; xi *= 1.37) {
    probe(xi);
    if (has_left_) probe(-xi);
  }
  fit_error_ = err;
}

double PotentialTable::dV(double xi) const {
  auto tail = [&](double s, const PiecewiseCheb<double>& T, const PiecewiseCheb<double>& dT) {
    // d/dxi [c s^2 + s^3 T(s)] with ds/dxi = -s^2 on the right
    return -s * s * (2.0 * c_ * s + 3.0 * s * s * T(s) + s * s * s * dT(s));
  };
  if (xi > core_) return tail(1.0 / xi, right_, right_d_);
  if (xi < -core_ && has_left_) return -tail(-1.0 / xi, left_, left_d_);
  return core_d_(xi);
}

double PotentialTable::U(double xi) const {
  if (xi > core_) {
    const double s = 1.0 / xi;
    return s * s * s * right_(s);
  }
  if (xi < -core_ && has_left_) {
    const double s = -1.0 / xi;
    return s * s * s * left_(s);
  }
  return core_fit_(xi) - c_ / (xi * xi);
}

std::size_t PotentialTable::panel_count() const {
  return core_fit_.panels().size() + right_.panels().size() +
         (has_left_ ? left_.panels().size() : 0);
}

}  // namespace conedisp
