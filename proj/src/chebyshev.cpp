#include "conedisp/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "conedisp/errors.hpp"

namespace conedisp {

std::vector<double> chebyshev_nodes(int n, double a, double b) {
  std::vector<double> x(n);
  for (int k = 0; k < n; ++k) {
    // reversed so the nodes increase
    double t = -std::cos(std::numbers::pi * (k + 0.5) / n);
    x[k] = 0.5 * (a + b) + 0.5 * (b - a) * t;
  }
  return x;
}

template <class T>
ChebSeries<T> ChebSeries<T>::from_values(double a, double b, const std::vector<T>& v) {
  const int n = static_cast<int>(v.size());
  std::vector<T> c(n, T{});
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      // node k sits at -cos(pi (k+1/2)/n); T_j(-y) = (-1)^j T_j(y)
      double ang = std::numbers::pi * j * (k + 0.5) / n;
      double s = (j % 2 == 0) ? 1.0 : -1.0;
      c[j] += v[k] * (s * std::cos(ang));
    }
    c[j] *= (j == 0 ? 1.0 : 2.0) / n;
  }
  return ChebSeries(a, b, std::move(c));
}

template <class T>
T ChebSeries<T>::operator()(double x) const {
  const double y = (2.0 * x - a_ - b_) / (b_ - a_);
  const double y2 = 2.0 * y;
  T b1{}, b2{};
  for (std::size_t k = c_.size(); k-- > 1;) {
    T t = y2 * b1 - b2 + c_[k];
    b2 = b1;
    b1 = t;
  }
  return y * b1 - b2 + c_[0];
}

template <class T>
ChebSeries<T> ChebSeries<T>::derivative() const {
  const std::size_t n = c_.size();
  if (n <= 1) return ChebSeries(a_, b_, {T{}});
  std::vector<T> d(n, T{});
  for (std::size_t k = n - 1; k-- > 0;) {
    d[k] = (k + 2 < n ? d[k + 2] : T{}) + 2.0 * static_cast<double>(k + 1) * c_[k + 1];
  }
  d[0] *= 0.5;
  const double scale = 2.0 / (b_ - a_);
  for (auto& v : d) v *= scale;
  d.pop_back();
  return ChebSeries(a_, b_, std::move(d));
}

template <class T>
ChebSeries<T> ChebSeries<T>::integral() const {
  const std::size_t n = c_.size();
  std::vector<T> q(n + 1, T{});
  auto cc = [&](std::size_t k) { return k < n ? c_[k] : T{}; };
  for (std::size_t k = 1; k <= n; ++k) {
    T prev = (k == 1) ? 2.0 * cc(0) : cc(k - 1);
    q[k] = (prev - cc(k + 1)) / (2.0 * static_cast<double>(k));
  }
  const double scale = 0.5 * (b_ - a_);
  for (auto& v : q) v *= scale;
  ChebSeries out(a_, b_, q);
  // fix the constant so the value at a is zero
  out.c_[0] -= out(a_);
  return out;
}

template <class T>
double ChebSeries<T>::tail_ratio() const {
  double mx = 0.0;
  for (const auto& v : c_) mx = std::max(mx, std::abs(v));
  if (mx == 0.0) return 0.0;
  const std::size_t n = c_.size();
  double t = std::abs(c_[n - 1]);
  if (n >= 2) t = std::max(t, std::abs(c_[n - 2]));
  return t / mx;
}

template class ChebSeries<double>;
template class ChebSeries<std::complex<double>>;

template <class T>
PiecewiseCheb<T>::PiecewiseCheb(std::vector<ChebSeries<T>> panels)
    : panels_(std::move(panels)) {
  breaks_.reserve(panels_.size() + 1);
  for (const auto& p : panels_) breaks_.push_back(p.a());
  if (!panels_.empty()) breaks_.push_back(panels_.back().b());
}

template <class T>
std::size_t PiecewiseCheb<T>::locate(double x) const {
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
  std::ptrdiff_t i = (it - breaks_.begin()) - 1;
  i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(panels_.size()) - 1);
  return static_cast<std::size_t>(i);
}

template <class T>
T PiecewiseCheb<T>::operator()(double x) const {
  return panels_[locate(x)](x);
}

template <class T>
PiecewiseCheb<T> PiecewiseCheb<T>::derivative() const {
  std::vector<ChebSeries<T>> d;
  d.reserve(panels_.size());
  for (const auto& p : panels_) d.push_back(p.derivative());
  return PiecewiseCheb(std::move(d));
}

template class PiecewiseCheb<double>;
template class PiecewiseCheb<std::complex<double>>;

namespace {
ChebSeries<double> fit_panel(const std::function<double(double)>& f, double a, double b,
                             int degree) {
  auto xs = chebyshev_nodes(degree, a, b);
  std::vector<double> v(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) v[i] = f(xs[i]);
  return ChebSeries<double>::from_values(a, b, v);
}
}  // namespace

PiecewiseCheb<double> fit_adaptive(const std::function<double(double)>& f, double a,
                                   double b, int degree, double rel_tol,
                                   double initial_width, double min_width) {
  int n0 = std::max(1, static_cast<int>(std::ceil((b - a) / initial_width)));
  std::vector<std::pair<double, double>> todo;
  for (int i = n0 - 1; i >= 0; --i)
    todo.emplace_back(a + (b - a) * i / n0, a + (b - a) * (i + 1) / n0);

  std::vector<ChebSeries<double>> done;
  // a rough global scale so panels where f is tiny are not refined forever
  double scale = 0.0;
  for (auto [lo, hi] : todo) {
    for (double x : chebyshev_nodes(5, lo, hi)) scale = std::max(scale, std::abs(f(x)));
  }
  if (scale == 0.0) scale = 1.0;

  while (!todo.empty()) {
    auto [lo, hi] = todo.back();
    todo.pop_back();
    auto s = fit_panel(f, lo, hi, degree);
    double tail = 0.0;
    const auto& c = s.coeffs();
    for (std::size_t k = c.size() - 3; k < c.size(); ++k) tail = std::max(tail, std::abs(c[k]));
    for (const auto& v : c) {
      if (!std::isfinite(v)) throw Error(ErrorCode::ConvergenceFailure, "non-finite sample in fit");
    }
    if (tail <= rel_tol * scale || hi - lo <= min_width) {
      done.push_back(std::move(s));
    } else {
      double mid = 0.5 * (lo + hi);
      todo.emplace_back(mid, hi);
      todo.emplace_back(lo, mid);
    }
  }
  return PiecewiseCheb<double>(std::move(done));
}

}  // namespace conedisp
