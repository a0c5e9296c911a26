#pragma once
#include <complex>
#include <functional>
#include <vector>

namespace conedisp {

// First-kind Chebyshev nodes mapped to [a,b], in increasing order.
std::vector<double> chebyshev_nodes(int n, double a = -1.0, double b = 1.0);

template <class T>
class ChebSeries {
 public:
  ChebSeries() = default;
  ChebSeries(double a, double b, std::vector<T> coeffs)
      : a_(a), b_(b), c_(std::move(coeffs)) {}

  // values sampled at chebyshev_nodes(n, a, b)
  static ChebSeries from_values(double a, double b, const std::vector<T>& values);

  T operator()(double x) const;
  ChebSeries derivative() const;
  // antiderivative vanishing at a
  ChebSeries integral() const;

  double a() const { return a_; }
  double b() const { return b_; }
  const std::vector<T>& coeffs() const { return c_; }
  // size of the last two coefficients relative to the largest one
  double tail_ratio() const;

 private:
  double a_ = -1.0, b_ = 1.0;
  std::vector<T> c_;
};

extern template class ChebSeries<double>;
extern template class ChebSeries<std::complex<double>>;

// Piecewise Chebyshev representation on a set of adjacent panels.
template <class T>
class PiecewiseCheb {
 public:
  PiecewiseCheb() = default;
  explicit PiecewiseCheb(std::vector<ChebSeries<T>> panels);

  T operator()(double x) const;
  PiecewiseCheb derivative() const;
  double lo() const { return panels_.front().a(); }
  double hi() const { return panels_.back().b(); }
  bool empty() const { return panels_.empty(); }
  const std::vector<ChebSeries<T>>& panels() const { return panels_; }
  std::size_t locate(double x) const;

 private:
  std::vector<ChebSeries<T>> panels_;
  std::vector<double> breaks_;
};

extern template class PiecewiseCheb<double>;
extern template class PiecewiseCheb<std::complex<double>>;

// Adaptive bisection until each panel's trailing coefficients fall below
// rel_tol times the global scale, or the panel reaches min_width.
PiecewiseCheb<double> fit_adaptive(const std::function<double(double)>& f, double a,
                                   double b, int degree, double rel_tol,
                                   double initial_width, double min_width);

}  // namespace conedisp
