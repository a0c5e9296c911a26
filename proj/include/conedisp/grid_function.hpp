#pragma once
#include <complex>
#include <vector>

namespace conedisp {

// Samples on a strictly increasing grid with local Lagrange interpolation.
template <class T>
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(std::vector<double> x, std::vector<T> y, std::vector<T> dy = {},
               int order = 5);

  const std::vector<double>& x() const { return x_; }
  const std::vector<T>& y() const { return y_; }
  const std::vector<T>& dy() const { return dy_; }
  bool has_derivative() const { return !dy_.empty(); }
  int order() const { return order_; }
  std::size_t size() const { return x_.size(); }

  // Lagrange interpolation through order+1 neighbouring samples.
  T operator()(double xq) const;
  T derivative(double xq) const;

 private:
  T interp(const std::vector<T>& v, double xq) const;
  std::vector<double> x_;
  std::vector<T> y_, dy_;
  int order_ = 5;
};

extern template class GridFunction<double>;
extern template class GridFunction<std::complex<double>>;

}  // namespace conedisp
