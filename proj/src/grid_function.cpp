#include "conedisp/grid_function.hpp"

#include <algorithm>

#include "conedisp/errors.hpp"

namespace conedisp {

template <class T>
GridFunction<T>::GridFunction(std::vector<double> x, std::vector<T> y, std::vector<T> dy,
                              int order)
    : x_(std::move(x)), y_(std::move(y)), dy_(std::move(dy)), order_(order) {
  if (x_.size() != y_.size() || (!dy_.empty() && dy_.size() != x_.size()))
    throw Error(ErrorCode::InvalidInput, "grid function size mismatch");
  if (order_ < 4) throw Error(ErrorCode::InvalidInput, "interpolation order must be at least 4");
  for (std::size_t i = 1; i < x_.size(); ++i) {
    if (!(x_[i] > x_[i - 1])) throw Error(ErrorCode::InvalidInput, "abscissae not increasing");
  }
}

template <class T>
T GridFunction<T>::interp(const std::vector<T>& v, double xq) const {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x_.size());
  if (n == 0) throw Error(ErrorCode::OutOfGrid, "empty grid");
  if (xq < x_.front() || xq > x_.back()) throw Error(ErrorCode::OutOfGrid, "query outside grid");
  const std::ptrdiff_t m = std::min<std::ptrdiff_t>(order_ + 1, n);
  std::ptrdiff_t i = std::upper_bound(x_.begin(), x_.end(), xq) - x_.begin();
  std::ptrdiff_t lo = std::clamp<std::ptrdiff_t>(i - m / 2, 0, n - m);
  T acc{};
  for (std::ptrdiff_t j = lo; j < lo + m; ++j) {
    double l = 1.0;
    for (std::ptrdiff_t k = lo; k < lo + m; ++k) {
      if (k != j) l *= (xq - x_[k]) / (x_[j] - x_[k]);
    }
    acc += l * v[j];
  }
  return acc;
}

template <class T>
T GridFunction<T>::operator()(double xq) const {
  return interp(y_, xq);
}

template <class T>
T GridFunction<T>::derivative(double xq) const {
  if (dy_.empty()) throw Error(ErrorCode::InvalidInput, "no derivative samples stored");
  return interp(dy_, xq);
}

template class GridFunction<double>;
template class GridFunction<std::complex<double>>;

}  // namespace conedisp
