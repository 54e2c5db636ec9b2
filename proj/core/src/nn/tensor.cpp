#include "ppmarl/nn/tensor.hpp"

#include <cmath>
#include <string>

namespace ppmarl {

bool all_finite(std::span<const double> xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void require_finite(std::span<const double> xs, const char* what) {
  if (!all_finite(xs)) {
    throw TrainingError(std::string("non-finite values in ") + what);
  }
}

Vec matvec(const Mat& w, const Vec& x) {
  if (x.size() != w.cols) throw ConfigError("matvec: dimension mismatch");
  Vec y(w.rows, 0.0);
  for (std::size_t r = 0; r < w.rows; ++r) {
    const double* row = &w.data[r * w.cols];
    double acc = 0.0;
    for (std::size_t c = 0; c < w.cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
  return y;
}

Vec matvec_transpose(const Mat& w, const Vec& x) {
  if (x.size() != w.rows) throw ConfigError("matvec_transpose: dimension mismatch");
  Vec y(w.cols, 0.0);
  for (std::size_t r = 0; r < w.rows; ++r) {
    const double xr = x[r];
    const double* row = &w.data[r * w.cols];
    for (std::size_t c = 0; c < w.cols; ++c) y[c] += row[c] * xr;
  }
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace ppmarl
