#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ppmarl/common.hpp"

namespace ppmarl {

using Vec = std::vector<double>;

// Dense row-major matrix.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::size_t size() const { return data.size(); }
};

bool all_finite(std::span<const double> xs);
// Throws TrainingError naming `what` if any entry is NaN/Inf.
void require_finite(std::span<const double> xs, const char* what);

// y = W x  (x.size() must equal w.cols)
Vec matvec(const Mat& w, const Vec& x);
// y = W^T x  (x.size() must equal w.rows)
Vec matvec_transpose(const Mat& w, const Vec& x);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace ppmarl
