#pragma once

#include <cstddef>
#include <vector>

namespace shufflelab {

// Minimal dense linear algebra for alphabet-sized problems (dimensions <= ~16).
using Vec = std::vector<double>;

class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);
Vec sub(const Vec& a, const Vec& b);
Vec add(const Vec& a, const Vec& b);
Vec scale(const Vec& a, double s);
Vec matvec(const Mat& m, const Vec& v);
Mat matadd(const Mat& a, const Mat& b);
Mat matscale(const Mat& a, double s);
Mat matsub_from_identity(const Mat& a);
// rank-1 update: m += s * v v^T
void add_outer(Mat& m, const Vec& v, double s);
double max_abs_diff(const Mat& a, const Mat& b);

// Modified Gram-Schmidt with one re-orthogonalization pass.  Vectors whose
// residual norm falls below `rel_tol` times their original norm are treated
// as dependent and skipped.  Returns an orthonormal basis of the span.
std::vector<Vec> orthonormal_basis(const std::vector<Vec>& vectors, double rel_tol = 1e-10);

// Orthogonal projector onto span(basis): sum of q q^T.
Mat projector_onto(const std::vector<Vec>& basis, std::size_t dim);

}  // namespace shufflelab
