#include "shufflelab/linalg.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace shufflelab {

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

Vec sub(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("sub: size mismatch");
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Vec add(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("add: size mismatch");
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vec scale(const Vec& a, double s) {
  Vec out(a);
  for (double& x : out) x *= s;
  return out;
}

Vec matvec(const Mat& m, const Vec& v) {
  if (m.cols() != v.size()) throw std::invalid_argument("matvec: size mismatch");
  Vec out(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) s += m(r, c) * v[c];
    out[r] = s;
  }
  return out;
}

Mat matadd(const Mat& a, const Mat& b) {
  Mat out = a;
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] += b.data()[i];
  return out;
}

Mat matscale(const Mat& a, double s) {
  Mat out = a;
  for (double& x : out.data()) x *= s;
  return out;
}

Mat matsub_from_identity(const Mat& a) {
  Mat out = Mat::identity(a.rows());
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] -= a.data()[i];
  return out;
}

void add_outer(Mat& m, const Vec& v, double s) {
  for (std::size_t r = 0; r < v.size(); ++r)
    for (std::size_t c = 0; c < v.size(); ++c) m(r, c) += s * v[r] * v[c];
}

double max_abs_diff(const Mat& a, const Mat& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  return worst;
}

std::vector<Vec> orthonormal_basis(const std::vector<Vec>& vectors, double rel_tol) {
  std::vector<Vec> basis;
  for (const Vec& v : vectors) {
    const double original = norm2(v);
    if (original == 0.0) continue;
    Vec w = v;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vec& q : basis) {
        const double c = dot(q, w);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * q[i];
      }
    }
    const double residual = norm2(w);
    if (residual > rel_tol * original) basis.push_back(scale(w, 1.0 / residual));
  }
  return basis;
}

Mat projector_onto(const std::vector<Vec>& basis, std::size_t dim) {
  Mat p(dim, dim);
  for (const Vec& q : basis) add_outer(p, q, 1.0);
  return p;
}

}  // namespace shufflelab
