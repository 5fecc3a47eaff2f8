#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace ab {

// All numerics are dense 64-bit float matrices: scalars are 1x1,
// row vectors 1xd, sample batches n x d (one row per sample).
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

inline bool all_finite(const Mat& m) { return m.allFinite(); }

inline void ensure_finite(const Mat& m, const char* what) {
  if (!m.allFinite()) throw Error(std::string("non-finite values in ") + what);
}

inline Mat scalar_mat(double v) {
  Mat m(1, 1);
  m(0, 0) = v;
  return m;
}

inline std::vector<Index> shape_of(const Mat& m) { return {m.rows(), m.cols()}; }

inline bool same_shape(const Mat& a, const Mat& b) {
  return a.rows() == b.rows() && a.cols() == b.cols();
}

// Row-major raw bytes, the on-disk layout of checkpoints.
void write_row_major(std::vector<double>& out, const Mat& m);
void read_row_major(const double* src, Mat& m);

}  // namespace ab
