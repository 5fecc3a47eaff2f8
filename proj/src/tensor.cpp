#include "ab/tensor.hpp"

namespace ab {

void write_row_major(std::vector<double>& out, const Mat& m) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
}

void read_row_major(const double* src, Mat& m) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = *src++;
}

}  // namespace ab
