#include "mrfb/mrmat.hpp"

#include <Eigen/SVD>
#include <limits>
#include <stdexcept>

namespace mrfb {

DecimationMatrix build_decimation_matrix(int factor, int advance, Index out_len,
                                         Index in_len) {
  if (factor < 1) throw std::invalid_argument("decimation factor must be >= 1");
  if (advance < 0) throw std::invalid_argument("time advance must be >= 0");
  if (out_len < 1 || in_len < 1)
    throw std::invalid_argument("decimation matrix dimensions must be >= 1");
  // Every selected column index must exist; all-zero rows are not allowed.
  if (static_cast<Index>(factor) * (out_len - 1) + advance > in_len - 1)
    throw std::invalid_argument(
        "decimation matrix: factor*(out_len-1)+advance exceeds input range");

  DecimationMatrix d;
  d.rows = out_len;
  d.cols = in_len;
  d.factor = factor;
  d.advance = advance;
  d.entries = Matrix::Zero(out_len, in_len);
  for (Index i = 0; i < out_len; ++i)
    d.entries(i, static_cast<Index>(factor) * i + advance) = 1.0;
  return d;
}

ExpansionMatrix build_expansion_matrix(int factor, Index in_len) {
  if (factor < 1) throw std::invalid_argument("expansion factor must be >= 1");
  if (in_len < 1) throw std::invalid_argument("expansion input length must be >= 1");
  const Index out_len = static_cast<Index>(factor) * (in_len - 1) + 1;
  ExpansionMatrix u;
  u.rows = out_len;
  u.cols = in_len;
  u.factor = factor;
  u.entries =
      build_decimation_matrix(factor, 0, in_len, out_len).entries.transpose();
  return u;
}

ConvolutionMatrix build_convolution_matrix(const Vector& taps, Index obs_len,
                                           ConvForm form) {
  if (taps.size() == 0) throw std::invalid_argument("convolution taps are empty");
  if (obs_len < 1) throw std::invalid_argument("observation length must be >= 1");
  const Index q = taps.size();
  ConvolutionMatrix h;
  h.taps = taps;
  h.form = form;
  if (form == ConvForm::Observation) {
    // Row i applies the reversed taps to the window ending at sample i.
    h.rows = obs_len;
    h.cols = obs_len + q - 1;
    h.entries = Matrix::Zero(h.rows, h.cols);
    for (Index i = 0; i < h.rows; ++i)
      for (Index k = 0; k < q; ++k) h.entries(i, i + k) = taps(q - 1 - k);
  } else {
    // Complete output of a length-obs_len block, zero outside the block.
    h.rows = obs_len + q - 1;
    h.cols = obs_len;
    h.entries = Matrix::Zero(h.rows, h.cols);
    for (Index j = 0; j < h.cols; ++j)
      for (Index k = 0; k < q; ++k) h.entries(j + k, j) = taps(k);
  }
  return h;
}

Matrix reverse_matrix(const Matrix& b) {
  return b.rowwise().reverse().colwise().reverse();
}

namespace {

double svd_threshold(const Eigen::BDCSVD<Matrix>& svd, Index rows, Index cols,
                     double rcond) {
  const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  if (rcond < 0)
    rcond = static_cast<double>(std::max(rows, cols)) *
            std::numeric_limits<double>::epsilon();
  return rcond * smax;
}

}  // namespace

Matrix pseudoinverse(const Matrix& a, double rcond) {
  if (a.size() == 0) throw std::invalid_argument("pseudoinverse of empty matrix");
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success)
    throw std::runtime_error("SVD failed to converge");
  const double thresh = svd_threshold(svd, a.rows(), a.cols(), rcond);
  Vector inv_sv = svd.singularValues();
  for (Index i = 0; i < inv_sv.size(); ++i)
    inv_sv(i) = inv_sv(i) > thresh ? 1.0 / inv_sv(i) : 0.0;
  return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
}

Index numerical_rank(const Matrix& a, double rcond) {
  Eigen::BDCSVD<Matrix> svd(a);
  const double thresh = svd_threshold(svd, a.rows(), a.cols(), rcond);
  Index rank = 0;
  for (Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > thresh) ++rank;
  return rank;
}

}  // namespace mrfb
