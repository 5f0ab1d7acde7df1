#pragma once

// Dense matrix representations of multirate operations: decimation,
// expansion, convolution (two forms) and reversal, plus the SVD-based
// pseudoinverse used throughout the library.

#include <Eigen/Dense>

namespace mrfb {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// 0/1 matrix selecting every factor-th sample with a time advance:
/// entries(i,j) = 1 iff j = factor*i + advance.
struct DecimationMatrix {
  Index rows = 0;
  Index cols = 0;
  int factor = 1;
  int advance = 0;
  Matrix entries;
};

/// Transpose of the zero-advance decimation matrix; inserts factor-1
/// zeros between samples.
struct ExpansionMatrix {
  Index rows = 0;
  Index cols = 0;
  int factor = 1;
  Matrix entries;
};

enum class ConvForm {
  /// Banded-upper form mapping an input window to an output observation
  /// vector (newest sample last). Size obs_len x (obs_len + Q - 1).
  Observation,
  /// Lower-banded Toeplitz form producing the complete convolution output
  /// of a finite input block. Size (obs_len + Q - 1) x obs_len.
  FullOutput,
};

struct ConvolutionMatrix {
  Vector taps;
  ConvForm form = ConvForm::Observation;
  Index rows = 0;
  Index cols = 0;
  Matrix entries;
};

DecimationMatrix build_decimation_matrix(int factor, int advance, Index out_len,
                                         Index in_len);

ExpansionMatrix build_expansion_matrix(int factor, Index in_len);

ConvolutionMatrix build_convolution_matrix(const Vector& taps, Index obs_len,
                                           ConvForm form);

/// Reverses row and column order: J_M * B * J_N.
Matrix reverse_matrix(const Matrix& b);

/// Moore-Penrose pseudoinverse via SVD. Singular values at or below
/// rcond * sigma_max are treated as zero; rcond < 0 selects the default
/// max(rows, cols) * machine-epsilon.
Matrix pseudoinverse(const Matrix& a, double rcond = -1.0);

/// Rank of a matrix under the same thresholding rule as pseudoinverse().
Index numerical_rank(const Matrix& a, double rcond = -1.0);

}  // namespace mrfb
