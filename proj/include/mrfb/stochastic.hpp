#pragma once

// Second-order statistics of the wide-sense stationary input: analytic
// autocorrelation sequences and the structured correlation matrices and
// rows consumed by the synthesis designer.

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "mrfb/mrmat.hpp"

namespace mrfb {

class SignalModel {
 public:
  enum class Kind { Ar, Empirical, Explicit };

  /// AR process u(n) = sum_k coeffs[k] u(n-1-k) + e(n), var(e) = noise_variance.
  /// Throws if the recursion is unstable. An empty coefficient list is white
  /// noise. When normalize is set the ACF is rescaled so r(0) = 1.
  static SignalModel ar(std::vector<double> coeffs, double noise_variance = 1.0,
                        bool normalize = true);

  static SignalModel white(double variance = 1.0);

  /// Biased sample autocorrelation of a recorded signal.
  static SignalModel empirical(std::vector<double> samples,
                               bool normalize = false);

  /// Directly supplied r(0..K); symmetric extension is implied.
  static SignalModel explicit_acf(std::vector<double> acf,
                                  bool normalize = false);

  Kind kind() const { return kind_; }
  bool normalized() const { return normalize_; }
  const std::vector<double>& ar_coeffs() const { return coeffs_; }

  /// r(0..max_lag). Explicit models throw past their stored length.
  Vector acf(int max_lag) const;

  /// Draws n samples of the model (AR kinds only), after a stationarity
  /// burn-in. Deterministic for a fixed seed.
  std::vector<double> simulate(std::size_t n, std::uint64_t seed) const;

 private:
  SignalModel() = default;

  Kind kind_ = Kind::Explicit;
  bool normalize_ = false;
  std::vector<double> coeffs_;
  double noise_variance_ = 1.0;
  double max_root_ = 0.0;
  std::vector<double> stored_acf_;  // Empirical / Explicit
};

/// R_uu and the family of r_uu rows for a given problem geometry.
/// Ruu is the q x q symmetric Toeplitz matrix over the reversed blocked
/// input window, q = M(P-1)+Q; ruu_rows[t](k) = r(k - t).
struct CorrelationBundle {
  Matrix Ruu;
  std::map<int, Vector> ruu_rows;
};

CorrelationBundle correlation_bundle(const SignalModel& model, int M, int P,
                                     int Q, const std::set<int>& delays);

}  // namespace mrfb
