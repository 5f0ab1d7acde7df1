#pragma once

// MSE-optimal FIR matrix synthesis design: normal equations over the
// stacked subband window, the parametric solution family, and analytic
// error evaluation across reconstruction delays.

#include <map>
#include <optional>
#include <vector>

#include "mrfb/bank.hpp"
#include "mrfb/mrmat.hpp"
#include "mrfb/stochastic.hpp"

namespace mrfb {

/// Normal-equation data shared by every output phase: A = K R K^T and the
/// per-phase cross-correlation vectors b_i for a given delay d.
struct WienerProblem {
  KMatrix k;
  Matrix A;        // LP x LP, symmetric PSD
  Matrix A_pinv;
  Matrix Ruu;      // q x q input correlation
  SignalModel model = SignalModel::white();
  int delay = 0;

  /// b_i for output phase i in [0, M).
  Vector rhs(int phase) const;
};

/// One member of the solution family for a fixed delay: synthesis rows
/// a_i = A^+ b_i + (I - A^+ A) w_i and the analytic error it achieves.
struct SynthesisSolution {
  Matrix rows;                 // M x LP, row i reconstructs phase i
  Matrix nullspace_projector;  // I - A^+ A
  Vector channel_mse;          // per output phase, w-invariant
  double total_mse = 0.0;
  int delay = 0;
};

WienerProblem assemble_normal_equations(const Bank& bank, int P,
                                        const SignalModel& model, int delay);

/// Solves for all M output phases. If w is given it must be LP x M
/// (column i perturbs phase i); the achieved MSE does not depend on it.
SynthesisSolution solve(const WienerProblem& problem,
                        const std::optional<Matrix>& w = std::nullopt);

/// Max over phases of |A a_i - b_i|_inf; zero for any family member.
double normal_equation_residual(const WienerProblem& problem,
                                const SynthesisSolution& solution);

/// Analytic MSE per delay without materializing solutions. Uses
/// B = K^T (K R K^T)^+ K once; entry d maps to (per-phase MSEs, total).
struct DelayScanEntry {
  int delay = 0;
  Vector channel_mse;
  double total_mse = 0.0;
};

std::vector<DelayScanEntry> mse_vs_delay(const Bank& bank, int P,
                                         const SignalModel& model,
                                         const std::vector<int>& delays);

/// Delay with the smallest total MSE in a scan.
int best_delay(const std::vector<DelayScanEntry>& scan);

}  // namespace mrfb
