#pragma once

// Time-domain simulation of the analysis / decimate / MIMO-synthesis /
// unblock pipeline, plus empirical error measurement against the analytic
// design values.

#include <vector>

#include "mrfb/bank.hpp"
#include "mrfb/wiener.hpp"

namespace mrfb {

struct PipelineRun {
  Vector input;
  std::vector<Vector> subbands;   // v_i(n), one per channel, block rate
  std::vector<Vector> outputs;    // y_i(n), one per output phase
  Vector reconstructed;           // full rate, length M * blocks
  Vector error;                   // |u_hat(n) - u(n - d - M + 1)|, aligned
  int first_valid = 0;            // first n where the reference exists
  int M = 1;
  int P = 1;
  int Q = 1;
  int L = 1;
  int delay = 0;
  int transient_blocks = 0;       // startup region flagged for exclusion
};

/// Reversed input window the design operates on: w(c) = u(Mn - c) for
/// c in [0, q), zero before time 0.
Vector reversed_window(const Vector& input, int M, int n, int q);

/// Stacked subband observation at block n: entry jP + k is v_j(n - k).
Vector stacked_subbands(const PipelineRun& run, int n);

/// Runs the whole pipeline causally (u(n) = 0 for n < 0). The bank must
/// be uniform; block a non-uniform bank first.
PipelineRun run_pipeline(const Bank& bank, const SynthesisSolution& solution,
                         const Vector& input);

/// Time-averaged squared subband error per output phase, measured against
/// the delayed input u(Mn - i - d). Transient blocks are skipped unless
/// include_transient is set.
Vector empirical_channel_mse(const PipelineRun& run,
                             bool include_transient = false);

double empirical_total_mse(const PipelineRun& run,
                           bool include_transient = false);

/// Largest |u_hat(n) - u(n - d - M + 1)| outside the transient.
double max_reconstruction_error(const PipelineRun& run,
                                bool include_transient = false);

/// Blocks a full-rate signal into M phases (row i = phase i) and back;
/// unblock(block(u)) = u exactly.
Matrix block_signal(const Vector& u, int M);
Vector unblock_signal(const Matrix& phases);

}  // namespace mrfb
