#include "mrfb/runtime.hpp"

#include <cmath>
#include <stdexcept>

namespace mrfb {

Vector reversed_window(const Vector& input, int M, int n, int q) {
  Vector w = Vector::Zero(q);
  for (int c = 0; c < q; ++c) {
    const Index t = static_cast<Index>(M) * n - c;
    if (t >= 0 && t < input.size()) w(c) = input(t);
  }
  return w;
}

Vector stacked_subbands(const PipelineRun& run, int n) {
  Vector v = Vector::Zero(static_cast<Index>(run.L) * run.P);
  for (int j = 0; j < run.L; ++j)
    for (int k = 0; k < run.P; ++k)
      if (n - k >= 0) v(static_cast<Index>(j) * run.P + k) = run.subbands[j](n - k);
  return v;
}

PipelineRun run_pipeline(const Bank& bank, const SynthesisSolution& solution,
                         const Vector& input) {
  if (!bank.uniform())
    throw std::invalid_argument("pipeline needs a uniform bank; block first");
  if (input.size() == 0) throw std::invalid_argument("empty input");
  PipelineRun run;
  run.input = input;
  run.M = bank.factor();
  run.L = static_cast<int>(bank.size());
  run.Q = static_cast<int>(bank.max_length());
  run.delay = solution.delay;
  if (solution.rows.rows() != run.M ||
      solution.rows.cols() % run.L != 0)
    throw std::invalid_argument("solution does not match the bank geometry");
  run.P = static_cast<int>(solution.rows.cols()) / run.L;
  run.transient_blocks =
      (run.P * run.M + run.Q + run.M - 1) / run.M;

  const int blocks =
      static_cast<int>((input.size() + run.M - 1) / run.M);

  // Analysis filtering followed by decimation, causal zero initial state.
  run.subbands.assign(run.L, Vector::Zero(blocks));
  for (int j = 0; j < run.L; ++j) {
    const Vector& h = bank.channels[j].taps;
    for (int n = 0; n < blocks; ++n) {
      double acc = 0.0;
      for (Index k = 0; k < h.size(); ++k) {
        const Index t = static_cast<Index>(run.M) * n - k;
        if (t >= 0 && t < input.size()) acc += h(k) * input(t);
      }
      run.subbands[j](n) = acc;
    }
  }

  // Low-rate MIMO synthesis over the stacked observation vector.
  run.outputs.assign(run.M, Vector::Zero(blocks));
  for (int n = 0; n < blocks; ++n) {
    const Vector vs = stacked_subbands(run, n);
    for (int i = 0; i < run.M; ++i)
      run.outputs[i](n) = solution.rows.row(i).dot(vs);
  }

  // Unblocking: u_hat(Mn + i) = y_{M-1-i}(n).
  run.reconstructed = Vector::Zero(static_cast<Index>(blocks) * run.M);
  for (int n = 0; n < blocks; ++n)
    for (int i = 0; i < run.M; ++i)
      run.reconstructed(static_cast<Index>(n) * run.M + i) =
          run.outputs[run.M - 1 - i](n);

  run.first_valid = run.delay + run.M - 1;
  run.error = Vector::Zero(run.reconstructed.size());
  for (Index n = 0; n < run.reconstructed.size(); ++n) {
    const Index ref = n - run.first_valid;
    if (ref >= 0 && ref < input.size())
      run.error(n) = std::abs(run.reconstructed(n) - input(ref));
  }
  return run;
}

Vector empirical_channel_mse(const PipelineRun& run, bool include_transient) {
  const int blocks = static_cast<int>(run.outputs.front().size());
  const int start = include_transient ? 0 : run.transient_blocks;
  Vector mse = Vector::Zero(run.M);
  for (int i = 0; i < run.M; ++i) {
    double acc = 0.0;
    Index count = 0;
    for (int n = start; n < blocks; ++n) {
      const Index ref = static_cast<Index>(run.M) * n - i - run.delay;
      if (ref < 0 || ref >= run.input.size()) continue;
      const double e = run.input(ref) - run.outputs[i](n);
      acc += e * e;
      ++count;
    }
    if (count == 0)
      throw std::runtime_error("no overlap region: input too short");
    mse(i) = acc / static_cast<double>(count);
  }
  return mse;
}

double empirical_total_mse(const PipelineRun& run, bool include_transient) {
  return empirical_channel_mse(run, include_transient).sum();
}

double max_reconstruction_error(const PipelineRun& run,
                                bool include_transient) {
  const Index start = include_transient
                          ? 0
                          : static_cast<Index>(run.transient_blocks) * run.M;
  double worst = 0.0;
  for (Index n = start; n < run.error.size(); ++n) {
    const Index ref = n - run.first_valid;
    if (ref >= 0 && ref < run.input.size())
      worst = std::max(worst, run.error(n));
  }
  return worst;
}

Matrix block_signal(const Vector& u, int M) {
  if (M < 1) throw std::invalid_argument("block size must be >= 1");
  const Index blocks = (u.size() + M - 1) / M;
  Matrix phases = Matrix::Zero(M, blocks);
  for (Index n = 0; n < u.size(); ++n) phases(n % M, n / M) = u(n);
  return phases;
}

Vector unblock_signal(const Matrix& phases) {
  const Index m = phases.rows();
  Vector u(m * phases.cols());
  for (Index n = 0; n < phases.cols(); ++n)
    for (Index i = 0; i < m; ++i) u(n * m + i) = phases(i, n);
  return u;
}

}  // namespace mrfb
