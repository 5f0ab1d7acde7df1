#include "mrfb/wiener.hpp"

#include <algorithm>
#include <stdexcept>

namespace mrfb {

namespace {

// r(|k - t|) over the reversed input window, k in [0, q).
Vector correlation_row(const SignalModel& model, int q, int t) {
  const int max_lag = std::max({q - 1, t, t >= 0 ? 0 : -t + q - 1});
  const Vector r = model.acf(max_lag);
  Vector row(q);
  for (int k = 0; k < q; ++k) row(k) = r(std::abs(k - t));
  return row;
}

}  // namespace

Vector WienerProblem::rhs(int phase) const {
  if (phase < 0 || phase >= k.M)
    throw std::out_of_range("output phase outside [0, M)");
  return k.entries * correlation_row(model, k.q(), phase + delay);
}

WienerProblem assemble_normal_equations(const Bank& bank, int P,
                                        const SignalModel& model, int delay) {
  WienerProblem p;
  p.k = build_k(bank, P);
  const int q = p.k.q();
  const Vector r = model.acf(q - 1);
  p.Ruu = Matrix(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) p.Ruu(i, j) = r(std::abs(i - j));
  p.A = p.k.entries * p.Ruu * p.k.entries.transpose();
  p.A = 0.5 * (p.A + p.A.transpose().eval());  // enforce exact symmetry
  p.A_pinv = pseudoinverse(p.A);
  p.model = model;
  p.delay = delay;
  return p;
}

SynthesisSolution solve(const WienerProblem& problem,
                        const std::optional<Matrix>& w) {
  const int M = problem.k.M;
  const Index lp = problem.A.rows();
  if (w && (w->rows() != lp || w->cols() != M))
    throw std::invalid_argument("free parameter must be LP x M");

  SynthesisSolution s;
  s.delay = problem.delay;
  s.rows = Matrix::Zero(M, lp);
  s.nullspace_projector =
      Matrix::Identity(lp, lp) - problem.A_pinv * problem.A;
  s.channel_mse = Vector::Zero(M);
  const double r0 = problem.model.acf(0)(0);
  for (int i = 0; i < M; ++i) {
    const Vector b = problem.rhs(i);
    Vector a = problem.A_pinv * b;
    if (w) a += s.nullspace_projector * w->col(i);
    s.rows.row(i) = a.transpose();
    s.channel_mse(i) = r0 - b.dot(problem.A_pinv * b);
  }
  s.total_mse = s.channel_mse.sum();
  return s;
}

double normal_equation_residual(const WienerProblem& problem,
                                const SynthesisSolution& solution) {
  double worst = 0.0;
  for (int i = 0; i < problem.k.M; ++i) {
    const Vector res =
        problem.A * solution.rows.row(i).transpose() - problem.rhs(i);
    worst = std::max(worst, res.lpNorm<Eigen::Infinity>());
  }
  return worst;
}

std::vector<DelayScanEntry> mse_vs_delay(const Bank& bank, int P,
                                         const SignalModel& model,
                                         const std::vector<int>& delays) {
  const KMatrix k = build_k(bank, P);
  const int q = k.q();
  const Vector r = model.acf(q - 1);
  Matrix ruu(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) ruu(i, j) = r(std::abs(i - j));
  Matrix a = k.entries * ruu * k.entries.transpose();
  a = 0.5 * (a + a.transpose().eval());
  const Matrix b = k.entries.transpose() * pseudoinverse(a) * k.entries;
  const double r0 = model.acf(0)(0);

  std::vector<DelayScanEntry> scan;
  scan.reserve(delays.size());
  for (int d : delays) {
    DelayScanEntry e;
    e.delay = d;
    e.channel_mse = Vector::Zero(k.M);
    for (int i = 0; i < k.M; ++i) {
      const Vector row = correlation_row(model, q, d + i);
      e.channel_mse(i) = r0 - row.dot(b * row);
    }
    e.total_mse = e.channel_mse.sum();
    scan.push_back(std::move(e));
  }
  return scan;
}

int best_delay(const std::vector<DelayScanEntry>& scan) {
  if (scan.empty()) throw std::invalid_argument("empty delay scan");
  const auto it = std::min_element(
      scan.begin(), scan.end(),
      [](const auto& x, const auto& y) { return x.total_mse < y.total_mse; });
  return it->delay;
}

}  // namespace mrfb
