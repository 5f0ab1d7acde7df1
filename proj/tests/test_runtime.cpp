#include <random>

#include "doctest.h"
#include "mrfb/pr.hpp"
#include "mrfb/runtime.hpp"

using namespace mrfb;

namespace {

Vector random_signal(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Vector u(n);
  for (Index i = 0; i < n; ++i) u(i) = g(rng);
  return u;
}

}  // namespace

TEST_CASE("blocking and unblocking round trip for factors one to eight") {
  for (int m = 1; m <= 8; ++m) {
    const Vector u = random_signal(m * 13, 100 + m);
    const Vector back = unblock_signal(block_signal(u, m));
    CHECK((back - u).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("identity system reproduces the input exactly") {
  Bank bank;
  bank.channels.push_back({Vector::Ones(1), 1});
  SynthesisSolution sol;
  sol.rows = Matrix::Ones(1, 1);
  sol.delay = 0;
  const Vector u = random_signal(64, 5);
  const auto run = run_pipeline(bank, sol, u);
  CHECK((run.reconstructed - u).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(max_reconstruction_error(run, true) == 0.0);
}

TEST_CASE("stacked subbands equal K times the reversed input window") {
  // The weld between the runtime, the bank algebra, and the design: at
  // every block the observation vector must be exactly K u_bar(Mn).
  std::mt19937_64 rng(61);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 6; ++trial) {
    Bank bank;
    const int M = 1 + static_cast<int>(rng() % 4);
    const int L = 1 + static_cast<int>(rng() % 4);
    const int P = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < L; ++i) {
      Vector taps(2 + rng() % 6);
      for (Index n = 0; n < taps.size(); ++n) taps(n) = g(rng);
      bank.channels.push_back({taps, M});
    }
    const KMatrix k = build_k(bank, P);
    SynthesisSolution sol;
    sol.rows = Matrix::Zero(M, k.entries.rows());
    const Vector u = random_signal(40 * M, 1000 + trial);
    const auto run = run_pipeline(bank, sol, u);
    const int blocks = static_cast<int>(run.subbands[0].size());
    for (int n = 0; n < blocks; ++n) {
      const Vector vs = stacked_subbands(run, n);
      const Vector ref = k.entries * reversed_window(u, M, n, k.q());
      CHECK((vs - ref).lpNorm<Eigen::Infinity>() < 1e-12);
    }
  }
}

TEST_CASE("the pipeline is linear in its input") {
  Bank bank = modulated_bank(elt_prototype(), 4);
  const KMatrix k = build_k(bank, 4);
  const auto sol = pr_solution(k, 12);
  const Vector u1 = random_signal(200, 7);
  const Vector u2 = random_signal(200, 8);
  const double alpha = 2.75;
  const auto ra = run_pipeline(bank, sol, u1);
  const auto rb = run_pipeline(bank, sol, u2);
  const auto rc = run_pipeline(bank, sol, (alpha * u1 + u2).eval());
  const Vector combo = alpha * ra.reconstructed + rb.reconstructed;
  const double scale = combo.lpNorm<Eigen::Infinity>();
  CHECK((rc.reconstructed - combo).lpNorm<Eigen::Infinity>() <=
        1e-12 * scale);
}

TEST_CASE("a PR run reconstructs with machine-level error statistics") {
  Bank bank = modulated_bank(elt_prototype(), 4);
  const KMatrix k = build_k(bank, 4);
  const auto sol = pr_solution(k, 12);
  const Vector u = random_signal(2000, 9);
  const auto run = run_pipeline(bank, sol, u);
  CHECK(max_reconstruction_error(run) < 1e-10);
  const Vector mse = empirical_channel_mse(run);
  for (int i = 0; i < 4; ++i) CHECK(mse(i) < 1e-18);
  CHECK(empirical_total_mse(run) < 1e-17);
}

TEST_CASE("empirical channel error matches the analytic design value") {
  Bank bank;
  bank.channels.push_back({design_lowpass(0.6, 9), 2});
  bank.channels.push_back({design_highpass(0.4, 11), 2});
  const SignalModel model = SignalModel::ar({0.7, 0.1});
  const int delay = 5;
  const auto prob = assemble_normal_equations(bank, 4, model, delay);
  const auto sol = solve(prob);
  const auto raw = model.simulate(400000, 13);
  const Vector u =
      Eigen::Map<const Vector>(raw.data(), static_cast<Index>(raw.size()));
  const auto run = run_pipeline(bank, sol, u);
  const Vector emp = empirical_channel_mse(run);
  for (int i = 0; i < 2; ++i)
    CHECK(emp(i) == doctest::Approx(sol.channel_mse(i)).epsilon(0.05));
}

TEST_CASE("transient exclusion drops the startup blocks only") {
  Bank bank = modulated_bank(elt_prototype(), 4);
  const KMatrix k = build_k(bank, 4);
  const auto sol = pr_solution(k, 12);
  const Vector u = random_signal(400, 3);
  const auto run = run_pipeline(bank, sol, u);
  CHECK(run.transient_blocks == (4 * 4 + 16 + 3) / 4);
  // A PR run with a causal zero initial state is exact from the first
  // sample, so including the transient changes nothing.
  CHECK(max_reconstruction_error(run, true) < 1e-10);
}

TEST_CASE("dimension mismatches are rejected") {
  Bank bank = modulated_bank(elt_prototype(), 4);
  SynthesisSolution sol;
  sol.rows = Matrix::Zero(3, 16);  // wrong phase count for M = 4
  CHECK_THROWS_AS(run_pipeline(bank, sol, Vector::Ones(64)),
                  std::invalid_argument);
  Bank nufb;
  nufb.channels = {{Vector::Ones(2), 2}, {Vector::Ones(2), 3}};
  CHECK_THROWS_AS(run_pipeline(nufb, sol, Vector::Ones(64)),
                  std::invalid_argument);
}
