// Command-line front end: synthesis design, PR certification, delay scans,
// pipeline simulation, and the three bundled experiment harnesses.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mrfb/bank.hpp"
#include "mrfb/pr.hpp"
#include "mrfb/runtime.hpp"
#include "mrfb/stochastic.hpp"
#include "mrfb/wiener.hpp"

namespace {

using namespace mrfb;
namespace fs = std::filesystem;

double to_db(double x) { return 10.0 * std::log10(x); }

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

SignalModel parse_model(const std::string& spec) {
  if (spec == "white") return SignalModel::white();
  if (spec.rfind("white:", 0) == 0)
    return SignalModel::white(std::stod(spec.substr(6)));
  if (spec.rfind("ar:", 0) == 0) {
    std::vector<double> coeffs;
    std::stringstream ss(spec.substr(3));
    std::string cell;
    while (std::getline(ss, cell, ',')) coeffs.push_back(std::stod(cell));
    return SignalModel::ar(coeffs);
  }
  throw CLI::ValidationError("--model",
                             "expected white[:var] or ar:c1,c2,...");
}

std::vector<int> parse_delays(const std::string& spec) {
  std::vector<int> out;
  const auto dots = spec.find("..");
  if (dots != std::string::npos) {
    const int a = std::stoi(spec.substr(0, dots));
    const int b = std::stoi(spec.substr(dots + 2));
    for (int d = a; d <= b; ++d) out.push_back(d);
    return out;
  }
  std::stringstream ss(spec);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stoi(cell));
  return out;
}

Bank load_and_block(const std::string& path) {
  Bank bank = load_bank_json(path);
  if (!bank.uniform()) bank = nufb_to_ufb(bank);
  return bank;
}

std::optional<Matrix> make_w(const std::string& mode, Index rows, Index cols,
                             std::uint64_t seed) {
  if (mode == "zero" || mode.empty()) return std::nullopt;
  if (mode == "random") {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Matrix w(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) w(i, j) = gauss(rng);
    return w;
  }
  if (mode.rfind("file:", 0) == 0) {
    std::ifstream in(mode.substr(5));
    if (!in) throw CLI::ValidationError("--w", "cannot open file");
    Matrix w(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j)
        if (!(in >> w(i, j)))
          throw CLI::ValidationError("--w", "file too short for LP x M");
    return w;
  }
  throw CLI::ValidationError("--w", "expected zero, random, or file:<path>");
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name);
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  return out;
}

// Experiment 1 pieces: two-channel M=2 bank over an AR(2) input.
Bank experiment1_bank(int hp_length) {
  Bank bank;
  bank.channels.push_back({design_lowpass(0.6, 9), 2});
  bank.channels.push_back({design_highpass(0.4, hp_length), 2});
  return bank;
}

// Experiment 3: the bundled non-uniform four-channel bank.
Bank experiment3_bank() {
  auto vec = [](std::initializer_list<double> v) {
    Vector x(static_cast<Index>(v.size()));
    Index i = 0;
    for (double t : v) x(i++) = t;
    return x;
  };
  Bank bank;
  bank.channels.push_back(
      {vec({-0.1295, -0.12, 0.3695, 0.5018, 0.3695, -0.12, -0.1295}), 2});
  bank.channels.push_back(
      {vec({0.1308, 0.1728, -0.3775, 0.2117, 0.2117, -0.3775, 0.1728,
            0.1308}),
       3});
  bank.channels.push_back(
      {vec({0.0717, 0.0749, -0.1148, 0.1659, -0.2069, 0.2224, -0.2069,
            0.1659, -0.1148, 0.0749, 0.0717}),
       6});
  bank.channels.push_back(
      {vec({0.0881, 0.1617, -0.1686, -0.1538, 0.1752, 0.1752, -0.1538,
            -0.1686, 0.1617, 0.0881}),
       6});
  return bank;
}

Vector chirp_noise_input(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Vector u(static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    u(static_cast<Index>(i)) =
        gauss(rng) * std::sin(0.1 * static_cast<double>(i) *
                              static_cast<double>(i));
  return u;
}

int cmd_design(const std::string& bank_path, const std::string& model_spec,
               int P, int delay, const std::string& w_mode, double tol,
               std::uint64_t seed, const fs::path& out_dir) {
  (void)tol;
  const Bank bank = load_and_block(bank_path);
  const SignalModel model = parse_model(model_spec);
  const WienerProblem prob = assemble_normal_equations(bank, P, model, delay);
  const Index lp = prob.A.rows();
  const auto w = make_w(w_mode, lp, prob.k.M, seed);
  const SynthesisSolution sol = solve(prob, w);
  const Index rank = numerical_rank(prob.A);

  auto taps = open_out(out_dir, "synthesis_taps.csv");
  taps << "phase,channel";
  for (int k = 0; k < P; ++k) taps << ",c" << k;
  taps << "\n";
  for (int i = 0; i < prob.k.M; ++i)
    for (int j = 0; j < prob.k.L; ++j) {
      taps << i << "," << j;
      for (int k = 0; k < P; ++k)
        taps << "," << fmt(sol.rows(i, static_cast<Index>(j) * P + k));
      taps << "\n";
    }

  auto rep = open_out(out_dir, "mse_report.csv");
  rep << "phase,mse_linear,mse_db,formula\n";
  for (int i = 0; i < prob.k.M; ++i)
    rep << i << "," << fmt(sol.channel_mse(i)) << ","
        << fmt(to_db(sol.channel_mse(i))) << ",analytic\n";
  rep << "total," << fmt(sol.total_mse) << "," << fmt(to_db(sol.total_mse))
      << ",analytic\n";

  auto meta = open_out(out_dir, "design_meta.txt");
  meta << "bank: " << bank_path << "\nmodel: " << model_spec
       << "\nP: " << P << "\ndelay: " << delay << "\nw: "
       << (w_mode.empty() ? "zero" : w_mode) << "\nseed: " << seed
       << "\nrank(A): " << rank << "\nnullspace dim: " << lp - rank << "\n";

  std::cout << "total MSE " << fmt(to_db(sol.total_mse)) << " dB; rank(A) "
            << rank << ", nullspace dim " << lp - rank << "\n";
  return 0;
}

int cmd_check_pr(const std::string& bank_path, int P, int delay, double tol,
                 const std::string& out_dir) {
  const Bank bank = load_and_block(bank_path);
  const KMatrix k = build_k(bank, P);
  PRCertificate cert = pr_feasibility(k, tol);
  if (delay >= 0 && cert.feasible && delay_admissible(cert, delay)) {
    const SynthesisSolution sol = pr_solution(k, delay, 1.0, std::nullopt, tol);
    const PolyphaseProduct pp = polyphase_product(k, sol);
    const auto res = check_pseudocirculant(pp.selectors, tol);
    cert.selectors = pp.selectors;
    cert.c = res.c;
    cert.checked_delay = delay;
    cert.pseudocirculant_pass = res.pass;
  }
  const std::string report = format_certificate(cert);
  std::cout << report;
  if (!out_dir.empty()) {
    auto out = open_out(out_dir, "pr_certificate.txt");
    out << report;
    auto mach = open_out(out_dir, "pr_certificate.csv");
    mach << "field,value\nfeasible," << (cert.feasible ? 1 : 0) << "\np,"
         << cert.p << "\nr," << cert.r << "\nq," << cert.q
         << "\nzero_block_residual," << fmt(cert.zero_block_residual) << "\n";
    for (const auto& [lo, hi] : cert.delay_ranges)
      mach << "delay_range," << lo << ".." << hi << "\n";
  }
  return cert.feasible ? 0 : 1;
}

int cmd_mse_scan(const std::string& bank_path, const std::string& model_spec,
                 int P, const std::string& delays_spec,
                 const std::string& out_dir) {
  const Bank bank = load_and_block(bank_path);
  const SignalModel model = parse_model(model_spec);
  const std::vector<int> delays = parse_delays(delays_spec);
  const auto scan = mse_vs_delay(bank, P, model, delays);

  std::ostringstream csv;
  csv << "delay";
  const int m = static_cast<int>(scan.front().channel_mse.size());
  for (int i = 0; i < m; ++i) csv << ",J" << i << "_db";
  csv << ",total_db,total_linear,formula\n";
  for (const auto& e : scan) {
    csv << e.delay;
    for (int i = 0; i < m; ++i) csv << "," << fmt(to_db(e.channel_mse(i)));
    csv << "," << fmt(to_db(e.total_mse)) << "," << fmt(e.total_mse)
        << ",analytic\n";
  }
  std::cout << csv.str();
  std::cout << "best delay: " << best_delay(scan) << "\n";
  if (!out_dir.empty()) open_out(out_dir, "mse_scan.csv") << csv.str();
  return 0;
}

int cmd_simulate(const std::string& bank_path, const std::string& model_spec,
                 int P, int delay, std::size_t samples, std::uint64_t seed,
                 bool include_transient, const std::string& out_dir) {
  const Bank bank = load_and_block(bank_path);
  const SignalModel model = parse_model(model_spec);
  const WienerProblem prob = assemble_normal_equations(bank, P, model, delay);
  const SynthesisSolution sol = solve(prob);
  const auto raw = model.simulate(samples, seed);
  const Vector input =
      Eigen::Map<const Vector>(raw.data(), static_cast<Index>(raw.size()));
  const PipelineRun run = run_pipeline(bank, sol, input);
  const Vector emp = empirical_channel_mse(run, include_transient);

  std::cout << "seed: " << seed << "\n";
  for (int i = 0; i < prob.k.M; ++i)
    std::cout << "phase " << i << ": analytic " << fmt(to_db(sol.channel_mse(i)))
              << " dB, empirical " << fmt(to_db(emp(i))) << " dB\n";
  std::cout << "total: analytic " << fmt(to_db(sol.total_mse))
            << " dB, empirical " << fmt(to_db(emp.sum())) << " dB\n";

  if (!out_dir.empty()) {
    auto series = open_out(out_dir, "simulate_series.csv");
    series << "# seed " << seed << ", delay " << delay << "\n";
    series << "n,u_hat,error\n";
    for (Index n = 0; n < run.reconstructed.size(); ++n)
      series << n << "," << fmt(run.reconstructed(n)) << ","
             << fmt(run.error(n)) << "\n";
    auto rep = open_out(out_dir, "simulate_mse.csv");
    rep << "phase,analytic_db,empirical_db,formula\n";
    for (int i = 0; i < prob.k.M; ++i)
      rep << i << "," << fmt(to_db(sol.channel_mse(i))) << ","
          << fmt(to_db(emp(i))) << ",analytic+empirical\n";
  }
  return 0;
}

int cmd_reproduce1(int P, int hp_length, std::uint64_t seed,
                   const fs::path& out_dir) {
  const Bank bank = experiment1_bank(hp_length);
  const SignalModel model = SignalModel::ar({0.7, 0.1});
  const std::vector<int> delays = {0, 5, 9, 10, 11, 15, 20};
  const auto scan = mse_vs_delay(bank, P, model, delays);

  std::ostringstream table;
  table << "delay,J0_db,J1_db,total_db,formula\n";
  for (const auto& e : scan)
    table << e.delay << "," << fmt(to_db(e.channel_mse(0))) << ","
          << fmt(to_db(e.channel_mse(1))) << "," << fmt(to_db(e.total_mse))
          << ",analytic\n";
  std::cout << table.str();
  const int best = best_delay(scan);
  std::cout << "best delay: " << best << "\n";

  // Ensemble squared error over time at the best delay, 200 runs.
  const int runs = 200;
  const std::size_t n_samples = 4000;
  const WienerProblem prob = assemble_normal_equations(bank, P, model, best);
  const SynthesisSolution sol = solve(prob);
  std::vector<Vector> acc;
  for (int r = 0; r < runs; ++r) {
    const auto raw = model.simulate(n_samples, seed + r);
    const Vector input =
        Eigen::Map<const Vector>(raw.data(), static_cast<Index>(raw.size()));
    const PipelineRun run = run_pipeline(bank, sol, input);
    if (acc.empty()) acc.assign(prob.k.M, Vector::Zero(run.outputs[0].size()));
    for (int i = 0; i < prob.k.M; ++i) {
      for (Index n = 0; n < run.outputs[i].size(); ++n) {
        const Index ref = static_cast<Index>(prob.k.M) * n - i - best;
        if (ref < 0 || ref >= input.size()) continue;
        const double e = input(ref) - run.outputs[i](n);
        acc[i](n) += e * e / runs;
      }
    }
  }

  auto out = open_out(out_dir, "experiment1_table.csv");
  out << "# seed " << seed << ", P " << P << ", hp_length " << hp_length
      << ", model ar:0.7,0.1\n"
      << table.str();
  auto ens = open_out(out_dir, "experiment1_ensemble.csv");
  ens << "# seed " << seed << ", runs " << runs << ", delay " << best << "\n";
  ens << "n,e0_sq,e1_sq\n";
  for (Index n = 0; n < acc[0].size(); ++n)
    ens << n << "," << fmt(acc[0](n)) << "," << fmt(acc[1](n)) << "\n";
  return 0;
}

int cmd_reproduce2(const fs::path& out_dir) {
  const Bank full = modulated_bank(elt_prototype(), 4);
  const SignalModel model = SignalModel::ar({0.95});
  const int P = 4;

  // Table rows: every non-empty channel subset at d=10, then the full
  // bank across d in {10..13}. Prototype taps are the built-in design.
  std::vector<std::vector<int>> subsets;
  for (int mask = 1; mask < 16; ++mask) {
    std::vector<int> s;
    for (int i = 0; i < 4; ++i)
      if (mask & (1 << i)) s.push_back(i);
    subsets.push_back(std::move(s));
  }
  std::sort(subsets.begin(), subsets.end(),
            [](const auto& a, const auto& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a < b;
            });

  std::ostringstream table;
  table << "L,channels,d,J0_db,J1_db,J2_db,J3_db,total_db,formula\n";
  auto emit = [&](const std::vector<int>& subset, int d) {
    Bank sub;
    for (int i : subset) sub.channels.push_back(full.channels[i]);
    const auto scan = mse_vs_delay(sub, P, model, {d});
    table << subset.size() << ",";
    for (std::size_t i = 0; i < subset.size(); ++i)
      table << (i ? " " : "") << "h" << subset[i];
    table << "," << d;
    for (int i = 0; i < 4; ++i)
      table << "," << fmt(to_db(scan[0].channel_mse(i)));
    table << "," << fmt(to_db(scan[0].total_mse)) << ",analytic\n";
  };
  for (const auto& s : subsets)
    if (s.size() < 4) emit(s, 10);
  for (int d : {10, 11, 12, 13}) emit({0, 1, 2, 3}, d);
  std::cout << table.str();

  const KMatrix k = build_k(full, P);
  const PRCertificate cert = pr_feasibility(k);
  std::cout << format_certificate(cert);
  std::ostringstream pr;
  pr << "d,pr_solution,formula\n";
  for (int d : {10, 11, 12, 13}) {
    bool ok = true;
    try {
      pr_solution(k, d);
    } catch (const std::exception&) {
      ok = false;
    }
    pr << d << "," << (ok ? "pass" : "rejected") << ",certificate\n";
  }
  std::cout << pr.str();

  auto out = open_out(out_dir, "experiment2_table.csv");
  out << "# derived prototype (built-in), model ar:0.95, P " << P << "\n"
      << table.str();
  auto prf = open_out(out_dir, "experiment2_pr.csv");
  prf << "# derived prototype (built-in)\n" << pr.str();
  open_out(out_dir, "experiment2_certificate.txt") << format_certificate(cert);
  return 0;
}

int cmd_reproduce3(std::uint64_t seed, const fs::path& out_dir) {
  const Bank blocked = nufb_to_ufb(experiment3_bank());
  const int P = 7;
  const KMatrix k = build_k(blocked, P);
  const PRCertificate cert = pr_feasibility(k);
  std::cout << format_certificate(cert);
  const SynthesisSolution sol = pr_solution(k, 0);
  const Vector input = chirp_noise_input(10000, seed);
  const PipelineRun run = run_pipeline(blocked, sol, input);
  const double worst = max_reconstruction_error(run);
  std::cout << "seed: " << seed << "\nmax |error| after transient: "
            << fmt(worst) << "\n";

  auto series = open_out(out_dir, "experiment3_error.csv");
  series << "# seed " << seed << ", P " << P << ", d 0\n";
  series << "n,u_hat,error\n";
  for (Index n = 0; n < run.reconstructed.size(); ++n)
    series << n << "," << fmt(run.reconstructed(n)) << ","
           << fmt(run.error(n)) << "\n";
  return worst <= 1e-9 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MSE-optimal synthesis design for non-maximally decimated "
               "filter banks"};
  app.require_subcommand(1);

  std::string bank_path, model_spec = "white", delays_spec, w_mode = "zero";
  std::string out_dir;
  int P = 4, delay = 0, check_delay = -1, hp_length = 11;
  double tol = 1e-8;
  std::uint64_t seed = 1;
  std::size_t samples = 100000;
  bool include_transient = false;
  int experiment = 0;

  auto* design = app.add_subcommand("design", "solve the synthesis design");
  design->add_option("--bank", bank_path, "bank config JSON")->required();
  design->add_option("--model", model_spec, "white[:var] or ar:c1,c2,...");
  design->add_option("--length", P, "synthesis filter length P");
  design->add_option("--delay", delay, "reconstruction delay d");
  design->add_option("--w", w_mode, "zero | random | file:<path>");
  design->add_option("--tol", tol, "pseudoinverse tolerance");
  design->add_option("--seed", seed, "RNG seed");
  design->add_option("--out", out_dir, "output directory")->required();

  auto* checkpr = app.add_subcommand("check-pr", "certify PR feasibility");
  checkpr->add_option("--bank", bank_path, "bank config JSON")->required();
  checkpr->add_option("--length", P, "synthesis filter length P");
  checkpr->add_option("--delay", check_delay, "also verify this delay");
  checkpr->add_option("--tol", tol, "zero-block tolerance");
  checkpr->add_option("--out", out_dir, "output directory");

  auto* scan = app.add_subcommand("mse-scan", "analytic MSE across delays");
  scan->add_option("--bank", bank_path, "bank config JSON")->required();
  scan->add_option("--model", model_spec, "signal model");
  scan->add_option("--length", P, "synthesis filter length P");
  scan->add_option("--delays", delays_spec, "a..b or comma list")->required();
  scan->add_option("--out", out_dir, "output directory");

  auto* sim = app.add_subcommand("simulate", "run the full pipeline");
  sim->add_option("--bank", bank_path, "bank config JSON")->required();
  sim->add_option("--model", model_spec, "signal model");
  sim->add_option("--length", P, "synthesis filter length P");
  sim->add_option("--delay", delay, "reconstruction delay d");
  sim->add_option("--samples", samples, "input length");
  sim->add_option("--seed", seed, "RNG seed");
  sim->add_flag("--include-transient", include_transient,
                "keep startup blocks in the statistics");
  sim->add_option("--out", out_dir, "output directory");

  auto* rep = app.add_subcommand("reproduce", "run a bundled experiment");
  rep->add_option("experiment", experiment, "1, 2 or 3")->required();
  rep->add_option("--length", P, "override synthesis length (experiment 1)");
  rep->add_option("--hp-length", hp_length,
                  "highpass length for experiment 1 (odd)");
  rep->add_option("--seed", seed, "RNG seed");
  rep->add_option("--out", out_dir, "output directory")->required();

  bool p_given = false;
  CLI11_PARSE(app, argc, argv);
  p_given = rep->count("--length") > 0;

  try {
    if (*design)
      return cmd_design(bank_path, model_spec, P, delay, w_mode, tol, seed,
                        out_dir);
    if (*checkpr) return cmd_check_pr(bank_path, P, check_delay, tol, out_dir);
    if (*scan) return cmd_mse_scan(bank_path, model_spec, P, delays_spec,
                                   out_dir);
    if (*sim) return cmd_simulate(bank_path, model_spec, P, delay, samples,
                                  seed, include_transient, out_dir);
    if (*rep) {
      switch (experiment) {
        case 1:
          return cmd_reproduce1(p_given ? P : 7, hp_length, seed, out_dir);
        case 2:
          return cmd_reproduce2(out_dir);
        case 3:
          return cmd_reproduce3(seed, out_dir);
        default:
          std::cerr << "experiment must be 1, 2 or 3\n";
          return 2;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
