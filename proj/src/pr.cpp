#include "mrfb/pr.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mrfb {

PolyphaseProduct polyphase_product(const KMatrix& k,
                                   const SynthesisSolution& solution) {
  if (solution.rows.rows() != k.M || solution.rows.cols() != k.entries.rows())
    throw std::invalid_argument("solution does not match the K geometry");
  PolyphaseProduct out;
  out.T = (k.Q + k.M - 1) / k.M;
  const int len = k.P + out.T - 1;
  out.selectors.reserve(k.M);
  out.p.assign(k.M, std::vector<Vector>(k.M));
  for (int i = 0; i < k.M; ++i) {
    Vector s = k.entries.transpose() * solution.rows.row(i).transpose();
    for (int j = 0; j < k.M; ++j) {
      Vector pij = Vector::Zero(len);
      for (int n = 0; n < len; ++n) {
        const Index idx = static_cast<Index>(k.M) * n + j;
        if (idx < s.size()) pij(n) = s(idx);
      }
      out.p[i][j] = std::move(pij);
    }
    out.selectors.push_back(std::move(s));
  }
  return out;
}

namespace {

void require_uniform_selectors(const std::vector<Vector>& s) {
  if (s.empty()) throw std::invalid_argument("no selector vectors");
  for (const auto& v : s)
    if (v.size() != s.front().size())
      throw std::invalid_argument("selector vectors differ in length");
}

}  // namespace

PseudocirculantResult check_pseudocirculant(const std::vector<Vector>& s,
                                            double tolerance) {
  require_uniform_selectors(s);
  const int m = static_cast<int>(s.size());
  const Index q = s.front().size();

  // Scale and shift from the globally dominant entry.
  PseudocirculantResult res;
  Index best_i = 0, best_pos = 0;
  double best = -1.0;
  for (int i = 0; i < m; ++i) {
    Index pos;
    const double v = s[i].cwiseAbs().maxCoeff(&pos);
    if (v > best) {
      best = v;
      best_i = i;
      best_pos = pos;
    }
  }
  if (best <= 0.0) return res;
  const double c = s[best_i](best_pos);
  const int d0 = static_cast<int>(best_pos) - static_cast<int>(best_i);
  if (d0 < 0) return res;
  res.c = c;
  res.d0 = d0;
  for (int i = 0; i < m; ++i) {
    Vector diff = s[i];
    const Index target = static_cast<Index>(i) + d0;
    if (target >= q) return res;
    diff(target) -= c;
    if (diff.lpNorm<Eigen::Infinity>() > tolerance * std::abs(c)) return res;
  }
  res.pass = true;
  return res;
}

PseudocirculantResult check_pseudocirculant_structural(
    const std::vector<Vector>& s, double tolerance) {
  require_uniform_selectors(s);
  const int m = static_cast<int>(s.size());
  const Index q = s.front().size();
  PseudocirculantResult res;

  double peak = 0.0;
  for (const auto& v : s) peak = std::max(peak, v.cwiseAbs().maxCoeff());
  if (peak <= 0.0) return res;
  const double thresh = tolerance * peak;

  // One dominant entry per vector, everything else below threshold.
  std::vector<Index> pos(m);
  std::vector<double> val(m);
  for (int i = 0; i < m; ++i) {
    Index p;
    val[i] = 0.0;
    s[i].cwiseAbs().maxCoeff(&p);
    pos[i] = p;
    val[i] = s[i](p);
    for (Index n = 0; n < q; ++n)
      if (n != p && std::abs(s[i](n)) > thresh) return res;
    if (std::abs(val[i]) <= thresh) return res;
  }
  // Positions shift by exactly one per vector; no two share an index.
  for (int i = 1; i < m; ++i)
    if (pos[i] != pos[i - 1] + 1) return res;
  // Equal scale on the diagonal.
  for (int i = 1; i < m; ++i)
    if (std::abs(val[i] - val[0]) > thresh) return res;
  const int d0 = static_cast<int>(pos[0]);
  res.pass = true;
  res.c = val[0];
  res.d0 = d0;
  return res;
}

PRCertificate pr_feasibility(const KMatrix& k, double tolerance) {
  PRCertificate cert;
  cert.q = k.q();
  cert.tolerance = tolerance;

  const Matrix kp = pseudoinverse(k.entries);
  const Matrix g = kp * k.entries - Matrix::Identity(cert.q, cert.q);
  const double scale = (kp * k.entries).lpNorm<Eigen::Infinity>();
  const double thresh = tolerance * std::max(scale, 1.0);

  // Index t is clean when row t and column t of G both vanish.
  std::vector<bool> clean(cert.q);
  for (int t = 0; t < cert.q; ++t)
    clean[t] = g.row(t).lpNorm<Eigen::Infinity>() <= thresh &&
               g.col(t).lpNorm<Eigen::Infinity>() <= thresh;

  // Maximal runs of clean indices; each run of length >= M admits delays.
  int best_p = 0, best_r = 0;
  int t = 0;
  while (t < cert.q) {
    if (!clean[t]) {
      ++t;
      continue;
    }
    int start = t;
    while (t < cert.q && clean[t]) ++t;
    const int run = t - start;
    if (run >= k.M)
      cert.delay_ranges.emplace_back(start, start + run - k.M);
    if (run > best_r) {
      best_r = run;
      best_p = start;
    }
  }
  cert.p = best_p;
  cert.r = best_r;
  cert.feasible = !cert.delay_ranges.empty();
  cert.multiple_intervals = cert.delay_ranges.size() > 1;
  // Keep the largest run first.
  std::stable_sort(cert.delay_ranges.begin(), cert.delay_ranges.end(),
                   [&](const auto& a, const auto& b) {
                     return (a.second - a.first) > (b.second - b.first);
                   });

  double resid = 0.0;
  for (int i = best_p; i < best_p + best_r; ++i)
    resid = std::max({resid, g.row(i).lpNorm<Eigen::Infinity>(),
                      g.col(i).lpNorm<Eigen::Infinity>()});
  cert.zero_block_residual = resid;
  return cert;
}

bool delay_admissible(const PRCertificate& cert, int d) {
  for (const auto& [lo, hi] : cert.delay_ranges)
    if (d >= lo && d <= hi) return true;
  return false;
}

SynthesisSolution pr_solution(const KMatrix& k, int d, double c,
                              const std::optional<Vector>& w,
                              double tolerance) {
  if (c == 0.0) throw std::invalid_argument("scale c must be nonzero");
  const PRCertificate cert = pr_feasibility(k, tolerance);
  if (!cert.feasible)
    throw std::runtime_error("bank admits no perfect-reconstruction solution");
  if (!delay_admissible(cert, d)) {
    std::ostringstream msg;
    msg << "delay " << d << " is outside the admissible range";
    for (const auto& [lo, hi] : cert.delay_ranges)
      msg << " [" << lo << ", " << hi << "]";
    throw std::runtime_error(msg.str());
  }
  const Index lp = k.entries.rows();
  if (w && w->size() != lp)
    throw std::invalid_argument("free parameter must have length LP");

  const Matrix kp = pseudoinverse(k.entries);
  const Matrix proj =
      (Matrix::Identity(lp, lp) - k.entries * kp).transpose();
  SynthesisSolution s;
  s.delay = d;
  s.rows = Matrix::Zero(k.M, lp);
  s.nullspace_projector = proj;
  s.channel_mse = Vector::Zero(k.M);
  s.total_mse = 0.0;
  const Vector wp = w ? (proj * *w).eval() : Vector::Zero(lp).eval();
  for (int i = 0; i < k.M; ++i) {
    Vector e = Vector::Zero(k.q());
    e(i + d) = c;
    s.rows.row(i) = (kp.transpose() * e + wp).transpose();
  }
  return s;
}

bool nullspace_structure_check(const KMatrix& k, const PRCertificate& cert,
                               double tolerance) {
  Eigen::BDCSVD<Matrix> svd(k.entries,
                            Eigen::ComputeThinU | Eigen::ComputeFullV);
  const double thresh =
      std::max(k.entries.rows(), k.entries.cols()) *
      std::numeric_limits<double>::epsilon() *
      (svd.singularValues().size() ? svd.singularValues()(0) : 0.0);
  Index rank = 0;
  for (Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > thresh) ++rank;
  const Matrix v = svd.matrixV();
  for (Index j = rank; j < v.cols(); ++j)
    for (int t = cert.p; t < cert.p + cert.r; ++t)
      if (std::abs(v(t, j)) > tolerance) return false;
  return true;
}

int reconstruction_delay(const PRCertificate& cert, int M) {
  if (!cert.pseudocirculant_pass)
    throw std::logic_error("certificate holds no verified solution");
  return cert.checked_delay + M - 1;
}

std::string format_certificate(const PRCertificate& cert) {
  std::ostringstream out;
  out << "feasible: " << (cert.feasible ? "yes" : "no") << '\n'
      << "window q: " << cert.q << '\n'
      << "clean interval: [" << cert.p << ", " << cert.p + cert.r
      << ") length " << cert.r << '\n';
  out << "delay ranges:";
  if (cert.delay_ranges.empty()) out << " none";
  for (const auto& [lo, hi] : cert.delay_ranges)
    out << " [" << lo << ", " << hi << "]";
  out << '\n';
  if (cert.multiple_intervals)
    out << "note: multiple disjoint feasible intervals\n";
  out << "zero-block residual: " << cert.zero_block_residual << '\n';
  if (cert.checked_delay >= 0)
    out << "checked delay " << cert.checked_delay << ": "
        << (cert.pseudocirculant_pass ? "pass" : "fail")
        << " (c = " << cert.c << ")\n";
  return out.str();
}

}  // namespace mrfb
