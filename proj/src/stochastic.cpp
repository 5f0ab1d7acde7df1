#include "mrfb/stochastic.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <stdexcept>

namespace mrfb {

namespace {

// Largest characteristic-root magnitude of the AR recursion, via the
// companion matrix of z^p - a1 z^{p-1} - ... - ap.
double max_root_magnitude(const std::vector<double>& coeffs) {
  const int p = static_cast<int>(coeffs.size());
  if (p == 0) return 0.0;
  Matrix companion = Matrix::Zero(p, p);
  for (int j = 0; j < p; ++j) companion(0, j) = coeffs[j];
  for (int i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Matrix> es(companion, /*computeEigenvectors=*/false);
  double mx = 0.0;
  for (Index i = 0; i < p; ++i)
    mx = std::max(mx, std::abs(es.eigenvalues()(i)));
  return mx;
}

// r(0..p) of a stable AR(p) process from the Yule-Walker equations:
//   r(k) = sum_j a_j r(|k-j|) + sigma2 * [k == 0].
Vector yule_walker_head(const std::vector<double>& a, double sigma2) {
  const int p = static_cast<int>(a.size());
  Matrix sys = Matrix::Zero(p + 1, p + 1);
  Vector rhs = Vector::Zero(p + 1);
  for (int k = 0; k <= p; ++k) {
    sys(k, k) += 1.0;
    for (int j = 1; j <= p; ++j) sys(k, std::abs(k - j)) -= a[j - 1];
    rhs(k) = (k == 0) ? sigma2 : 0.0;
  }
  return sys.colPivHouseholderQr().solve(rhs);
}

}  // namespace

SignalModel SignalModel::ar(std::vector<double> coeffs, double noise_variance,
                            bool normalize) {
  if (noise_variance <= 0.0)
    throw std::invalid_argument("AR noise variance must be positive");
  SignalModel m;
  m.kind_ = Kind::Ar;
  m.normalize_ = normalize;
  m.coeffs_ = std::move(coeffs);
  m.noise_variance_ = noise_variance;
  m.max_root_ = max_root_magnitude(m.coeffs_);
  if (m.max_root_ >= 1.0 - 1e-12)
    throw std::invalid_argument("AR recursion is unstable");
  return m;
}

SignalModel SignalModel::white(double variance) { return ar({}, variance, false); }

SignalModel SignalModel::empirical(std::vector<double> samples, bool normalize) {
  if (samples.empty()) throw std::invalid_argument("empirical model needs samples");
  SignalModel m;
  m.kind_ = Kind::Empirical;
  m.normalize_ = normalize;
  const std::size_t n = samples.size();
  m.stored_acf_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t i = k; i < n; ++i) acc += samples[i] * samples[i - k];
    m.stored_acf_[k] = acc / static_cast<double>(n);  // biased: PSD Toeplitz
  }
  if (m.stored_acf_[0] <= 0.0)
    throw std::invalid_argument("empirical signal has zero power");
  return m;
}

SignalModel SignalModel::explicit_acf(std::vector<double> acf, bool normalize) {
  if (acf.empty() || acf[0] <= 0.0)
    throw std::invalid_argument("explicit ACF requires r(0) > 0");
  SignalModel m;
  m.kind_ = Kind::Explicit;
  m.normalize_ = normalize;
  m.stored_acf_ = std::move(acf);
  return m;
}

Vector SignalModel::acf(int max_lag) const {
  if (max_lag < 0) throw std::invalid_argument("max_lag must be >= 0");
  Vector r = Vector::Zero(max_lag + 1);
  if (kind_ == Kind::Ar) {
    const int p = static_cast<int>(coeffs_.size());
    const Vector head = p > 0 ? yule_walker_head(coeffs_, noise_variance_)
                              : Vector::Constant(1, noise_variance_);
    for (int k = 0; k <= std::min(max_lag, p); ++k) r(k) = head(k);
    for (int k = p + 1; k <= max_lag; ++k) {
      double acc = 0.0;
      for (int j = 1; j <= p; ++j) acc += coeffs_[j - 1] * r(k - j);
      r(k) = acc;
    }
  } else {
    if (static_cast<std::size_t>(max_lag) >= stored_acf_.size())
      throw std::out_of_range("requested lag exceeds stored ACF length");
    for (int k = 0; k <= max_lag; ++k) r(k) = stored_acf_[k];
  }
  if (normalize_) r /= r(0);
  return r;
}

std::vector<double> SignalModel::simulate(std::size_t n, std::uint64_t seed) const {
  if (kind_ != Kind::Ar)
    throw std::logic_error("simulate() is only defined for AR models");
  const int p = static_cast<int>(coeffs_.size());
  std::size_t burn = 0;
  if (p > 0)
    burn = static_cast<std::size_t>(
        std::ceil(10.0 * static_cast<double>(p) / (1.0 - max_root_)));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(noise_variance_));
  double scale = 1.0;
  if (normalize_) {
    const Vector head = p > 0 ? yule_walker_head(coeffs_, noise_variance_)
                              : Vector::Constant(1, noise_variance_);
    scale = 1.0 / std::sqrt(head(0));
  }
  std::vector<double> state(p, 0.0);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t t = 0; t < burn + n; ++t) {
    double x = gauss(rng);
    for (int j = 0; j < p; ++j) x += coeffs_[j] * state[j];
    for (int j = p - 1; j > 0; --j) state[j] = state[j - 1];
    if (p > 0) state[0] = x;
    if (t >= burn) out.push_back(x * scale);
  }
  return out;
}

CorrelationBundle correlation_bundle(const SignalModel& model, int M, int P,
                                     int Q, const std::set<int>& delays) {
  if (M < 1 || P < 1 || Q < 1)
    throw std::invalid_argument("correlation_bundle: M, P, Q must be >= 1");
  for (int t : delays)
    if (t < 0) throw std::invalid_argument("correlation delays must be >= 0");
  const int q = M * (P - 1) + Q;
  int max_lag = q - 1;
  for (int t : delays) max_lag = std::max(max_lag, t);
  const Vector r = model.acf(max_lag);
  auto rv = [&r](int k) { return r(std::abs(k)); };

  CorrelationBundle bundle;
  bundle.Ruu = Matrix::Zero(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) bundle.Ruu(i, j) = rv(i - j);
  for (int t : delays) {
    Vector row(q);
    for (int k = 0; k < q; ++k) row(k) = rv(k - t);
    bundle.ruu_rows.emplace(t, std::move(row));
  }
  return bundle;
}

}  // namespace mrfb
