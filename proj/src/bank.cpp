#include "mrfb/bank.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mrfb {

bool Bank::uniform() const {
  if (channels.empty()) return false;
  for (const auto& c : channels)
    if (c.decimation != channels.front().decimation) return false;
  return true;
}

int Bank::factor() const {
  if (!uniform()) throw std::logic_error("bank is not uniform");
  return channels.front().decimation;
}

int Bank::lcm_factor() const {
  if (channels.empty()) throw std::logic_error("bank is empty");
  int m = 1;
  for (const auto& c : channels) m = std::lcm(m, c.decimation);
  return m;
}

Index Bank::max_length() const {
  Index q = 0;
  for (const auto& c : channels) q = std::max(q, c.taps.size());
  return q;
}

Bank pad_to_common_length(const Bank& bank) {
  const Index q = bank.max_length();
  Bank out = bank;
  for (auto& c : out.channels) {
    if (c.taps.size() < q) {
      Vector padded = Vector::Zero(q);
      padded.head(c.taps.size()) = c.taps;
      c.taps = std::move(padded);
    }
  }
  return out;
}

Bank nufb_to_ufb(const Bank& bank) {
  if (bank.channels.empty()) throw std::invalid_argument("bank is empty");
  for (const auto& c : bank.channels) {
    if (c.taps.size() == 0) throw std::invalid_argument("channel has no taps");
    if (c.decimation < 1) throw std::invalid_argument("decimation must be >= 1");
  }
  const int m = bank.lcm_factor();
  Bank out;
  for (const auto& c : bank.channels) {
    const int k = m / c.decimation;
    for (int l = 0; l < k; ++l) {
      Channel blocked;
      blocked.decimation = m;
      const Index shift = static_cast<Index>(l) * c.decimation;
      blocked.taps = Vector::Zero(shift + c.taps.size());
      blocked.taps.tail(c.taps.size()) = c.taps;
      out.channels.push_back(std::move(blocked));
    }
  }
  return out;
}

KMatrix build_k(const Bank& bank, int P) {
  if (P < 1) throw std::invalid_argument("synthesis length P must be >= 1");
  if (bank.channels.empty()) throw std::invalid_argument("bank is empty");
  if (!bank.uniform())
    throw std::invalid_argument("build_k requires a uniform bank; block first");
  const Bank padded = pad_to_common_length(bank);
  const int M = padded.factor();
  const int L = static_cast<int>(padded.size());
  const int Q = static_cast<int>(padded.max_length());
  const Index span = static_cast<Index>(M) * (P - 1) + 1;

  KMatrix k;
  k.M = M;
  k.L = L;
  k.P = P;
  k.Q = Q;
  k.entries = Matrix::Zero(static_cast<Index>(L) * P, k.q());
  const Matrix d0 = build_decimation_matrix(M, 0, P, span).entries;
  for (int i = 0; i < L; ++i) {
    const Matrix h =
        build_convolution_matrix(padded.channels[i].taps, span,
                                 ConvForm::Observation)
            .entries;
    k.entries.middleRows(static_cast<Index>(i) * P, P) = d0 * reverse_matrix(h);
  }
  return k;
}

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

Vector hamming(int n) {
  Vector w(n);
  if (n == 1) {
    w(0) = 1.0;
    return w;
  }
  for (int i = 0; i < n; ++i)
    w(i) = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (n - 1));
  return w;
}

}  // namespace

Vector design_lowpass(double cutoff, int length) {
  if (!(cutoff > 0.0 && cutoff < 1.0))
    throw std::invalid_argument("cutoff must lie in (0, 1)");
  if (length < 2) throw std::invalid_argument("filter length must be >= 2");
  const double mid = (length - 1) / 2.0;
  Vector h(length);
  const Vector w = hamming(length);
  for (int n = 0; n < length; ++n)
    h(n) = cutoff * sinc(cutoff * (n - mid)) * w(n);
  return h / h.sum();  // unit DC gain
}

Vector design_highpass(double cutoff, int length) {
  if (!(cutoff > 0.0 && cutoff < 1.0))
    throw std::invalid_argument("cutoff must lie in (0, 1)");
  if (length < 2) throw std::invalid_argument("filter length must be >= 2");
  if (length % 2 == 0)
    throw std::invalid_argument(
        "highpass length must be odd: an even-length symmetric filter has a "
        "forced zero at Nyquist");
  const double mid = (length - 1) / 2.0;
  Vector h(length);
  const Vector w = hamming(length);
  for (int n = 0; n < length; ++n)
    h(n) = (sinc(n - mid) - cutoff * sinc(cutoff * (n - mid))) * w(n);
  // Unit amplitude at Nyquist for the zero-phase response.
  double nyq = 0.0;
  for (int n = 0; n < length; ++n)
    nyq += h(n) * ((n - static_cast<int>(mid)) % 2 == 0 ? 1.0 : -1.0);
  return h / nyq;
}

Vector elt_prototype() {
  // Symmetric length-16 prototype for M = 4, overlap 2, satisfying the
  // polyphase power-complementarity pairs exactly (angle construction,
  // stopband-optimized).
  Vector p(16);
  p << -0.080792524437, -0.029326544070, 0.035813499766, 0.190614088975,
      0.111844202735, 0.222067772899, 0.271188589891, 0.263874423532,
      0.263874423532, 0.271188589891, 0.222067772899, 0.111844202735,
      0.190614088975, 0.035813499766, -0.029326544070, -0.080792524437;
  return p;
}

Bank modulated_bank(const Vector& prototype, int M) {
  if (M < 1) throw std::invalid_argument("modulation factor must be >= 1");
  if (prototype.size() == 0) throw std::invalid_argument("empty prototype");
  Bank bank;
  const Index n = prototype.size();
  for (int k = 0; k < M; ++k) {
    Channel c;
    c.decimation = M;
    c.taps = Vector(n);
    for (Index t = 0; t < n; ++t)
      c.taps(t) = prototype(t) * std::sqrt(2.0 / M) *
                  std::cos((k + 0.5) * (t + (M + 1) / 2.0) *
                           std::numbers::pi / M);
    bank.channels.push_back(std::move(c));
  }
  return bank;
}

Bank load_bank_json(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open bank config: " + file.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("bank config parse error in " + file.string() +
                             ": " + e.what());
  }
  if (!j.contains("channels") || !j["channels"].is_array() ||
      j["channels"].empty())
    throw std::runtime_error("bank config " + file.string() +
                             ": missing non-empty 'channels' array");
  Bank bank;
  int idx = 0;
  for (const auto& jc : j["channels"]) {
    Channel c;
    if (!jc.contains("taps") || !jc["taps"].is_array() || jc["taps"].empty())
      throw std::runtime_error("bank config channel " + std::to_string(idx) +
                               ": missing non-empty 'taps' array");
    c.taps = Vector(jc["taps"].size());
    Index t = 0;
    for (const auto& v : jc["taps"]) {
      if (!v.is_number())
        throw std::runtime_error("bank config channel " + std::to_string(idx) +
                                 ": non-numeric tap");
      c.taps(t++) = v.get<double>();
    }
    c.decimation = jc.value("decimation", 1);
    if (c.decimation < 1)
      throw std::runtime_error("bank config channel " + std::to_string(idx) +
                               ": decimation must be >= 1");
    bank.channels.push_back(std::move(c));
    ++idx;
  }
  return bank;
}

Bank load_bank_csv(const std::filesystem::path& file,
                   const std::vector<int>& decimations) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open taps CSV: " + file.string());
  Bank bank;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> taps;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        taps.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error("taps CSV " + file.string() + " row " +
                                 std::to_string(row) + ": bad value '" + cell +
                                 "'");
      }
    }
    if (taps.empty())
      throw std::runtime_error("taps CSV row " + std::to_string(row) +
                               " is empty");
    Channel c;
    c.taps = Eigen::Map<const Vector>(taps.data(), taps.size());
    bank.channels.push_back(std::move(c));
    ++row;
  }
  if (bank.channels.empty())
    throw std::runtime_error("taps CSV " + file.string() + " has no rows");
  if (decimations.size() == 1) {
    for (auto& c : bank.channels) c.decimation = decimations.front();
  } else if (decimations.size() == bank.channels.size()) {
    for (std::size_t i = 0; i < decimations.size(); ++i)
      bank.channels[i].decimation = decimations[i];
  } else {
    throw std::runtime_error(
        "decimation list must have one entry or one per CSV row");
  }
  return bank;
}

void save_bank_json(const Bank& bank, const std::filesystem::path& file) {
  nlohmann::json j;
  for (const auto& c : bank.channels) {
    nlohmann::json jc;
    jc["decimation"] = c.decimation;
    jc["taps"] = std::vector<double>(c.taps.data(), c.taps.data() + c.taps.size());
    j["channels"].push_back(std::move(jc));
  }
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write bank config: " + file.string());
  out << j.dump(2) << '\n';
}

}  // namespace mrfb
