#pragma once

// Analysis banks (uniform and non-uniform), NUFB-to-UFB blocking, the
// stacked decimate-convolve matrix K, and FIR designers for the bundled
// experiment banks.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mrfb/mrmat.hpp"

namespace mrfb {

struct Channel {
  Vector taps;
  int decimation = 1;
};

struct Bank {
  std::vector<Channel> channels;

  std::size_t size() const { return channels.size(); }
  bool uniform() const;
  /// Common decimation factor; throws for a non-uniform bank.
  int factor() const;
  /// LCM of all decimation factors.
  int lcm_factor() const;
  Index max_length() const;
};

/// Extends every channel with trailing zeros to the common length Q.
Bank pad_to_common_length(const Bank& bank);

/// Blocks a non-uniform bank into the equivalent uniform bank with factor
/// M = lcm(M_i). Channel i spawns M/M_i copies delayed by l*M_i, ordered
/// (i ascending, l ascending). A uniform bank is returned unchanged.
Bank nufb_to_ufb(const Bank& bank);

/// The LP x (M(P-1)+Q) matrix mapping the reversed blocked input window to
/// the stacked subband observation vector.
struct KMatrix {
  Matrix entries;
  int M = 1;
  int L = 1;
  int P = 1;
  int Q = 1;
  int q() const { return M * (P - 1) + Q; }
};

/// Stacks D^0 * reversal(H_i) per channel; the bank must be uniform
/// (block NUFBs first) and is padded internally.
KMatrix build_k(const Bank& bank, int P);

/// Hamming-windowed linear-phase lowpass, unit DC gain. Cutoff is
/// normalized to Nyquist, in (0, 1).
Vector design_lowpass(double cutoff, int length);

/// Hamming-windowed linear-phase highpass, unit gain at Nyquist. Rejects
/// even lengths (type-II linear phase forces a Nyquist zero).
Vector design_highpass(double cutoff, int length);

/// Built-in length-16 prototype for a 4-channel cosine-modulated bank with
/// overlap factor 2; satisfies the paraunitary polyphase conditions.
Vector elt_prototype();

/// Cosine-modulated analysis bank from a prototype: channels
/// h_k(n) = p(n) sqrt(2/M) cos((k+1/2)(n+(M+1)/2) pi/M), decimation M.
Bank modulated_bank(const Vector& prototype, int M);

/// Bank description from a JSON config: {"channels":[{"taps":[..],
/// "decimation":m}, ...]}. Parse errors carry line/field context.
Bank load_bank_json(const std::filesystem::path& file);

/// One channel per CSV row; decimation factors supplied separately (a
/// single value is broadcast to all rows).
Bank load_bank_csv(const std::filesystem::path& file,
                   const std::vector<int>& decimations);

void save_bank_json(const Bank& bank, const std::filesystem::path& file);

}  // namespace mrfb
