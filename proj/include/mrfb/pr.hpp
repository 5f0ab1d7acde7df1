#pragma once

// Perfect-reconstruction certification: time-domain polyphase products,
// the shifted-selector condition on K^T a_i, feasibility from the zero
// structure of K^+K, parametric PR solutions, and null-space placement.

#include <string>
#include <utility>
#include <vector>

#include "mrfb/bank.hpp"
#include "mrfb/wiener.hpp"

namespace mrfb {

/// Polyphase components of the end-to-end transfer: p[i][j](n) = s_i(Mn+j)
/// with s_i = K^T a_i, each of length P+T-1 where T = ceil(Q/M).
struct PolyphaseProduct {
  std::vector<std::vector<Vector>> p;  // M x M
  std::vector<Vector> selectors;       // s_i, length q
  int T = 0;
};

PolyphaseProduct polyphase_product(const KMatrix& k,
                                   const SynthesisSolution& solution);

/// What a pseudocirculant check concluded. pass iff every s_i equals
/// c e_{i+d0} within tolerance*|c|.
struct PseudocirculantResult {
  bool pass = false;
  double c = 0.0;
  int d0 = -1;
};

/// Direct selector match against c e_{i+d0}.
PseudocirculantResult check_pseudocirculant(const std::vector<Vector>& s,
                                            double tolerance);

/// Same decision via the structural route: one dominant entry per vector,
/// positions shifting by exactly one, equal values. Must agree with
/// check_pseudocirculant on every input.
PseudocirculantResult check_pseudocirculant_structural(
    const std::vector<Vector>& s, double tolerance);

struct PRCertificate {
  bool feasible = false;
  int p = 0;  // start of the largest clean interval of K^+K
  int r = 0;  // its length
  int q = 0;
  /// Inclusive admissible delay intervals, largest clean run first. More
  /// than one entry means disjoint maximal runs each admitted PR.
  std::vector<std::pair<int, int>> delay_ranges;
  bool multiple_intervals = false;
  double zero_block_residual = 0.0;  // max |K^+K - I| over the clean cross
  double tolerance = 0.0;

  // Filled in when a concrete solution was checked.
  std::vector<Vector> selectors;
  double c = 0.0;
  int checked_delay = -1;
  bool pseudocirculant_pass = false;
};

/// Scans K^+K - I for indices whose entire row and column vanish (below
/// tolerance * |K^+K|_inf) and keeps the contiguous runs of length >= M.
PRCertificate pr_feasibility(const KMatrix& k, double tolerance = 1e-8);

bool delay_admissible(const PRCertificate& cert, int d);

/// a_i = c (K^+)^T e_{i+d} + (I - K K^+)^T w. Throws if the bank is
/// infeasible or d lies outside the certified delay ranges.
SynthesisSolution pr_solution(const KMatrix& k, int d, double c = 1.0,
                              const std::optional<Vector>& w = std::nullopt,
                              double tolerance = 1e-8);

/// True iff every right null-space basis vector of K vanishes (below
/// tolerance) on the clean interval [p, p+r).
bool nullspace_structure_check(const KMatrix& k, const PRCertificate& cert,
                               double tolerance = 1e-8);

/// End-to-end sample delay c u(n - d0 - M + 1) implies: d0 + M - 1.
int reconstruction_delay(const PRCertificate& cert, int M);

std::string format_certificate(const PRCertificate& cert);

}  // namespace mrfb
