#pragma once

// Two sequences of symmetric five- and four-atom laws on R^2 that converge
// weakly to the same collinear law while their t scatter matrices converge
// to different limits.

#include <array>
#include <vector>

#include "tscatter/model.hpp"

namespace tscatter {

/// 1/6 at (+-1, +-1/k), 1/3 at the origin.
Sample make_Pk(int k);

/// 1/3 at (+-1, 0), 1/6 at (0, +-1/k).
Sample make_Qk(int k);

struct LimitTriple {
  double a;  // limit of Sigma_11 along P^(k): 2 (1 - 1/nu) / 3
  double b;  // Sigma_11 along Q^(k): (2 + 1/nu) / 3
  double c;  // Sigma_22 of Q^(1): (1 - 1/nu) / 3
};

/// Throws ConfigError unless cfg.dim() == 2 and nu > 1.
LimitTriple limits(const TConfig& cfg);

inline constexpr std::array<int, 6> kDefaultKSweep{1, 2, 5, 10, 25, 100};

struct SweepRow {
  int k = 0;
  Vector p_mu;
  SymMatrix p_sigma;
  Vector q_mu;
  SymMatrix q_sigma;
};

std::vector<SweepRow> counterexample_sweep(const TConfig& cfg, std::span<const int> ks);

}  // namespace tscatter
