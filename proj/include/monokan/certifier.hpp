#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "monokan/network.hpp"

namespace monokan {

/// One failed certification condition with its edge coordinates.
/// Conditions 1-5 cover layer-0 columns of monotone inputs, 6-10 every edge
/// of the deeper layers; condition 0 flags a non-increasing basis function.
struct Violation {
  std::size_t layer = 0;
  std::size_t output = 0;
  std::size_t input = 0;
  std::optional<std::size_t> interval;  // empty for weight/basis conditions
  int condition = 0;
  double observed_a = 0.0;
  double observed_b = 0.0;
  std::string message;
};

struct Certificate {
  bool pass = false;
  std::vector<Violation> violations;
  double secant_zero_tol = kSecantZeroTol;
  double fritsch_slack = kFritschSlack;
};

/// Exact condition check over the stored parameters. A PASS certifies the
/// model partially monotonic w.r.t. every tagged input over all of R^n;
/// the conditions are sufficient, not necessary, so FAIL does not prove a
/// monotonicity violation exists.
Certificate certify(const MonoKanModel& m);

struct FalsifyResult {
  std::size_t checked_pairs = 0;  // summed over constrained features
  std::size_t violations = 0;
  double worst_gap = 0.0;  // most negative monotone margin observed
  std::size_t worst_feature = 0;
  std::vector<double> worst_x;
  std::vector<double> worst_x_prime;
};

/// Randomized search for monotonicity counterexamples. For each constrained
/// feature r, draws n_pairs base points uniformly from the standardized box
/// [-1 - range_expansion, 1 + range_expansion]^n and perturbs coordinate r,
/// counting pairs whose outputs are ordered the wrong way beyond 1e-12.
FalsifyResult falsify(const MonoKanModel& m, std::size_t n_pairs, std::uint64_t seed,
                      double range_expansion);

}  // namespace monokan
