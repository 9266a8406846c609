#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gmatch/ad/params.hpp"
#include "gmatch/ad/tape.hpp"

namespace gmatch::ad {

struct GradCheckResult {
  real worst_rel_err = 0;
  std::string worst_param;
  std::size_t worst_index = 0;
  std::size_t entries_checked = 0;
  std::size_t entries_skipped = 0;  // pinned to a kink at every tried step
  // Norm-ratio relative error per parameter, registration order.
  std::vector<std::pair<std::string, real>> per_param;
};

// Central finite-difference check of the analytic gradients.
//
// `f` must build the loss on the tape it is given and be deterministic:
// every call with the same parameter data must produce the same scalar.
// The analytic side runs f once and calls backward; the numeric side
// perturbs each checked entry by +-epsilon and re-evaluates f; entries
// whose perturbed passes cross a relu-family kink retry with a smaller
// step and are skipped (counted in entries_skipped) when the kink is
// closer than any tried step. When the
// store holds more than `max_entries` scalar entries, a seeded random
// subsample of that size is checked instead (proportional per parameter,
// at least one entry each). The relative error per parameter is the norm
// ratio max_i|a_i - n_i| / max(max_i|a_i|, max_i|n_i|, 1e-8): deviations
// are judged against the parameter's own gradient scale, because the
// absolute roundoff of a central difference (a few ulp(f) / 2 epsilon)
// swamps individual near-zero entries in any deep composition. Throws if
// f is non-finite.
GradCheckResult grad_check(const std::function<Value(Tape&)>& f, ParamStore& params,
                           real epsilon, std::uint64_t subsample_seed = 0x5eed,
                           std::size_t max_entries = 10000);

// Overwrites every parameter with uniform(-scale, scale) draws. Gradient
// checks run at such a point instead of a fresh model init: tiny init
// scales collapse deep activations toward the nonlinearity kinks, where
// true gradients sink below finite-difference roundoff.
void randomize_params(ParamStore& params, std::uint64_t seed, real scale);

}  // namespace gmatch::ad
