#include "gmatch/ad/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gmatch/rng.hpp"

namespace gmatch::ad {

namespace {

struct Eval {
  real value = 0;
  std::uint64_t branches = 0;  // kink sign pattern of the whole pass
};

Eval eval_scalar(const std::function<Value(Tape&)>& f) {
  Tape t;
  const real v = f(t).scalar();
  if (!std::isfinite(v)) throw std::runtime_error("grad_check: f is non-finite");
  return {v, t.branch_signature()};
}

}  // namespace

GradCheckResult grad_check(const std::function<Value(Tape&)>& f, ParamStore& params,
                           real epsilon, std::uint64_t subsample_seed,
                           std::size_t max_entries) {
  // Analytic pass.
  std::uint64_t base_branches = 0;
  params.zero_grads();
  {
    Tape t;
    Value loss = f(t);
    if (!std::isfinite(loss.scalar())) throw std::runtime_error("grad_check: f is non-finite");
    t.backward(loss);
    base_branches = t.branch_signature();
  }
  std::vector<std::vector<real>> analytic;
  analytic.reserve(params.entries().size());
  for (const auto& [name, entry] : params.entries()) {
    Value v = entry;  // shallow handle; grad() wants a non-const one
    analytic.push_back(v.grad());
  }

  const std::size_t total = params.total_entries();
  Rng rng(subsample_seed);

  GradCheckResult res;
  for (std::size_t p = 0; p < params.entries().size(); ++p) {
    const auto& [name, entry] = params.entries()[p];
    Value v = entry;
    const std::size_t n = v.size();

    std::vector<std::size_t> picks;
    if (total <= max_entries) {
      picks.resize(n);
      for (std::size_t i = 0; i < n; ++i) picks[i] = i;
    } else {
      std::size_t quota = std::max<std::size_t>(1, max_entries * n / total);
      quota = std::min(quota, n);
      for (std::size_t i = 0; i < quota; ++i) {
        picks.push_back(rng.next_u64() % n);
      }
      std::sort(picks.begin(), picks.end());
      picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
    }

    // Group norm ratio: worst absolute deviation over the group, measured
    // against the group's own gradient scale. Dividing entry by entry would
    // compare finite-difference roundoff (absolute, a few ulp(f) / 2eps)
    // against near-zero entries and fail any deep model.
    real num = 0, den_a = 0, den_n = 0;
    std::size_t num_index = 0;
    for (std::size_t i : picks) {
      const real saved = v.data()[i];

      // Central differences are meaningless across a relu-family kink, so
      // shrink the step until both evaluations share the unperturbed pass's
      // branch pattern, and skip entries pinned to a kink.
      real eps = epsilon;
      real numeric = 0;
      bool smooth = false;
      for (int attempt = 0; attempt < 3 && !smooth; ++attempt, eps /= 8) {
        v.data()[i] = saved + eps;
        const Eval up = eval_scalar(f);
        v.data()[i] = saved - eps;
        const Eval dn = eval_scalar(f);
        v.data()[i] = saved;
        if (up.branches == base_branches && dn.branches == base_branches) {
          numeric = (up.value - dn.value) / (2 * eps);
          smooth = true;
        }
      }
      if (!smooth) {
        ++res.entries_skipped;
        continue;
      }

      const real a = analytic[p][i];
      ++res.entries_checked;
      if (std::fabs(a - numeric) > num) {
        num = std::fabs(a - numeric);
        num_index = i;
      }
      den_a = std::max(den_a, std::fabs(a));
      den_n = std::max(den_n, std::fabs(numeric));
    }
    const real rel = num / std::max({den_a, den_n, real(1e-8)});
    if (rel > res.worst_rel_err) {
      res.worst_rel_err = rel;
      res.worst_param = name;
      res.worst_index = num_index;
    }
    res.per_param.emplace_back(name, rel);
  }
  return res;
}

void randomize_params(ParamStore& params, std::uint64_t seed, real scale) {
  Rng rng(mix_seed(seed, fnv1a("gradcheck-point")));
  for (const auto& entry : params.entries()) {
    Value v = entry.second;
    for (std::size_t i = 0; i < v.size(); ++i) v.data()[i] = rng.uniform(-scale, scale);
  }
}

}  // namespace gmatch::ad
