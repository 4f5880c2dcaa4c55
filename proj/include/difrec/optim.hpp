#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "difrec/array.hpp"
#include "difrec/rng.hpp"

namespace difrec {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double max_grad_norm = 1.0;
    double ema_decay = 0.999;
};

// Scales all grads by max_norm/norm when the global L2 norm exceeds
// max_norm; returns the pre-clip norm.
double clip_grad_norm(const std::vector<Parameter*>& params, double max_norm);

/// Full-precision Adam with bias correction. step() clips the global grad
/// norm, applies the update, refreshes each parameter's EMA from the
/// post-update value, and zeroes grads. Parameter identity is fixed at
/// construction; moment buffers are keyed by position.
class Adam {
  public:
    Adam(AdamConfig cfg, std::vector<Parameter*> params);

    double step();  // returns pre-clip global grad norm

    void set_learning_rate(double lr) { cfg_.learning_rate = lr; }
    const AdamConfig& config() const { return cfg_; }
    std::int64_t steps_taken() const { return t_; }

  private:
    AdamConfig cfg_;
    std::vector<Parameter*> params_;
    std::vector<NumericArray> m_;
    std::vector<NumericArray> v_;
    std::int64_t t_ = 0;
};

struct GradCheckReport {
    double max_rel_err = 0.0;
    std::string worst_param;
    std::int64_t worst_index = -1;
};

// Central finite differences against grads already stored in the
// parameters. `forward` must recompute the scalar objective from current
// parameter values without touching grads. When max_checks_per_param > 0,
// only that many coordinates per parameter are probed (chosen by coord_rng,
// or the leading coordinates when coord_rng is null). Relative error uses
// denominator max(|analytic|, |numeric|, 1e-3).
GradCheckReport grad_check(const std::function<double()>& forward,
                           const std::vector<Parameter*>& params, double step = 1e-5,
                           int max_checks_per_param = 0, Rng* coord_rng = nullptr);

}  // namespace difrec
