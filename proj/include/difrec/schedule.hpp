#pragma once

#include <functional>
#include <vector>

#include "difrec/array.hpp"

namespace difrec {

/// Forward-process noise schedule. Arrays are stored for t = 1..T; the
/// accessors take 1-based t and range-check it. Immutable once built.
struct NoiseSchedule {
    int T = 0;
    std::vector<double> beta;       // β_t in (0,1)
    std::vector<double> alpha;      // α_t = 1 − β_t
    std::vector<double> alpha_bar;  // ᾱ_t = Π_{i≤t} α_i, strictly decreasing
    std::vector<double> sigma;      // σ_t = √β_t

    double beta_at(int t) const { return beta[check(t)]; }
    double alpha_at(int t) const { return alpha[check(t)]; }
    double alpha_bar_at(int t) const { return alpha_bar[check(t)]; }
    double sigma_at(int t) const { return sigma[check(t)]; }

  private:
    std::size_t check(int t) const {
        if (t < 1 || t > T)
            throw IndexError("schedule index t=" + std::to_string(t) + " outside 1.." +
                             std::to_string(T));
        return static_cast<std::size_t>(t - 1);
    }
};

/// Descending time indices visited by the reverse sampler; first entry is
/// always T.
struct StepIndexPlan {
    int T_tilde = 0;
    std::vector<int> indices;
};

NoiseSchedule make_schedule_from_betas(std::vector<double> betas);
NoiseSchedule make_linear_schedule(int T, double beta_start, double beta_end);

// z_t = √ᾱ_t z0 + √(1−ᾱ_t) eps
NumericArray q_sample(const NumericArray& z0, int t, const NumericArray& eps,
                      const NoiseSchedule& sched);

// Applies z_s = √α_s z_{s−1} + √(1−α_s) ε for s = 1..t with fresh noise per
// step from noise_source (one standard-normal array of z0's shape per call).
NumericArray q_sample_iterative(const NumericArray& z0, int t,
                                const std::function<NumericArray()>& noise_source,
                                const NoiseSchedule& sched);

// Evenly spaced descending indices over {1..T}: T_tilde of them, including T
// and (for T_tilde ≥ 2) ending at 1.
StepIndexPlan make_step_plan(const NoiseSchedule& sched, int T_tilde);

}  // namespace difrec
