#include "difrec/schedule.hpp"

#include <cmath>

namespace difrec {

NoiseSchedule make_schedule_from_betas(std::vector<double> betas) {
    if (betas.empty()) throw ConfigError("schedule: empty beta sequence");
    NoiseSchedule s;
    s.T = static_cast<int>(betas.size());
    s.beta = std::move(betas);
    s.alpha.resize(s.beta.size());
    s.alpha_bar.resize(s.beta.size());
    s.sigma.resize(s.beta.size());
    double prod = 1.0;
    for (std::size_t i = 0; i < s.beta.size(); ++i) {
        const double b = s.beta[i];
        if (!(b > 0.0 && b < 1.0))
            throw ConfigError("schedule: beta[" + std::to_string(i + 1) + "]=" +
                              std::to_string(b) + " outside (0,1)");
        s.alpha[i] = 1.0 - b;
        prod *= s.alpha[i];
        s.alpha_bar[i] = prod;
        s.sigma[i] = std::sqrt(b);
    }
    return s;
}

NoiseSchedule make_linear_schedule(int T, double beta_start, double beta_end) {
    if (T < 1) throw ConfigError("schedule: T must be >= 1");
    if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0)) {
        throw ConfigError("schedule: need 0 < beta_start <= beta_end < 1");
    }
    std::vector<double> betas(static_cast<std::size_t>(T));
    if (T == 1) {
        betas[0] = beta_start;
    } else {
        for (int i = 0; i < T; ++i) {
            betas[static_cast<std::size_t>(i)] =
                beta_start + (beta_end - beta_start) * static_cast<double>(i) /
                                 static_cast<double>(T - 1);
        }
    }
    return make_schedule_from_betas(std::move(betas));
}

NumericArray q_sample(const NumericArray& z0, int t, const NumericArray& eps,
                      const NoiseSchedule& sched) {
    check_same_shape(z0, eps, "q_sample");
    const double ab = sched.alpha_bar_at(t);
    const double c0 = std::sqrt(ab);
    const double ce = std::sqrt(1.0 - ab);
    NumericArray out = NumericArray::zeros(z0.shape);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] = c0 * z0.data[i] + ce * eps.data[i];
    }
    return out;
}

NumericArray q_sample_iterative(const NumericArray& z0, int t,
                                const std::function<NumericArray()>& noise_source,
                                const NoiseSchedule& sched) {
    if (t < 1 || t > sched.T)
        throw IndexError("q_sample_iterative: t=" + std::to_string(t) + " outside 1.." +
                         std::to_string(sched.T));
    NumericArray z = z0;
    for (int s = 1; s <= t; ++s) {
        const NumericArray eps = noise_source();
        check_same_shape(z, eps, "q_sample_iterative noise");
        const double ca = std::sqrt(sched.alpha_at(s));
        const double ce = std::sqrt(1.0 - sched.alpha_at(s));
        for (std::size_t i = 0; i < z.data.size(); ++i) {
            z.data[i] = ca * z.data[i] + ce * eps.data[i];
        }
    }
    return z;
}

StepIndexPlan make_step_plan(const NoiseSchedule& sched, int T_tilde) {
    if (T_tilde < 1 || T_tilde > sched.T) {
        throw ConfigError("step plan: T_tilde=" + std::to_string(T_tilde) + " outside 1.." +
                          std::to_string(sched.T));
    }
    StepIndexPlan plan;
    plan.T_tilde = T_tilde;
    if (T_tilde == 1) {
        plan.indices.push_back(sched.T);
        return plan;
    }
    // Linear spacing from T down to 1, rounded to nearest. Spacing >= 1
    // because T_tilde <= T, so roundings never collide; the dedup guard is
    // belt-and-braces.
    for (int j = 0; j < T_tilde; ++j) {
        const double v = 1.0 + (static_cast<double>(sched.T) - 1.0) *
                                   static_cast<double>(T_tilde - 1 - j) /
                                   static_cast<double>(T_tilde - 1);
        const int idx = static_cast<int>(std::lround(v));
        if (plan.indices.empty() || idx < plan.indices.back()) plan.indices.push_back(idx);
    }
    return plan;
}

}  // namespace difrec
