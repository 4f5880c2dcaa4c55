#include "difrec/optim.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace difrec {

double clip_grad_norm(const std::vector<Parameter*>& params, double max_norm) {
    if (max_norm <= 0.0) throw ConfigError("clip_grad_norm: max_norm must be positive");
    double sq = 0.0;
    for (const Parameter* p : params) {
        for (double g : p->grad.data) sq += g * g;
    }
    const double norm = std::sqrt(sq);
    if (norm > max_norm) {
        const double scale = max_norm / norm;
        for (Parameter* p : params) {
            for (double& g : p->grad.data) g *= scale;
        }
    }
    return norm;
}

Adam::Adam(AdamConfig cfg, std::vector<Parameter*> params)
    : cfg_(cfg), params_(std::move(params)) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const Parameter* p : params_) {
        m_.push_back(NumericArray::zeros(p->value.shape));
        v_.push_back(NumericArray::zeros(p->value.shape));
    }
}

double Adam::step() {
    const double pre_clip = clip_grad_norm(params_, cfg_.max_grad_norm);
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t pi = 0; pi < params_.size(); ++pi) {
        Parameter& p = *params_[pi];
        auto& m = m_[pi].data;
        auto& v = v_[pi].data;
        for (std::size_t i = 0; i < p.value.data.size(); ++i) {
            const double g = p.grad.data[i];
            m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g;
            v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g * g;
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            p.value.data[i] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.eps);
            p.ema_value.data[i] =
                cfg_.ema_decay * p.ema_value.data[i] + (1.0 - cfg_.ema_decay) * p.value.data[i];
        }
        p.zero_grad();
    }
    return pre_clip;
}

GradCheckReport grad_check(const std::function<double()>& forward,
                           const std::vector<Parameter*>& params, double step,
                           int max_checks_per_param, Rng* coord_rng) {
    GradCheckReport report;
    for (Parameter* p : params) {
        const std::int64_t n = p->numel();
        std::vector<std::int64_t> coords;
        if (max_checks_per_param > 0 && n > max_checks_per_param) {
            coords.reserve(static_cast<std::size_t>(max_checks_per_param));
            for (int c = 0; c < max_checks_per_param; ++c) {
                coords.push_back(coord_rng
                                     ? static_cast<std::int64_t>(
                                           coord_rng->uniform_u64(static_cast<std::uint64_t>(n)))
                                     : c);
            }
        } else {
            coords.resize(static_cast<std::size_t>(n));
            for (std::int64_t c = 0; c < n; ++c) coords[static_cast<std::size_t>(c)] = c;
        }
        for (std::int64_t c : coords) {
            double& w = p->value.data[static_cast<std::size_t>(c)];
            const double saved = w;
            w = saved + step;
            const double plus = forward();
            w = saved - step;
            const double minus = forward();
            w = saved;
            const double numeric = (plus - minus) / (2.0 * step);
            const double analytic = p->grad.data[static_cast<std::size_t>(c)];
            const double denom =
                std::max({std::abs(analytic), std::abs(numeric), 1e-3});
            const double rel = std::abs(analytic - numeric) / denom;
            if (rel > report.max_rel_err) {
                report.max_rel_err = rel;
                report.worst_param = p->name;
                report.worst_index = c;
            }
        }
    }
    return report;
}

}  // namespace difrec
