#include "difrec/diffusion.hpp"

#include <cmath>

#include "difrec/optim.hpp"

namespace difrec {

namespace {

void apply_latent_affine(const NumericArray& z, const NumericArray& mu, const NumericArray& sigma,
                         bool forward, NumericArray& out) {
    const int d = static_cast<int>(mu.data.size());
    check_same_shape(mu, sigma, "latent stats");
    if (z.ndim() == 1) {
        if (static_cast<int>(z.data.size()) != d)
            throw DimensionError("latent vector size vs stats dim");
        for (int j = 0; j < d; ++j) {
            out.data[static_cast<std::size_t>(j)] =
                forward ? (z.data[static_cast<std::size_t>(j)] - mu.data[static_cast<std::size_t>(j)]) /
                              sigma.data[static_cast<std::size_t>(j)]
                        : z.data[static_cast<std::size_t>(j)] * sigma.data[static_cast<std::size_t>(j)] +
                              mu.data[static_cast<std::size_t>(j)];
        }
        return;
    }
    if (z.cols() != d) throw DimensionError("latent batch cols vs stats dim");
    for (int i = 0; i < z.rows(); ++i) {
        const double* src = z.row_ptr(i);
        double* dst = out.row_ptr(i);
        for (int j = 0; j < d; ++j) {
            dst[j] = forward ? (src[j] - mu.data[static_cast<std::size_t>(j)]) /
                                   sigma.data[static_cast<std::size_t>(j)]
                             : src[j] * sigma.data[static_cast<std::size_t>(j)] +
                                   mu.data[static_cast<std::size_t>(j)];
        }
    }
}

}  // namespace

NumericArray time_embed_raw(double t, int d_t) {
    if (d_t < 2 || d_t % 2 != 0) throw ConfigError("time embedding dim must be even and >= 2");
    const int H = d_t / 2;
    NumericArray emb = NumericArray::zeros({d_t});
    for (int k = 0; k < H; ++k) {
        const double omega =
            H == 1 ? 1.0 : std::pow(10.0, 4.0 * static_cast<double>(k) / static_cast<double>(H - 1));
        emb.data[static_cast<std::size_t>(2 * k)] = std::sin(t / omega);
        emb.data[static_cast<std::size_t>(2 * k + 1)] = std::cos(t / omega);
    }
    return emb;
}

NumericArray time_embed(int t, int d_t, int T) {
    if (t < 1 || t > T)
        throw IndexError("time_embed: t=" + std::to_string(t) + " outside 1.." + std::to_string(T));
    return time_embed_raw(static_cast<double>(t), d_t);
}

DenoiserParams::DenoiserParams(const DenoiserArch& a)
    : arch(a),
      time_table(NumericArray::zeros({a.T, a.d_t})),
      trunk("dn",
            [&a] {
                std::vector<int> dims;
                dims.push_back(a.d_z + a.d_t + a.d_c);
                for (int i = 0; i < a.depth; ++i) dims.push_back(a.hidden);
                dims.push_back(a.d_z);
                return dims;
            }()),
      embedder(a.K, a.d_p, a.d_c) {
    for (int t = 1; t <= arch.T; ++t) {
        const NumericArray row = time_embed(t, arch.d_t, arch.T);
        double* dst = time_table.row_ptr(t - 1);
        for (int j = 0; j < arch.d_t; ++j) dst[j] = row.data[static_cast<std::size_t>(j)];
    }
}

void DenoiserParams::init(Rng& rng) {
    trunk.init_he(rng);
    embedder.init(rng);
}

NumericArray DenoiserParams::denoise_batch(const NumericArray& z_t, const std::vector<int>& ts,
                                           const std::vector<PromptVector>& ps,
                                           bool use_ema) const {
    const int B = z_t.rows();
    if (z_t.cols() != arch.d_z) {
        throw DimensionError("denoise: latent " + z_t.shape_str() + " vs d_z=" +
                             std::to_string(arch.d_z));
    }
    if (static_cast<int>(ts.size()) != B || static_cast<int>(ps.size()) != B) {
        throw DimensionError("denoise: batch size mismatch between z_t, ts, ps");
    }
    const NumericArray cond = embedder.embed_batch(ps, use_ema);
    NumericArray input = NumericArray::zeros({B, arch.d_z + arch.d_t + arch.d_c});
    for (int i = 0; i < B; ++i) {
        const int t = ts[static_cast<std::size_t>(i)];
        if (t < 1 || t > arch.T)
            throw IndexError("denoise: t=" + std::to_string(t) + " outside 1.." +
                             std::to_string(arch.T));
        double* dst = input.row_ptr(i);
        const double* zrow = z_t.row_ptr(i);
        for (int j = 0; j < arch.d_z; ++j) dst[j] = zrow[j];
        const double* trow = time_table.row_ptr(t - 1);
        for (int j = 0; j < arch.d_t; ++j) dst[arch.d_z + j] = trow[j];
        const double* crow = cond.row_ptr(i);
        for (int j = 0; j < arch.d_c; ++j) dst[arch.d_z + arch.d_t + j] = crow[j];
    }
    return trunk.forward(input, use_ema);
}

NumericArray DenoiserParams::denoise(const NumericArray& z_t_row, int t, const PromptVector& p,
                                     bool use_ema) const {
    return denoise_batch(z_t_row, {t}, {p}, use_ema);
}

std::vector<Parameter*> DenoiserParams::parameters() {
    std::vector<Parameter*> ps = trunk.parameters();
    for (Parameter* p : embedder.parameters()) ps.push_back(p);
    return ps;
}

std::vector<const Parameter*> DenoiserParams::parameters() const {
    std::vector<const Parameter*> ps = trunk.parameters();
    ps.push_back(&embedder.table);
    ps.push_back(&embedder.projection.weight);
    ps.push_back(&embedder.projection.bias);
    return ps;
}

LdmDraw draw_ldm(int batch, int d_z, const NoiseSchedule& sched, Rng& rng) {
    LdmDraw draw;
    draw.ts.reserve(static_cast<std::size_t>(batch));
    draw.eps = NumericArray::zeros({batch, d_z});
    for (int i = 0; i < batch; ++i) {
        draw.ts.push_back(1 + rng.uniform_int(sched.T));
        double* row = draw.eps.row_ptr(i);
        for (int j = 0; j < d_z; ++j) row[j] = rng.normal();
    }
    return draw;
}

double ldm_loss_from_pred(const NumericArray& pred, const NumericArray& eps) {
    check_same_shape(pred, eps, "ldm_loss");
    const int B = pred.rows();
    double loss = 0.0;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        const double d = pred.data[i] - eps.data[i];
        loss += d * d;
    }
    return loss / static_cast<double>(B);
}

double ldm_loss_with_draw(const NumericArray& z0, const std::vector<PromptVector>& ps,
                          const LdmDraw& draw, DenoiserParams& params, const NoiseSchedule& sched,
                          bool backward, double grad_scale) {
    const int B = z0.rows();
    if (B == 0) throw ConfigError("ldm_loss: empty batch");
    if (static_cast<int>(draw.ts.size()) != B) throw DimensionError("ldm_loss: draw size vs batch");
    check_same_shape(draw.eps, z0, "ldm_loss eps");

    NumericArray z_t = NumericArray::zeros(z0.shape);
    for (int i = 0; i < B; ++i) {
        const double ab = sched.alpha_bar_at(draw.ts[static_cast<std::size_t>(i)]);
        const double c0 = std::sqrt(ab);
        const double ce = std::sqrt(1.0 - ab);
        const double* zrow = z0.row_ptr(i);
        const double* erow = draw.eps.row_ptr(i);
        double* dst = z_t.row_ptr(i);
        for (int j = 0; j < z0.cols(); ++j) dst[j] = c0 * zrow[j] + ce * erow[j];
    }

    const NumericArray gathered = params.embedder.gather(ps);
    const NumericArray cond = params.embedder.projection.forward(gathered);
    NumericArray input = NumericArray::zeros({B, params.arch.d_z + params.arch.d_t + params.arch.d_c});
    for (int i = 0; i < B; ++i) {
        double* dst = input.row_ptr(i);
        const double* zrow = z_t.row_ptr(i);
        for (int j = 0; j < params.arch.d_z; ++j) dst[j] = zrow[j];
        const double* trow = params.time_table.row_ptr(draw.ts[static_cast<std::size_t>(i)] - 1);
        for (int j = 0; j < params.arch.d_t; ++j) dst[params.arch.d_z + j] = trow[j];
        const double* crow = cond.row_ptr(i);
        for (int j = 0; j < params.arch.d_c; ++j)
            dst[params.arch.d_z + params.arch.d_t + j] = crow[j];
    }
    Mlp::Cache cache;
    const NumericArray pred = params.trunk.forward_cached(input, cache);
    const double loss = ldm_loss_from_pred(pred, draw.eps);

    if (backward) {
        NumericArray dpred = NumericArray::zeros(pred.shape);
        const double s = 2.0 * grad_scale / static_cast<double>(B);
        for (std::size_t i = 0; i < pred.data.size(); ++i) {
            dpred.data[i] = s * (pred.data[i] - draw.eps.data[i]);
        }
        const NumericArray dinput = params.trunk.backward(cache, dpred);
        NumericArray dcond = NumericArray::zeros({B, params.arch.d_c});
        for (int i = 0; i < B; ++i) {
            const double* src = dinput.row_ptr(i);
            double* dst = dcond.row_ptr(i);
            for (int j = 0; j < params.arch.d_c; ++j)
                dst[j] = src[params.arch.d_z + params.arch.d_t + j];
        }
        params.embedder.backward(ps, gathered, dcond);
    }
    return loss;
}

double ldm_loss(const NumericArray& z0, const std::vector<PromptVector>& ps,
                DenoiserParams& params, const NoiseSchedule& sched, Rng& rng, bool backward,
                double grad_scale) {
    const LdmDraw draw = draw_ldm(z0.rows(), z0.cols(), sched, rng);
    return ldm_loss_with_draw(z0, ps, draw, params, sched, backward, grad_scale);
}

DenoiserBundle::DenoiserBundle(const DenoiserArch& a)
    : params(a),
      latent_mu(NumericArray::zeros({a.d_z})),
      latent_sigma(NumericArray::full({a.d_z}, 1.0)) {}

NumericArray standardize_latents(const NumericArray& z, const NumericArray& mu,
                                 const NumericArray& sigma) {
    NumericArray out = NumericArray::zeros(z.shape);
    apply_latent_affine(z, mu, sigma, true, out);
    return out;
}

NumericArray destandardize_latents(const NumericArray& z, const NumericArray& mu,
                                   const NumericArray& sigma) {
    NumericArray out = NumericArray::zeros(z.shape);
    apply_latent_affine(z, mu, sigma, false, out);
    return out;
}

void fit_latent_stats(const NumericArray& latents, NumericArray& mu, NumericArray& sigma) {
    const int n = latents.rows();
    const int d = latents.cols();
    if (n < 2) throw DegenerateInputError("latent stats need at least two rows");
    mu = NumericArray::zeros({d});
    sigma = NumericArray::zeros({d});
    for (int i = 0; i < n; ++i) {
        const double* row = latents.row_ptr(i);
        for (int j = 0; j < d; ++j) mu.data[static_cast<std::size_t>(j)] += row[j];
    }
    for (int j = 0; j < d; ++j) mu.data[static_cast<std::size_t>(j)] /= static_cast<double>(n);
    for (int i = 0; i < n; ++i) {
        const double* row = latents.row_ptr(i);
        for (int j = 0; j < d; ++j) {
            const double c = row[j] - mu.data[static_cast<std::size_t>(j)];
            sigma.data[static_cast<std::size_t>(j)] += c * c;
        }
    }
    for (int j = 0; j < d; ++j) {
        double s = std::sqrt(sigma.data[static_cast<std::size_t>(j)] / static_cast<double>(n));
        if (s < 1e-8) s = 1e-8;
        sigma.data[static_cast<std::size_t>(j)] = s;
    }
}

DenoiserBundle train_diffusion(const SyntheticDataset& ds, const EncoderParams& encoder,
                               const DiffusionTrainConfig& cfg, const NoiseSchedule& sched,
                               const DenoiserArch& arch, TrainStats* stats,
                               const DenoiserBundle* warm_start) {
    if (cfg.batch_size < 1 || cfg.grad_accum_steps < 1 || cfg.max_steps < 0 ||
        cfg.learning_rate <= 0.0) {
        throw ConfigError("train_diffusion: non-positive training parameter");
    }
    if (arch.T != sched.T) throw ConfigError("train_diffusion: arch.T vs schedule T mismatch");
    if (arch.d_z != encoder.d_z()) throw ConfigError("train_diffusion: arch.d_z vs encoder d_z");

    const auto items = split_items(ds, Split::train);
    if (items.empty()) throw ConfigError("train_diffusion: empty training split");
    const int N = static_cast<int>(items.size());

    const std::uint64_t before = params_checksum(encoder.parameters());

    DenoiserBundle bundle = warm_start ? *warm_start : DenoiserBundle(arch);
    if (!warm_start) {
        Rng init_rng(derive_seed(cfg.seed, "diffusion-init"));
        bundle.params.init(init_rng);
    }

    const NumericArray z0_raw = encoder.encode_z(gather_images(ds, items));
    if (!warm_start) fit_latent_stats(z0_raw, bundle.latent_mu, bundle.latent_sigma);
    const NumericArray z0_all = standardize_latents(z0_raw, bundle.latent_mu, bundle.latent_sigma);

    AdamConfig acfg;
    acfg.learning_rate = cfg.learning_rate;
    acfg.max_grad_norm = cfg.max_grad_norm;
    acfg.ema_decay = cfg.ema_decay;
    Adam opt(acfg, bundle.params.parameters());

    Rng pick_rng(derive_seed(cfg.seed, "diffusion-batches"));
    Rng noise_rng(derive_seed(cfg.seed, "diffusion-noise"));
    const double accum_scale = 1.0 / static_cast<double>(cfg.grad_accum_steps);

    for (int step = 0; step < cfg.max_steps; ++step) {
        double step_loss = 0.0;
        for (int micro = 0; micro < cfg.grad_accum_steps; ++micro) {
            NumericArray z0 = NumericArray::zeros({cfg.batch_size, arch.d_z});
            std::vector<PromptVector> ps;
            ps.reserve(static_cast<std::size_t>(cfg.batch_size));
            for (int b = 0; b < cfg.batch_size; ++b) {
                const int pick = pick_rng.uniform_int(N);
                const double* src = z0_all.row_ptr(pick);
                double* dst = z0.row_ptr(b);
                for (int j = 0; j < arch.d_z; ++j) dst[j] = src[j];
                ps.push_back(
                    ds.identities[static_cast<std::size_t>(items[static_cast<std::size_t>(pick)]
                                                               .global_identity)]
                        .prompt);
            }
            const double loss =
                ldm_loss(z0, ps, bundle.params, sched, noise_rng, true, accum_scale);
            if (!std::isfinite(loss)) throw DivergenceError("train_diffusion: non-finite loss");
            step_loss += loss * accum_scale;
        }
        opt.step();
        if (stats) stats->step_losses.push_back(step_loss);
    }

    serve_ema(bundle.params.parameters());

    if (params_checksum(encoder.parameters()) != before) {
        throw IntegrityError("train_diffusion mutated the frozen encoder");
    }
    return bundle;
}

NumericArray sample_step_update(const NumericArray& z_t, int t, const NumericArray& eps_hat,
                                const NoiseSchedule& sched, const NumericArray* eta) {
    check_same_shape(z_t, eps_hat, "sample_step eps_hat");
    const double alpha = sched.alpha_at(t);
    const double beta = sched.beta_at(t);
    const double ab = sched.alpha_bar_at(t);
    const double sigma = sched.sigma_at(t);
    const double coef = beta / std::sqrt(1.0 - ab);
    const double inv_sqrt_alpha = 1.0 / std::sqrt(alpha);
    NumericArray out = NumericArray::zeros(z_t.shape);
    const bool add_noise = (t > 1) && (eta != nullptr);
    if (add_noise) check_same_shape(z_t, *eta, "sample_step eta");
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        double v = inv_sqrt_alpha * (z_t.data[i] - coef * eps_hat.data[i]);
        if (add_noise) v += sigma * eta->data[i];
        out.data[i] = v;
    }
    return out;
}

NumericArray sample_step(const NumericArray& z_t, int t, const PromptVector& p,
                         const DenoiserParams& params, const NoiseSchedule& sched, Rng& rng,
                         bool use_ema) {
    NumericArray z_row = z_t;
    if (z_row.shape.size() == 1) z_row.shape = {1, z_row.shape[0]};
    NumericArray eps_hat = params.denoise(z_row, t, p, use_ema);
    eps_hat.shape = z_t.shape;
    if (t <= 1) return sample_step_update(z_t, t, eps_hat, sched, nullptr);
    NumericArray eta = NumericArray::zeros(z_t.shape);
    rng.fill_normal(eta);
    return sample_step_update(z_t, t, eps_hat, sched, &eta);
}

NumericArray sample(const PromptVector& p, const DenoiserParams& params,
                    const NoiseSchedule& sched, const StepIndexPlan& plan, Rng& rng,
                    bool use_ema) {
    if (plan.indices.empty()) throw ConfigError("sample: empty step plan");
    if (plan.indices.front() != sched.T) throw ConfigError("sample: plan must start at T");
    for (std::size_t i = 0; i < plan.indices.size(); ++i) {
        const int t = plan.indices[i];
        if (t < 1 || t > sched.T) throw ConfigError("sample: plan index out of range");
        if (i > 0 && t >= plan.indices[i - 1]) throw ConfigError("sample: plan not descending");
    }
    NumericArray z = NumericArray::zeros({1, params.arch.d_z});
    rng.fill_normal(z);
    for (int t : plan.indices) z = sample_step(z, t, p, params, sched, rng, use_ema);
    z.shape = {params.arch.d_z};
    return z;
}

NumericArray sample_latent(const DenoiserBundle& bundle, const PromptVector& p,
                           const NoiseSchedule& sched, const StepIndexPlan& plan, Rng& rng,
                           bool use_ema) {
    const NumericArray z = sample(p, bundle.params, sched, plan, rng, use_ema);
    return destandardize_latents(z, bundle.latent_mu, bundle.latent_sigma);
}

void serve_ema(const std::vector<Parameter*>& params) {
    for (Parameter* p : params) p->value = p->ema_value;
}

}  // namespace difrec
