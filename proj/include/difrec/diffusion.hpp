#pragma once

#include <cstdint>
#include <vector>

#include "difrec/encoder.hpp"
#include "difrec/layers.hpp"
#include "difrec/prompts.hpp"
#include "difrec/schedule.hpp"
#include "difrec/synthworld.hpp"

namespace difrec {

// Raw sinusoidal embedding, no range check; exposed so boundary behaviour
// (t=0: sines 0, cosines 1) is unit-testable.
NumericArray time_embed_raw(double t, int d_t);
// The checked embedding used by the denoiser: requires 1 <= t <= T.
NumericArray time_embed(int t, int d_t, int T);

struct DenoiserArch {
    int T = 200;
    int d_z = 32;
    int d_t = 32;
    int K = 18;
    int d_p = 8;
    int d_c = 64;
    int hidden = 256;
    int depth = 3;
};

/// Conditional noise predictor: trunk MLP over concat(z_t, time embedding,
/// prompt embedding). The time table is fixed; the prompt embedder is owned
/// and trained jointly with the trunk.
struct DenoiserParams {
    DenoiserArch arch;
    NumericArray time_table;  // [T x d_t], non-trainable
    Mlp trunk;
    PromptEmbedder embedder;

    explicit DenoiserParams(const DenoiserArch& arch);

    void init(Rng& rng);

    NumericArray denoise_batch(const NumericArray& z_t, const std::vector<int>& ts,
                               const std::vector<PromptVector>& ps, bool use_ema = false) const;
    NumericArray denoise(const NumericArray& z_t_row, int t, const PromptVector& p,
                         bool use_ema = false) const;

    std::vector<Parameter*> parameters();
    std::vector<const Parameter*> parameters() const;
};

// Per-item (t, eps) draws for one training batch: t ~ Uniform{1..T}, then
// the eps row, item by item.
struct LdmDraw {
    std::vector<int> ts;
    NumericArray eps;  // [B x d_z]
};
LdmDraw draw_ldm(int batch, int d_z, const NoiseSchedule& sched, Rng& rng);

// mean over items of the squared l2 error between prediction and noise.
double ldm_loss_from_pred(const NumericArray& pred, const NumericArray& eps);

// Forms z_t by q_sample per item, runs the denoiser, returns the loss; when
// backward is true, accumulates grad_scale-scaled gradients into the trunk
// and embedder.
double ldm_loss_with_draw(const NumericArray& z0, const std::vector<PromptVector>& ps,
                          const LdmDraw& draw, DenoiserParams& params, const NoiseSchedule& sched,
                          bool backward = false, double grad_scale = 1.0);
// Same, drawing (t, eps) from rng.
double ldm_loss(const NumericArray& z0, const std::vector<PromptVector>& ps,
                DenoiserParams& params, const NoiseSchedule& sched, Rng& rng,
                bool backward = false, double grad_scale = 1.0);

struct DiffusionTrainConfig {
    double learning_rate = 1e-4;
    int batch_size = 4;
    int grad_accum_steps = 4;
    int max_steps = 3000;  // optimizer steps; each consumes grad_accum_steps micro-batches
    double max_grad_norm = 1.0;
    double ema_decay = 0.999;
    std::uint64_t seed = 0;
};

/// Denoiser plus the latent standardization fitted on the training split:
/// the diffusion runs over z~ = (E_z(x) - mu) / sigma, the usual latent
/// scaling, so the prior N(0, I) matches the target distribution.
struct DenoiserBundle {
    DenoiserParams params;
    NumericArray latent_mu;     // [d_z]
    NumericArray latent_sigma;  // [d_z]

    explicit DenoiserBundle(const DenoiserArch& arch);
};

NumericArray standardize_latents(const NumericArray& z, const NumericArray& mu,
                                 const NumericArray& sigma);
NumericArray destandardize_latents(const NumericArray& z, const NumericArray& mu,
                                   const NumericArray& sigma);

// Fits mu/sigma per latent dimension (sigma floored at 1e-8).
void fit_latent_stats(const NumericArray& latents, NumericArray& mu, NumericArray& sigma);

// Trains the denoiser on standardized E_z latents of the training split.
// When warm_start is non-null, continues from those weights (the finetune
// phase) instead of fresh initialization.
DenoiserBundle train_diffusion(const SyntheticDataset& ds, const EncoderParams& encoder,
                               const DiffusionTrainConfig& cfg, const NoiseSchedule& sched,
                               const DenoiserArch& arch, TrainStats* stats = nullptr,
                               const DenoiserBundle* warm_start = nullptr);

// One reverse update: (z_t - beta_t/sqrt(1-alpha_bar_t) * eps_hat)/sqrt(alpha_t)
// + sigma_t * eta, with eta forced to zero at t == 1 (or when null).
NumericArray sample_step_update(const NumericArray& z_t, int t, const NumericArray& eps_hat,
                                const NoiseSchedule& sched, const NumericArray* eta);
NumericArray sample_step(const NumericArray& z_t, int t, const PromptVector& p,
                         const DenoiserParams& params, const NoiseSchedule& sched, Rng& rng,
                         bool use_ema = false);
// Full reverse pass along the plan from a fresh Gaussian z_T; returns the
// (standardized-space) latent [1 x d_z].
NumericArray sample(const PromptVector& p, const DenoiserParams& params,
                    const NoiseSchedule& sched, const StepIndexPlan& plan, Rng& rng,
                    bool use_ema = false);

// sample() plus destandardization: a latent comparable to E_z outputs.
NumericArray sample_latent(const DenoiserBundle& bundle, const PromptVector& p,
                           const NoiseSchedule& sched, const StepIndexPlan& plan, Rng& rng,
                           bool use_ema = false);

// Copies each parameter's EMA into its value (the served weights).
void serve_ema(const std::vector<Parameter*>& params);

}  // namespace difrec
