#pragma once

#include <cstdint>

#include "difrec/diffusion.hpp"
#include "difrec/encoder.hpp"
#include "difrec/layers.hpp"

namespace difrec {

/// Refinement network R: a PReLU/linear stack mapping sampled latents into
/// the recognition feature space.
struct RefinerParams {
    Mlp stack;  // d_z -> hidden -> d_f

    RefinerParams(int d_z, int hidden, int d_f);

    void init(Rng& rng);

    int d_z() const { return stack.in_dim(); }
    int d_f() const { return stack.out_dim(); }

    NumericArray refine(const NumericArray& z) const { return stack.forward(z); }

    std::vector<Parameter*> parameters() { return stack.parameters(); }
    std::vector<const Parameter*> parameters() const { return stack.parameters(); }
};

// mean over rows of 1 - cosine(fp_i, fx_i); in [0, 2]. When d_fp is
// non-null, accumulates grad_scale-scaled gradients w.r.t. fp.
double cosine_embedding_loss(const NumericArray& fp, const NumericArray& fx,
                             NumericArray* d_fp = nullptr, double grad_scale = 1.0);

// Refines the latent batch, compares against frozen encoder features of the
// image batch, returns the loss; backgrad flows into the refiner only.
double refine_loss(const NumericArray& z_hat0, const NumericArray& x, RefinerParams& refiner,
                   const EncoderParams& encoder, bool backward = false, double grad_scale = 1.0);

struct RefinerTrainConfig {
    int hidden = 256;
    int batch_size = 4;
    int max_steps = 2000;
    double learning_rate = 1e-3;
    double max_grad_norm = 1.0;
    std::uint64_t seed = 0;
};

RefinerParams train_refiner(const SyntheticDataset& ds, const DenoiserBundle& denoiser,
                            const EncoderParams& encoder, const NoiseSchedule& sched,
                            const StepIndexPlan& plan, const RefinerTrainConfig& cfg,
                            TrainStats* stats = nullptr);

}  // namespace difrec
