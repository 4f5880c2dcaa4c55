#include "difrec/refiner.hpp"

#include <cmath>

#include "difrec/optim.hpp"

namespace difrec {

RefinerParams::RefinerParams(int d_z, int hidden, int d_f) : stack("rf", {d_z, hidden, d_f}) {}

void RefinerParams::init(Rng& rng) { stack.init_he(rng); }

double cosine_embedding_loss(const NumericArray& fp, const NumericArray& fx, NumericArray* d_fp,
                             double grad_scale) {
    check_same_shape(fp, fx, "cosine_embedding_loss");
    const int B = fp.rows();
    const int d = fp.cols();
    double loss = 0.0;
    for (int i = 0; i < B; ++i) {
        const double* p = fp.row_ptr(i);
        const double* x = fx.row_ptr(i);
        double pp = 0.0, xx = 0.0, px = 0.0;
        for (int c = 0; c < d; ++c) {
            pp += p[c] * p[c];
            xx += x[c] * x[c];
            px += p[c] * x[c];
        }
        if (pp == 0.0 || xx == 0.0) {
            throw DegenerateInputError("cosine_embedding_loss: zero-norm vector in row " +
                                       std::to_string(i));
        }
        const double np = std::sqrt(pp);
        const double nx = std::sqrt(xx);
        const double cos = px / (np * nx);
        loss += 1.0 - cos;
        if (d_fp != nullptr) {
            // d(1-cos)/dp = -(w - cos*u)/|p| with u = p/|p|, w = x/|x|
            double* dst = d_fp->row_ptr(i);
            const double s = grad_scale / static_cast<double>(B);
            for (int c = 0; c < d; ++c) {
                const double u = p[c] / np;
                const double w = x[c] / nx;
                dst[c] += -s * (w - cos * u) / np;
            }
        }
    }
    return loss / static_cast<double>(B);
}

double refine_loss(const NumericArray& z_hat0, const NumericArray& x, RefinerParams& refiner,
                   const EncoderParams& encoder, bool backward, double grad_scale) {
    const NumericArray fx = encoder.encode(x);
    if (!backward) {
        return cosine_embedding_loss(refiner.refine(z_hat0), fx);
    }
    Mlp::Cache cache;
    const NumericArray fp = refiner.stack.forward_cached(z_hat0, cache);
    NumericArray d_fp = NumericArray::zeros(fp.shape);
    const double loss = cosine_embedding_loss(fp, fx, &d_fp, grad_scale);
    refiner.stack.backward(cache, d_fp);
    return loss;
}

RefinerParams train_refiner(const SyntheticDataset& ds, const DenoiserBundle& denoiser,
                            const EncoderParams& encoder, const NoiseSchedule& sched,
                            const StepIndexPlan& plan, const RefinerTrainConfig& cfg,
                            TrainStats* stats) {
    if (cfg.batch_size < 1 || cfg.max_steps < 0 || cfg.learning_rate <= 0.0) {
        throw ConfigError("train_refiner: non-positive training parameter");
    }
    const auto items = split_items(ds, Split::train);
    if (items.empty()) throw ConfigError("train_refiner: empty training split");
    const int N = static_cast<int>(items.size());
    const int d_z = encoder.d_z();

    const std::uint64_t enc_before = params_checksum(encoder.parameters());
    const std::uint64_t dn_before = params_checksum(denoiser.params.parameters());

    RefinerParams refiner(d_z, cfg.hidden, encoder.d_f());
    Rng init_rng(derive_seed(cfg.seed, "refiner-init"));
    refiner.init(init_rng);

    AdamConfig acfg;
    acfg.learning_rate = cfg.learning_rate;
    acfg.max_grad_norm = cfg.max_grad_norm;
    Adam opt(acfg, refiner.parameters());

    Rng pick_rng(derive_seed(cfg.seed, "refiner-batches"));
    Rng sample_rng(derive_seed(cfg.seed, "refiner-sampling"));

    for (int step = 0; step < cfg.max_steps; ++step) {
        std::vector<int> pick;
        pick.reserve(static_cast<std::size_t>(cfg.batch_size));
        for (int b = 0; b < cfg.batch_size; ++b) pick.push_back(pick_rng.uniform_int(N));

        NumericArray z_hat = NumericArray::zeros({cfg.batch_size, d_z});
        for (int b = 0; b < cfg.batch_size; ++b) {
            const auto& item = items[static_cast<std::size_t>(pick[static_cast<std::size_t>(b)])];
            const NumericArray z = sample_latent(
                denoiser, ds.identities[static_cast<std::size_t>(item.global_identity)].prompt,
                sched, plan, sample_rng);
            double* dst = z_hat.row_ptr(b);
            for (int j = 0; j < d_z; ++j) dst[j] = z.data[static_cast<std::size_t>(j)];
        }
        const NumericArray x = gather_images(ds, items, pick);
        const double loss = refine_loss(z_hat, x, refiner, encoder, true);
        if (!std::isfinite(loss)) throw DivergenceError("train_refiner: non-finite loss");
        opt.step();
        if (stats) stats->step_losses.push_back(loss);
    }

    if (params_checksum(encoder.parameters()) != enc_before) {
        throw IntegrityError("train_refiner mutated the frozen encoder");
    }
    if (params_checksum(denoiser.params.parameters()) != dn_before) {
        throw IntegrityError("train_refiner mutated the frozen denoiser");
    }
    return refiner;
}

}  // namespace difrec
