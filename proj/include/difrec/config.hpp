#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "difrec/errors.hpp"

namespace difrec {

/// Flat run configuration; one key per field, defaults as written here.
/// Parsing rejects unknown and duplicate keys; validate() enforces every
/// module precondition up front.
struct RunConfig {
    std::uint64_t seed = 1;

    // synthetic world
    int n_train_ids = 64;
    int n_val_ids = 32;
    int n_test_ids = 32;
    int samples_per_id = 20;
    int image_dim = 128;
    int attr_count = 18;
    double within_id_noise = 0.3;

    // encoder
    int d_z = 32;
    int d_f = 512;
    int encoder_hidden_z = 128;
    int encoder_hidden_f = 256;
    double margin = 0.3;
    double scale = 16.0;
    int encoder_epochs = 20;
    int encoder_batch = 32;
    double encoder_lr = 1e-3;

    // schedule
    int T = 200;
    double beta_start = 1e-4;
    double beta_end = 0.02;
    int T_tilde = 20;

    // diffusion
    int d_t = 32;
    int d_p = 8;
    int d_c = 64;
    int denoiser_hidden = 256;
    int denoiser_depth = 3;
    double diffusion_lr = 1e-4;
    double finetune_lr = 5e-5;
    int diffusion_batch = 4;
    int grad_accum_steps = 4;
    int diffusion_steps = 3000;
    int finetune_steps = 0;
    double max_grad_norm = 1.0;
    double ema_decay = 0.999;

    // refiner
    int refiner_hidden = 256;
    int refiner_batch = 4;
    int refiner_steps = 2000;
    double refiner_lr = 1e-3;

    // prompts
    std::vector<std::string> attr_mask;  // defaults to the 18-name identity mask

    // eval
    int eval_pairs = 2000;
    int eval_lists = 5;
    int eval_probes = 100;
    int eval_prompt_samples = 16;
    int finetune_val_pairs = 400;

    RunConfig();
};

RunConfig parse_run_config_text(const std::string& text, const std::string& origin);
RunConfig load_run_config(const std::string& path);

void validate_config(const RunConfig& cfg);

// Fixed-order key=value rendering; the identity the config hash is over.
std::string canonical_config_text(const RunConfig& cfg);
std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace difrec
