#include "difrec/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "difrec/checkpoint.hpp"
#include "difrec/diffusion.hpp"
#include "difrec/encoder.hpp"
#include "difrec/errors.hpp"
#include "difrec/eval.hpp"
#include "difrec/refiner.hpp"
#include "difrec/synthworld.hpp"

namespace difrec {

namespace {

namespace fs = std::filesystem;

void emit_metric(const std::string& name, double value) {
    std::printf("metric=%s value=%.17g\n", name.c_str(), value);
    std::fflush(stdout);
}

WorldConfig world_config(const RunConfig& cfg) {
    WorldConfig wc;
    wc.n_train_ids = cfg.n_train_ids;
    wc.n_val_ids = cfg.n_val_ids;
    wc.n_test_ids = cfg.n_test_ids;
    wc.samples_per_id = cfg.samples_per_id;
    wc.image_dim = cfg.image_dim;
    wc.attr_count = cfg.attr_count;
    wc.within_id_noise = cfg.within_id_noise;
    wc.seed = derive_seed(cfg.seed, "synth");
    return wc;
}

// World with each identity's prompt reduced to the identity-relevant
// attribute subset — the conditioning vector every downstream stage sees.
SyntheticDataset load_world(const RunConfig& cfg) {
    SyntheticDataset ds = generate_world(world_config(cfg));
    AttributeTable header;
    header.names = synthetic_attribute_names(cfg.attr_count);
    const std::vector<int> sel = resolve_attribute_mask(header, cfg.attr_mask);
    for (auto& id : ds.identities) {
        PromptVector p;
        p.selected.reserve(sel.size());
        for (int j : sel) p.selected.push_back(id.prompt.selected[static_cast<std::size_t>(j)]);
        id.prompt = std::move(p);
    }
    return ds;
}

NoiseSchedule schedule_from(const RunConfig& cfg) {
    return make_linear_schedule(cfg.T, cfg.beta_start, cfg.beta_end);
}

DenoiserArch arch_from(const RunConfig& cfg) {
    DenoiserArch arch;
    arch.T = cfg.T;
    arch.d_z = cfg.d_z;
    arch.d_t = cfg.d_t;
    arch.K = static_cast<int>(cfg.attr_mask.size());
    arch.d_p = cfg.d_p;
    arch.d_c = cfg.d_c;
    arch.hidden = cfg.denoiser_hidden;
    arch.depth = cfg.denoiser_depth;
    return arch;
}

EncoderParams encoder_shell(const RunConfig& cfg) {
    return EncoderParams(cfg.image_dim, cfg.encoder_hidden_z, cfg.d_z, cfg.encoder_hidden_f,
                         cfg.d_f, cfg.n_train_ids);
}

std::string ckpt_path(const std::string& out_dir, const char* name) {
    return (fs::path(out_dir) / name).string();
}

Checkpoint need_checkpoint(const std::string& path, const std::string& component,
                           std::uint64_t hash, const char* produce_with) {
    if (!fs::exists(path)) {
        throw IntegrityError("missing " + component + " checkpoint " + path + "; run " +
                             produce_with + " first");
    }
    return load_checkpoint(path, component, hash);
}

EncoderParams load_encoder(const RunConfig& cfg, const std::string& out_dir) {
    EncoderParams enc = encoder_shell(cfg);
    const Checkpoint ck = need_checkpoint(ckpt_path(out_dir, "encoder.ckpt"), "encoder",
                                          config_hash(cfg), "train-encoder");
    assign_parameters(ck, enc.parameters());
    return enc;
}

DenoiserBundle load_denoiser(const RunConfig& cfg, const std::string& out_dir) {
    DenoiserBundle bundle(arch_from(cfg));
    const Checkpoint ck = need_checkpoint(ckpt_path(out_dir, "denoiser.ckpt"), "denoiser",
                                          config_hash(cfg), "train-diffusion");
    assign_parameters(ck, bundle.params.parameters());
    const CheckpointBlock& mu = ck.require("latent.mu");
    const CheckpointBlock& sigma = ck.require("latent.sigma");
    if (mu.value.shape != bundle.latent_mu.shape ||
        sigma.value.shape != bundle.latent_sigma.shape) {
        throw IntegrityError("denoiser checkpoint latent stats have the wrong shape");
    }
    bundle.latent_mu = mu.value;
    bundle.latent_sigma = sigma.value;
    return bundle;
}

RefinerParams load_refiner(const RunConfig& cfg, const std::string& out_dir) {
    RefinerParams refiner(cfg.d_z, cfg.refiner_hidden, cfg.d_f);
    const Checkpoint ck = need_checkpoint(ckpt_path(out_dir, "refiner.ckpt"), "refiner",
                                          config_hash(cfg), "train-refiner");
    assign_parameters(ck, refiner.parameters());
    return refiner;
}

// Mean same-identity cosine minus mean different-identity cosine of encoder
// features over one split.
double feature_cosine_margin(const EncoderParams& enc, const SyntheticDataset& ds, Split split) {
    const auto items = split_items(ds, split);
    const NumericArray feats = enc.encode(gather_images(ds, items));
    const int n = feats.rows();
    const int d = feats.cols();
    NumericArray unit = feats;
    for (int i = 0; i < n; ++i) {
        double* row = unit.row_ptr(i);
        const double nrm = l2_norm(row, d);
        if (nrm == 0.0) throw DegenerateInputError("zero-norm feature in cosine margin");
        for (int j = 0; j < d; ++j) row[j] /= nrm;
    }
    double same_sum = 0.0, diff_sum = 0.0;
    long same_n = 0, diff_n = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double dot = 0.0;
            const double* a = unit.row_ptr(i);
            const double* b = unit.row_ptr(j);
            for (int c = 0; c < d; ++c) dot += a[c] * b[c];
            if (items[static_cast<std::size_t>(i)].label ==
                items[static_cast<std::size_t>(j)].label) {
                same_sum += dot;
                ++same_n;
            } else {
                diff_sum += dot;
                ++diff_n;
            }
        }
    }
    if (same_n == 0 || diff_n == 0) {
        throw ConfigError("cosine margin needs both pair kinds in the split");
    }
    return same_sum / static_cast<double>(same_n) - diff_sum / static_cast<double>(diff_n);
}

// Estimated prompt latent per identity: the mean of `draws` independent
// reverse passes. Pairs sharing a prompt identity share the estimate, and
// seeds hash (tag, identity, draw) so lists stay reproducible regardless of
// pair composition.
NumericArray averaged_prompt_latent(const SyntheticDataset& ds, int gid, int draws,
                                    const DenoiserBundle& bundle, const NoiseSchedule& sched,
                                    const StepIndexPlan& plan, std::uint64_t master,
                                    const std::string& tag) {
    NumericArray z = NumericArray::zeros({bundle.params.arch.d_z});
    for (int m = 0; m < draws; ++m) {
        const std::uint64_t idx =
            (static_cast<std::uint64_t>(gid) << 32) | static_cast<std::uint64_t>(m);
        Rng rng(derive_seed(master, tag, idx));
        const NumericArray zi = sample_latent(
            bundle, ds.identities[static_cast<std::size_t>(gid)].prompt, sched, plan, rng);
        for (std::size_t j = 0; j < z.data.size(); ++j) z.data[j] += zi.data[j] / draws;
    }
    return z;
}

NumericArray sample_pair_latents(const SyntheticDataset& ds, const std::vector<SplitItem>& items,
                                 const PairList& pairs, const DenoiserBundle& bundle,
                                 const NoiseSchedule& sched, const StepIndexPlan& plan,
                                 std::uint64_t master, const std::string& tag, int draws) {
    const int n = static_cast<int>(pairs.entries.size());
    NumericArray z = NumericArray::zeros({n, bundle.params.arch.d_z});
    std::map<int, NumericArray> cache;
    for (int i = 0; i < n; ++i) {
        const auto& e = pairs.entries[static_cast<std::size_t>(i)];
        const int gid = items[static_cast<std::size_t>(e.prompt_item)].global_identity;
        auto it = cache.find(gid);
        if (it == cache.end()) {
            it = cache.emplace(gid, averaged_prompt_latent(ds, gid, draws, bundle, sched, plan,
                                                           master, tag))
                     .first;
        }
        double* dst = z.row_ptr(i);
        for (int j = 0; j < z.cols(); ++j) dst[j] = it->second.data[static_cast<std::size_t>(j)];
    }
    return z;
}

NumericArray gather_pair_images(const SyntheticDataset& ds, const std::vector<SplitItem>& items,
                                const PairList& pairs) {
    std::vector<int> pick;
    pick.reserve(pairs.entries.size());
    for (const auto& e : pairs.entries) pick.push_back(e.image_item);
    return gather_images(ds, items, pick);
}

std::vector<int> pair_labels(const PairList& pairs) {
    std::vector<int> labels;
    labels.reserve(pairs.entries.size());
    for (const auto& e : pairs.entries) labels.push_back(e.label);
    return labels;
}

std::vector<double> row_cosines(const NumericArray& a, const NumericArray& b) {
    check_same_shape(a, b, "row_cosines");
    std::vector<double> out(static_cast<std::size_t>(a.rows()));
    for (int i = 0; i < a.rows(); ++i) {
        out[static_cast<std::size_t>(i)] = cosine_similarity(a.row_ptr(i), b.row_ptr(i), a.cols());
    }
    return out;
}

// Verification scores for one pair list along both routes: raw compares the
// sampled latent against E_z(x); refined compares R(latent) against E(x).
struct RouteScores {
    std::vector<double> raw;
    std::vector<double> refined;  // empty when no refiner is given
};

RouteScores pair_route_scores(const SyntheticDataset& ds, const std::vector<SplitItem>& items,
                              const PairList& pairs, const DenoiserBundle& bundle,
                              const EncoderParams& enc, const RefinerParams* refiner,
                              const NoiseSchedule& sched, const StepIndexPlan& plan,
                              std::uint64_t master, const std::string& tag, int draws) {
    const NumericArray z_hat =
        sample_pair_latents(ds, items, pairs, bundle, sched, plan, master, tag, draws);
    const NumericArray x = gather_pair_images(ds, items, pairs);
    RouteScores rs;
    rs.raw = row_cosines(z_hat, enc.encode_z(x));
    if (refiner) rs.refined = row_cosines(refiner->refine(z_hat), enc.encode(x));
    return rs;
}

double self_thresholded_accuracy(const std::vector<double>& scores,
                                 const std::vector<int>& labels) {
    const RocCurve curve = roc(scores, labels);
    return verification_accuracy(scores, labels, select_threshold(curve));
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw IoError("failed to write " + path);
}

}  // namespace

void cmd_synth_gen(const RunConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const SyntheticDataset ds = generate_world(world_config(cfg));

    save_attribute_file(export_attribute_table(ds),
                        (fs::path(out_dir) / "synth_attributes.txt").string());

    std::string csv = "image,identity,split";
    for (int j = 0; j < ds.cfg.image_dim; ++j) csv += ",v" + std::to_string(j);
    csv += '\n';
    char cell[64];
    for (int row = 0; row < ds.images.rows(); ++row) {
        const int gid = ds.identity_of_sample(row);
        Split split = Split::train;
        if (gid >= ds.cfg.n_train_ids + ds.cfg.n_val_ids) {
            split = Split::test;
        } else if (gid >= ds.cfg.n_train_ids) {
            split = Split::val;
        }
        std::snprintf(cell, sizeof cell, "img_%06d,%d,%s", row, gid, split_name(split));
        csv += cell;
        const double* v = ds.images.row_ptr(row);
        for (int j = 0; j < ds.cfg.image_dim; ++j) {
            std::snprintf(cell, sizeof cell, ",%.17g", v[j]);
            csv += cell;
        }
        csv += '\n';
    }
    write_text_file((fs::path(out_dir) / "synth_images.csv").string(), csv);

    emit_metric("synth_identities", ds.cfg.total_ids());
    emit_metric("synth_samples", ds.cfg.total_samples());
    emit_metric("synth_prompt_collision_pairs", ds.prompt_collision_pairs);
}

void cmd_train_encoder(const RunConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const SyntheticDataset ds = load_world(cfg);

    EncoderTrainConfig tc;
    tc.hidden_z = cfg.encoder_hidden_z;
    tc.d_z = cfg.d_z;
    tc.hidden_f = cfg.encoder_hidden_f;
    tc.d_f = cfg.d_f;
    tc.margin.scale = cfg.scale;
    tc.margin.margin = cfg.margin;
    tc.epochs = cfg.encoder_epochs;
    tc.batch_size = cfg.encoder_batch;
    tc.learning_rate = cfg.encoder_lr;
    tc.seed = cfg.seed;

    TrainStats stats;
    const EncoderParams enc = train_encoder(ds, tc, &stats);

    const auto train = split_items(ds, Split::train);
    std::vector<int> labels;
    labels.reserve(train.size());
    for (const auto& it : train) labels.push_back(it.label);
    const double train_acc = nearest_class_accuracy(enc, gather_images(ds, train), labels);
    const double val_margin = feature_cosine_margin(enc, ds, Split::val);

    Checkpoint ck;
    ck.component = "encoder";
    ck.config_hash = config_hash(cfg);
    ck.blocks = parameter_blocks(enc.parameters());
    save_checkpoint(ckpt_path(out_dir, "encoder.ckpt"), ck);

    emit_metric("encoder_final_loss", stats.step_losses.back());
    emit_metric("encoder_train_acc", train_acc);
    emit_metric("encoder_val_cos_margin", val_margin);
}

void cmd_train_diffusion(const RunConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const SyntheticDataset ds = load_world(cfg);
    const EncoderParams enc = load_encoder(cfg, out_dir);
    const std::uint64_t enc_before = params_checksum(enc.parameters());

    const NoiseSchedule sched = schedule_from(cfg);
    const StepIndexPlan plan = make_step_plan(sched, cfg.T_tilde);
    const DenoiserArch arch = arch_from(cfg);
    const auto val = split_items(ds, Split::val);
    const PairList val_pairs = build_pairs(val, cfg.finetune_val_pairs,
                                           derive_seed(cfg.seed, "diffusion-val"), Split::val);

    auto val_raw_accuracy = [&](const DenoiserBundle& bundle) {
        const RouteScores rs = pair_route_scores(ds, val, val_pairs, bundle, enc, nullptr, sched,
                                                 plan, cfg.seed, "diffusion-val-sample",
                                                 cfg.eval_prompt_samples);
        return self_thresholded_accuracy(rs.raw, pair_labels(val_pairs));
    };

    DiffusionTrainConfig tc;
    tc.learning_rate = cfg.diffusion_lr;
    tc.batch_size = cfg.diffusion_batch;
    tc.grad_accum_steps = cfg.grad_accum_steps;
    tc.max_steps = cfg.diffusion_steps;
    tc.max_grad_norm = cfg.max_grad_norm;
    tc.ema_decay = cfg.ema_decay;
    tc.seed = cfg.seed;

    TrainStats stats;
    DenoiserBundle bundle = train_diffusion(ds, enc, tc, sched, arch, &stats);
    double selected_phase = 1.0;

    if (cfg.finetune_steps > 0) {
        const double acc_phase1 = val_raw_accuracy(bundle);
        DiffusionTrainConfig ft = tc;
        ft.learning_rate = cfg.finetune_lr;
        ft.max_steps = cfg.finetune_steps;
        const DenoiserBundle tuned = train_diffusion(ds, enc, ft, sched, arch, &stats, &bundle);
        const double acc_tuned = val_raw_accuracy(tuned);
        emit_metric("diffusion_val_acc_phase1", acc_phase1);
        emit_metric("diffusion_val_acc_finetune", acc_tuned);
        if (acc_tuned >= acc_phase1) {
            bundle = tuned;
            selected_phase = 2.0;
        }
    }

    Checkpoint ck;
    ck.component = "denoiser";
    ck.config_hash = config_hash(cfg);
    ck.blocks = parameter_blocks(std::as_const(bundle.params).parameters());
    ck.blocks.push_back(CheckpointBlock{"latent.mu", bundle.latent_mu});
    ck.blocks.push_back(CheckpointBlock{"latent.sigma", bundle.latent_sigma});
    save_checkpoint(ckpt_path(out_dir, "denoiser.ckpt"), ck);

    const std::size_t steps = stats.step_losses.size();
    if (steps >= 100) emit_metric("diffusion_loss_smoothed_100", stats.smoothed(100, 100));
    if (steps >= 2000) emit_metric("diffusion_loss_smoothed_2000", stats.smoothed(2000, 100));
    if (steps >= 1) emit_metric("diffusion_final_loss", stats.step_losses.back());
    emit_metric("diffusion_selected_phase", selected_phase);
    emit_metric("frozen_encoder", params_checksum(enc.parameters()) == enc_before ? 1.0 : 0.0);
}

void cmd_train_refiner(const RunConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const SyntheticDataset ds = load_world(cfg);
    const EncoderParams enc = load_encoder(cfg, out_dir);
    const DenoiserBundle bundle = load_denoiser(cfg, out_dir);
    const std::uint64_t enc_before = params_checksum(enc.parameters());
    const std::uint64_t dn_before = params_checksum(bundle.params.parameters());

    const NoiseSchedule sched = schedule_from(cfg);
    const StepIndexPlan plan = make_step_plan(sched, cfg.T_tilde);

    RefinerTrainConfig tc;
    tc.hidden = cfg.refiner_hidden;
    tc.batch_size = cfg.refiner_batch;
    tc.max_steps = cfg.refiner_steps;
    tc.learning_rate = cfg.refiner_lr;
    tc.max_grad_norm = cfg.max_grad_norm;
    tc.seed = cfg.seed;

    TrainStats stats;
    const RefinerParams refiner = train_refiner(ds, bundle, enc, sched, plan, tc, &stats);

    Checkpoint ck;
    ck.component = "refiner";
    ck.config_hash = config_hash(cfg);
    ck.blocks = parameter_blocks(refiner.parameters());
    save_checkpoint(ckpt_path(out_dir, "refiner.ckpt"), ck);

    if (!stats.step_losses.empty()) {
        emit_metric("refiner_final_loss", stats.step_losses.back());
    }
    emit_metric("frozen_encoder", params_checksum(enc.parameters()) == enc_before ? 1.0 : 0.0);
    emit_metric("frozen_denoiser",
                params_checksum(bundle.params.parameters()) == dn_before ? 1.0 : 0.0);
}

void cmd_eval_verify(const RunConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const SyntheticDataset ds = load_world(cfg);
    const EncoderParams enc = load_encoder(cfg, out_dir);
    const DenoiserBundle bundle = load_denoiser(cfg, out_dir);
    const RefinerParams refiner = load_refiner(cfg, out_dir);

    const NoiseSchedule sched = schedule_from(cfg);
    const StepIndexPlan plan = make_step_plan(sched, cfg.T_tilde);

    const auto val = split_items(ds, Split::val);
    const PairList val_pairs = build_pairs(val, cfg.eval_pairs,
                                           derive_seed(cfg.seed, "eval-verify-val"), Split::val);
    const RouteScores val_scores =
        pair_route_scores(ds, val, val_pairs, bundle, enc, &refiner, sched, plan, cfg.seed,
                          "eval-verify-val-sample", cfg.eval_prompt_samples);
    const std::vector<int> val_labels = pair_labels(val_pairs);
    const double thr_refined = select_threshold(roc(val_scores.refined, val_labels));
    const double thr_raw = select_threshold(roc(val_scores.raw, val_labels));
    emit_metric("verify_threshold_refined", thr_refined);
    emit_metric("verify_threshold_raw", thr_raw);

    const auto test = split_items(ds, Split::test);
    double refined_sum = 0.0, raw_sum = 0.0;
    for (int l = 0; l < cfg.eval_lists; ++l) {
        const PairList pairs =
            build_pairs(test, cfg.eval_pairs,
                        derive_seed(cfg.seed, "eval-verify-list", static_cast<std::uint64_t>(l)),
                        Split::test);
        const RouteScores rs =
            pair_route_scores(ds, test, pairs, bundle, enc, &refiner, sched, plan, cfg.seed,
                              "eval-verify-sample-l" + std::to_string(l), cfg.eval_prompt_samples);
        const std::vector<int> labels = pair_labels(pairs);

        const fs::path outp(out_dir);
        export_roc_csv(roc(rs.refined, labels),
                       (outp / ("roc_refined_l" + std::to_string(l) + ".csv")).string());
        export_roc_csv(roc(rs.raw, labels),
                       (outp / ("roc_raw_l" + std::to_string(l) + ".csv")).string());
        export_pair_scores_csv(pairs, rs.refined,
                               (outp / ("pairs_refined_l" + std::to_string(l) + ".csv")).string());
        export_pair_scores_csv(pairs, rs.raw,
                               (outp / ("pairs_raw_l" + std::to_string(l) + ".csv")).string());

        const double acc_refined = verification_accuracy(rs.refined, labels, thr_refined);
        const double acc_raw = verification_accuracy(rs.raw, labels, thr_raw);
        emit_metric("verify_refined_l" + std::to_string(l), acc_refined);
        emit_metric("verify_raw_l" + std::to_string(l), acc_raw);
        refined_sum += acc_refined;
        raw_sum += acc_raw;
    }
    emit_metric("verify_refined_mean", refined_sum / cfg.eval_lists);
    emit_metric("verify_raw_mean", raw_sum / cfg.eval_lists);
}

void cmd_eval_identify(const RunConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const SyntheticDataset ds = load_world(cfg);
    const EncoderParams enc = load_encoder(cfg, out_dir);
    const DenoiserBundle bundle = load_denoiser(cfg, out_dir);
    const RefinerParams refiner = load_refiner(cfg, out_dir);

    const NoiseSchedule sched = schedule_from(cfg);
    const StepIndexPlan plan = make_step_plan(sched, cfg.T_tilde);

    const auto test = split_items(ds, Split::test);
    std::vector<int> order(test.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    Rng pick_rng(derive_seed(cfg.seed, "eval-identify-pick"));
    pick_rng.shuffle(order);
    const int n = cfg.eval_probes;
    std::vector<int> pick(order.begin(), order.begin() + n);

    const NumericArray gallery = enc.encode(gather_images(ds, test, pick));

    NumericArray z_hat = NumericArray::zeros({n, cfg.d_z});
    std::map<int, NumericArray> cache;
    for (int i = 0; i < n; ++i) {
        const auto& item = test[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])];
        auto it = cache.find(item.global_identity);
        if (it == cache.end()) {
            it = cache.emplace(item.global_identity,
                               averaged_prompt_latent(ds, item.global_identity,
                                                      cfg.eval_prompt_samples, bundle, sched, plan,
                                                      cfg.seed, "eval-identify-sample"))
                     .first;
        }
        double* dst = z_hat.row_ptr(i);
        for (int j = 0; j < cfg.d_z; ++j) dst[j] = it->second.data[static_cast<std::size_t>(j)];
    }
    const NumericArray probes = refiner.refine(z_hat);

    const RankTable table = top_k(probes, gallery, n);
    export_rank_csv(table, (fs::path(out_dir) / "identify_ranks.csv").string());

    std::string csv = "k,accuracy\n";
    char line[64];
    bool monotone = true;
    double prev = 0.0;
    for (int k = 1; k <= n; ++k) {
        const double acc = identification_accuracy(table, k);
        if (acc < prev) monotone = false;
        prev = acc;
        std::snprintf(line, sizeof line, "%d,%.17g\n", k, acc);
        csv += line;
    }
    write_text_file((fs::path(out_dir) / "identify_topk.csv").string(), csv);

    emit_metric("identify_top1", identification_accuracy(table, 1));
    emit_metric("identify_top5", identification_accuracy(table, std::min(5, n)));
    emit_metric("identify_probes", n);
    emit_metric("identify_chance", 1.0 / n);
    emit_metric("identify_monotone", monotone ? 1.0 : 0.0);
}

}  // namespace difrec
