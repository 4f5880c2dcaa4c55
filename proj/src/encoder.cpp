#include "difrec/encoder.hpp"

#include <algorithm>
#include <cmath>

#include "difrec/optim.hpp"

namespace difrec {

namespace {

constexpr double kCosClamp = 1.0 - 1e-7;

void renormalize_rows(NumericArray& w) {
    for (int r = 0; r < w.rows(); ++r) {
        double* row = w.row_ptr(r);
        double sq = 0.0;
        for (int c = 0; c < w.cols(); ++c) sq += row[c] * row[c];
        const double norm = std::sqrt(sq);
        if (norm == 0.0) throw DegenerateInputError("class weight row " + std::to_string(r) +
                                                    " has zero norm");
        for (int c = 0; c < w.cols(); ++c) row[c] /= norm;
    }
}

}  // namespace

double TrainStats::smoothed(std::size_t step, std::size_t window) const {
    if (step > step_losses.size() || window == 0 || step < window) {
        throw IndexError("smoothed loss: bad step/window");
    }
    double sum = 0.0;
    for (std::size_t i = step - window; i < step; ++i) sum += step_losses[i];
    return sum / static_cast<double>(window);
}

EncoderParams::EncoderParams(int image_dim, int hidden_z, int d_z, int hidden_f, int d_f,
                             int n_classes)
    : ez("ez", {image_dim, hidden_z, d_z}),
      ef("ef", {d_z, hidden_f, d_f}),
      class_weights("cls.w", NumericArray::zeros({n_classes, d_f})) {}

void EncoderParams::init(Rng& rng) {
    ez.init_he(rng);
    ef.init_he(rng);
    rng.fill_normal(class_weights.value);
    renormalize_rows(class_weights.value);
    class_weights.ema_value = class_weights.value;
}

std::vector<Parameter*> EncoderParams::parameters() {
    std::vector<Parameter*> ps = ez.parameters();
    for (Parameter* p : ef.parameters()) ps.push_back(p);
    ps.push_back(&class_weights);
    return ps;
}

std::vector<const Parameter*> EncoderParams::parameters() const {
    std::vector<const Parameter*> ps = ez.parameters();
    for (const Parameter* p : ef.parameters()) ps.push_back(p);
    ps.push_back(&class_weights);
    return ps;
}

double margin_loss(const NumericArray& features, const std::vector<int>& labels,
                   const MarginConfig& cfg, const NumericArray& class_weights,
                   NumericArray* d_features, NumericArray* d_class_weights, double grad_scale) {
    const int B = features.rows();
    const int d = features.cols();
    const int C = class_weights.rows();
    if (class_weights.cols() != d) {
        throw DimensionError("margin_loss: feature dim " + std::to_string(d) +
                             " vs class weight dim " + std::to_string(class_weights.cols()));
    }
    if (static_cast<int>(labels.size()) != B) {
        throw DimensionError("margin_loss: batch " + std::to_string(B) + " vs labels " +
                             std::to_string(labels.size()));
    }
    for (int y : labels) {
        if (y < 0 || y >= C) throw IndexError("margin_loss: label " + std::to_string(y) +
                                              " outside 0.." + std::to_string(C - 1));
    }
    const bool want_grad = d_features != nullptr || d_class_weights != nullptr;
    const double cos_m = std::cos(cfg.margin);
    const double sin_m = std::sin(cfg.margin);

    // Normalized copies and norms.
    std::vector<double> f_norm(static_cast<std::size_t>(B));
    NumericArray u = NumericArray::zeros({B, d});
    for (int i = 0; i < B; ++i) {
        const double* f = features.row_ptr(i);
        double sq = 0.0;
        for (int c = 0; c < d; ++c) sq += f[c] * f[c];
        const double norm = std::sqrt(sq);
        if (norm == 0.0) throw DegenerateInputError("margin_loss: zero-norm feature in batch row " +
                                                    std::to_string(i));
        f_norm[static_cast<std::size_t>(i)] = norm;
        double* ui = u.row_ptr(i);
        for (int c = 0; c < d; ++c) ui[c] = f[c] / norm;
    }
    std::vector<double> w_norm(static_cast<std::size_t>(C));
    NumericArray v = NumericArray::zeros({C, d});
    for (int j = 0; j < C; ++j) {
        const double* w = class_weights.row_ptr(j);
        double sq = 0.0;
        for (int c = 0; c < d; ++c) sq += w[c] * w[c];
        const double norm = std::sqrt(sq);
        if (norm == 0.0) throw DegenerateInputError("margin_loss: zero-norm class weight row " +
                                                    std::to_string(j));
        w_norm[static_cast<std::size_t>(j)] = norm;
        double* vj = v.row_ptr(j);
        for (int c = 0; c < d; ++c) vj[c] = w[c] / norm;
    }

    NumericArray cosines = NumericArray::zeros({B, C});
    NumericArray clamped = NumericArray::zeros({B, C});
    for (int i = 0; i < B; ++i) {
        const double* ui = u.row_ptr(i);
        double* ci = cosines.row_ptr(i);
        double* cl = clamped.row_ptr(i);
        for (int j = 0; j < C; ++j) {
            const double* vj = v.row_ptr(j);
            double dot = 0.0;
            for (int c = 0; c < d; ++c) dot += ui[c] * vj[c];
            if (dot > kCosClamp) {
                dot = kCosClamp;
                cl[j] = 1.0;
            } else if (dot < -kCosClamp) {
                dot = -kCosClamp;
                cl[j] = 1.0;
            }
            ci[j] = dot;
        }
    }

    double loss = 0.0;
    NumericArray dcos = want_grad ? NumericArray::zeros({B, C}) : NumericArray();
    std::vector<double> logits(static_cast<std::size_t>(C));
    for (int i = 0; i < B; ++i) {
        const int y = labels[static_cast<std::size_t>(i)];
        const double* ci = cosines.row_ptr(i);
        const double cy = ci[y];
        const double sy = std::sqrt(1.0 - cy * cy);
        for (int j = 0; j < C; ++j) {
            logits[static_cast<std::size_t>(j)] =
                cfg.scale * (j == y ? cy * cos_m - sy * sin_m : ci[j]);
        }
        double mx = logits[0];
        for (int j = 1; j < C; ++j) mx = std::max(mx, logits[static_cast<std::size_t>(j)]);
        double sum = 0.0;
        for (int j = 0; j < C; ++j) sum += std::exp(logits[static_cast<std::size_t>(j)] - mx);
        const double log_sum = std::log(sum) + mx;
        loss += log_sum - logits[static_cast<std::size_t>(y)];

        if (want_grad) {
            double* dci = dcos.row_ptr(i);
            const double* cl = clamped.row_ptr(i);
            for (int j = 0; j < C; ++j) {
                const double p = std::exp(logits[static_cast<std::size_t>(j)] - log_sum);
                const double dlogit = (p - (j == y ? 1.0 : 0.0)) / static_cast<double>(B);
                if (cl[j] != 0.0) {
                    dci[j] = 0.0;  // clamp is flat
                } else if (j == y) {
                    dci[j] = dlogit * cfg.scale * (cos_m + sin_m * cy / sy);
                } else {
                    dci[j] = dlogit * cfg.scale;
                }
            }
        }
    }
    loss /= static_cast<double>(B);

    if (want_grad) {
        for (int i = 0; i < B; ++i) {
            const double* ui = u.row_ptr(i);
            const double* dci = dcos.row_ptr(i);
            if (d_features != nullptr) {
                check_same_shape(*d_features, features, "margin_loss d_features");
                // du_i = sum_j dcos_ij v_j, then pull back through the
                // normalization: df = (du - (du.u) u)/|f|
                std::vector<double> du(static_cast<std::size_t>(d), 0.0);
                for (int j = 0; j < C; ++j) {
                    const double* vj = v.row_ptr(j);
                    const double w = dci[j];
                    if (w == 0.0) continue;
                    for (int c = 0; c < d; ++c) du[static_cast<std::size_t>(c)] += w * vj[c];
                }
                double du_dot_u = 0.0;
                for (int c = 0; c < d; ++c) du_dot_u += du[static_cast<std::size_t>(c)] * ui[c];
                double* dst = d_features->row_ptr(i);
                const double inv = grad_scale / f_norm[static_cast<std::size_t>(i)];
                for (int c = 0; c < d; ++c) {
                    dst[c] += inv * (du[static_cast<std::size_t>(c)] - du_dot_u * ui[c]);
                }
            }
            if (d_class_weights != nullptr) {
                check_same_shape(*d_class_weights, class_weights, "margin_loss d_class_weights");
                for (int j = 0; j < C; ++j) {
                    const double w = dci[j];
                    if (w == 0.0) continue;
                    const double* vj = v.row_ptr(j);
                    double dot = 0.0;
                    for (int c = 0; c < d; ++c) dot += ui[c] * vj[c];
                    double* dst = d_class_weights->row_ptr(j);
                    const double inv = grad_scale / w_norm[static_cast<std::size_t>(j)];
                    for (int c = 0; c < d; ++c) dst[c] += inv * w * (ui[c] - dot * vj[c]);
                }
            }
        }
    }
    return loss;
}

EncoderParams train_encoder(const SyntheticDataset& ds, const EncoderTrainConfig& cfg,
                            TrainStats* stats) {
    const auto items = split_items(ds, Split::train);
    if (items.empty()) throw ConfigError("train_encoder: empty training split");
    const int n_classes = ds.split_size(Split::train);
    if (n_classes < 2) throw ConfigError("train_encoder: need at least two identities");

    EncoderParams enc(ds.cfg.image_dim, cfg.hidden_z, cfg.d_z, cfg.hidden_f, cfg.d_f, n_classes);
    Rng init_rng(derive_seed(cfg.seed, "encoder-init"));
    enc.init(init_rng);

    AdamConfig acfg;
    acfg.learning_rate = cfg.learning_rate;
    Adam opt(acfg, enc.parameters());

    Rng batch_rng(derive_seed(cfg.seed, "encoder-batches"));
    std::vector<int> order(items.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        batch_rng.shuffle(order);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end =
                std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            std::vector<int> pick(order.begin() + static_cast<std::ptrdiff_t>(start),
                                  order.begin() + static_cast<std::ptrdiff_t>(end));
            NumericArray x = gather_images(ds, items, pick);
            std::vector<int> labels;
            labels.reserve(pick.size());
            for (int p : pick) labels.push_back(items[static_cast<std::size_t>(p)].label);

            Mlp::Cache ez_cache, ef_cache;
            NumericArray z = enc.ez.forward_cached(x, ez_cache);
            NumericArray f = enc.ef.forward_cached(z, ef_cache);
            NumericArray df = NumericArray::zeros(f.shape);
            const double loss = margin_loss(f, labels, cfg.margin, enc.class_weights.value, &df,
                                            &enc.class_weights.grad);
            if (!std::isfinite(loss)) throw DivergenceError("train_encoder: non-finite loss");
            NumericArray dz = enc.ef.backward(ef_cache, df);
            enc.ez.backward(ez_cache, dz);
            opt.step();
            renormalize_rows(enc.class_weights.value);
            if (stats) stats->step_losses.push_back(loss);
        }
    }
    return enc;
}

double nearest_class_accuracy(const EncoderParams& enc, const NumericArray& images,
                              const std::vector<int>& labels) {
    const NumericArray f = enc.encode(images);
    const NumericArray& w = enc.class_weights.value;
    int correct = 0;
    for (int i = 0; i < f.rows(); ++i) {
        int best = 0;
        double best_score = -2.0;
        for (int j = 0; j < w.rows(); ++j) {
            const double s = cosine_similarity(f.row_ptr(i), w.row_ptr(j), f.cols());
            if (s > best_score) {
                best_score = s;
                best = j;
            }
        }
        if (best == labels[static_cast<std::size_t>(i)]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(f.rows());
}

}  // namespace difrec
