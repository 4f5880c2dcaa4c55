#pragma once

#include <cstdint>
#include <vector>

#include "difrec/layers.hpp"
#include "difrec/synthworld.hpp"

namespace difrec {

struct MarginConfig {
    double scale = 16.0;
    double margin = 0.3;  // radians
};

/// Recognition encoder split into the latent branch E_z and the feature
/// branch E_f; encode(x) == encode_f(encode_z(x)) holds bit-exactly because
/// that is literally how it is computed. class_weights are the margin-loss
/// classification head used only during training.
struct EncoderParams {
    Mlp ez;  // image_dim -> hidden_z -> d_z
    Mlp ef;  // d_z -> hidden_f -> d_f
    Parameter class_weights;  // [n_classes x d_f], rows kept unit-norm

    EncoderParams(int image_dim, int hidden_z, int d_z, int hidden_f, int d_f, int n_classes);

    void init(Rng& rng);

    int d_z() const { return ez.out_dim(); }
    int d_f() const { return ef.out_dim(); }

    NumericArray encode_z(const NumericArray& x) const { return ez.forward(x); }
    NumericArray encode_f(const NumericArray& z) const { return ef.forward(z); }
    NumericArray encode(const NumericArray& x) const { return ef.forward(ez.forward(x)); }

    std::vector<Parameter*> parameters();
    std::vector<const Parameter*> parameters() const;
};

// Additive-angular-margin softmax cross-entropy over cosine logits,
// averaged over the batch. Features and class rows are L2-normalized
// inside; the true-class angle gets +margin before scaling. When the grad
// outputs are non-null the (scaled) gradients are accumulated into them.
double margin_loss(const NumericArray& features, const std::vector<int>& labels,
                   const MarginConfig& cfg, const NumericArray& class_weights,
                   NumericArray* d_features = nullptr, NumericArray* d_class_weights = nullptr,
                   double grad_scale = 1.0);

struct EncoderTrainConfig {
    int hidden_z = 128;
    int d_z = 32;
    int hidden_f = 256;
    int d_f = 512;
    MarginConfig margin;
    int epochs = 20;
    int batch_size = 32;
    double learning_rate = 1e-3;
    std::uint64_t seed = 0;
};

struct TrainStats {
    std::vector<double> step_losses;

    double smoothed(std::size_t step, std::size_t window) const;
};

EncoderParams train_encoder(const SyntheticDataset& ds, const EncoderTrainConfig& cfg,
                            TrainStats* stats = nullptr);

// Fraction of items whose nearest class-weight row (by cosine) is their
// label; the trained-encoder sanity metric.
double nearest_class_accuracy(const EncoderParams& enc, const NumericArray& images,
                              const std::vector<int>& labels);

}  // namespace difrec
