#pragma once

#include <string>
#include <vector>

#include "difrec/array.hpp"
#include "difrec/rng.hpp"

namespace difrec {

/// Affine map on row batches: y = x W + b with W [in x out], b [out].
struct Linear {
    Parameter weight;
    Parameter bias;

    Linear(const std::string& name, int in, int out);

    int in_dim() const { return weight.value.shape[0]; }
    int out_dim() const { return weight.value.shape[1]; }

    void init_he(Rng& rng);

    NumericArray forward(const NumericArray& x, bool use_ema = false) const;
    // Accumulates weight/bias grads from upstream g [B x out]; returns dL/dx.
    NumericArray backward(const NumericArray& x, const NumericArray& g);

    std::vector<Parameter*> parameters() { return {&weight, &bias}; }
};

/// PReLU with a single learned slope shared across all elements.
struct Prelu {
    Parameter slope;

    explicit Prelu(const std::string& name, double init = 0.25);

    NumericArray forward(const NumericArray& x, bool use_ema = false) const;
    NumericArray backward(const NumericArray& x, const NumericArray& g);

    std::vector<Parameter*> parameters() { return {&slope}; }
};

/// Linear stack with a PReLU between consecutive linears and none after the
/// last: dims {d0, d1, ..., dn} gives n linears and n-1 activations.
struct Mlp {
    std::vector<Linear> linears;
    std::vector<Prelu> prelus;

    Mlp(const std::string& name, const std::vector<int>& dims);

    int in_dim() const { return linears.front().in_dim(); }
    int out_dim() const { return linears.back().out_dim(); }

    void init_he(Rng& rng);

    NumericArray forward(const NumericArray& x, bool use_ema = false) const;

    struct Cache {
        std::vector<NumericArray> inputs;   // input to each linear
        std::vector<NumericArray> preacts;  // output of each non-final linear
    };
    NumericArray forward_cached(const NumericArray& x, Cache& cache);
    NumericArray backward(const Cache& cache, const NumericArray& g);

    std::vector<Parameter*> parameters();
    std::vector<const Parameter*> parameters() const;
};

}  // namespace difrec
