#include "difrec/layers.hpp"

#include <cmath>

#include "difrec/kernels.hpp"

namespace difrec {

Linear::Linear(const std::string& name, int in, int out)
    : weight(name + ".w", NumericArray::zeros({in, out})),
      bias(name + ".b", NumericArray::zeros({out})) {
    if (in <= 0 || out <= 0) throw DimensionError("Linear " + name + ": non-positive dims");
}

void Linear::init_he(Rng& rng) {
    const double std = std::sqrt(2.0 / static_cast<double>(in_dim()));
    for (double& w : weight.value.data) w = std * rng.normal();
    weight.ema_value = weight.value;
    bias.value.fill(0.0);
    bias.ema_value = bias.value;
}

NumericArray Linear::forward(const NumericArray& x, bool use_ema) const {
    const NumericArray& w = use_ema ? weight.ema_value : weight.value;
    const NumericArray& b = use_ema ? bias.ema_value : bias.value;
    if (x.cols() != in_dim()) {
        throw DimensionError(weight.name + ": input " + x.shape_str() + " vs in_dim " +
                             std::to_string(in_dim()));
    }
    NumericArray y = NumericArray::zeros({x.rows(), out_dim()});
    kernels::matmul(x.data.data(), w.data.data(), y.data.data(), x.rows(), in_dim(), out_dim());
    kernels::add_row_vector(y.data.data(), b.data.data(), x.rows(), out_dim());
    return y;
}

NumericArray Linear::backward(const NumericArray& x, const NumericArray& g) {
    const int batch = x.rows();
    if (g.rows() != batch || g.cols() != out_dim()) {
        throw DimensionError(weight.name + ": upstream grad " + g.shape_str());
    }
    NumericArray dx = NumericArray::zeros({batch, in_dim()});
    kernels::matmul_nt(g.data.data(), weight.value.data.data(), dx.data.data(), batch, out_dim(),
                       in_dim());
    kernels::matmul_tn_acc(x.data.data(), g.data.data(), weight.grad.data.data(), batch, in_dim(),
                           out_dim());
    kernels::col_sum_acc(g.data.data(), bias.grad.data.data(), batch, out_dim());
    return dx;
}

Prelu::Prelu(const std::string& name, double init)
    : slope(name + ".a", NumericArray::full({1}, init)) {}

NumericArray Prelu::forward(const NumericArray& x, bool use_ema) const {
    const double a = use_ema ? slope.ema_value.data[0] : slope.value.data[0];
    NumericArray y = NumericArray::zeros(x.shape);
    kernels::prelu_forward(x.data.data(), a, y.data.data(), x.data.size());
    return y;
}

NumericArray Prelu::backward(const NumericArray& x, const NumericArray& g) {
    check_same_shape(x, g, "Prelu backward");
    NumericArray dx = NumericArray::zeros(x.shape);
    slope.grad.data[0] +=
        kernels::prelu_backward(x.data.data(), slope.value.data[0], g.data.data(),
                                dx.data.data(), x.data.size());
    return dx;
}

Mlp::Mlp(const std::string& name, const std::vector<int>& dims) {
    if (dims.size() < 2) throw DimensionError("Mlp " + name + ": needs at least two dims");
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        linears.emplace_back(name + ".l" + std::to_string(i), dims[i], dims[i + 1]);
        if (i + 2 < dims.size()) prelus.emplace_back(name + ".p" + std::to_string(i));
    }
}

void Mlp::init_he(Rng& rng) {
    for (auto& l : linears) l.init_he(rng);
}

NumericArray Mlp::forward(const NumericArray& x, bool use_ema) const {
    NumericArray h = linears[0].forward(x, use_ema);
    for (std::size_t i = 0; i < prelus.size(); ++i) {
        h = prelus[i].forward(h, use_ema);
        h = linears[i + 1].forward(h, use_ema);
    }
    return h;
}

NumericArray Mlp::forward_cached(const NumericArray& x, Cache& cache) {
    cache.inputs.clear();
    cache.preacts.clear();
    cache.inputs.push_back(x);
    NumericArray h = linears[0].forward(x);
    for (std::size_t i = 0; i < prelus.size(); ++i) {
        cache.preacts.push_back(h);
        h = prelus[i].forward(h);
        cache.inputs.push_back(h);
        h = linears[i + 1].forward(h);
    }
    return h;
}

NumericArray Mlp::backward(const Cache& cache, const NumericArray& g) {
    NumericArray grad = linears.back().backward(cache.inputs.back(), g);
    for (std::size_t i = prelus.size(); i-- > 0;) {
        grad = prelus[i].backward(cache.preacts[i], grad);
        grad = linears[i].backward(cache.inputs[i], grad);
    }
    return grad;
}

std::vector<Parameter*> Mlp::parameters() {
    std::vector<Parameter*> ps;
    for (std::size_t i = 0; i < linears.size(); ++i) {
        ps.push_back(&linears[i].weight);
        ps.push_back(&linears[i].bias);
        if (i < prelus.size()) ps.push_back(&prelus[i].slope);
    }
    return ps;
}

std::vector<const Parameter*> Mlp::parameters() const {
    std::vector<const Parameter*> ps;
    for (std::size_t i = 0; i < linears.size(); ++i) {
        ps.push_back(&linears[i].weight);
        ps.push_back(&linears[i].bias);
        if (i < prelus.size()) ps.push_back(&prelus[i].slope);
    }
    return ps;
}

}  // namespace difrec
