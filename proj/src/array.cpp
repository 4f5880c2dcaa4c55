#include "difrec/array.hpp"

#include <cmath>
#include <cstring>
#include <sstream>
#include <utility>

#include "difrec/kernels.hpp"

namespace difrec {

namespace {

std::int64_t shape_product(const std::vector<int>& shape) {
    std::int64_t n = 1;
    for (int d : shape) {
        if (d < 0) throw DimensionError("negative dimension in shape");
        n *= d;
    }
    return n;
}

}  // namespace

NumericArray::NumericArray(std::vector<int> shape_, std::vector<double> data_)
    : shape(std::move(shape_)), data(std::move(data_)) {
    if (shape_product(shape) != static_cast<std::int64_t>(data.size())) {
        throw DimensionError("shape " + shape_str() + " does not match data length " +
                             std::to_string(data.size()));
    }
}

NumericArray NumericArray::zeros(std::vector<int> shape) {
    const auto n = shape_product(shape);
    return NumericArray(std::move(shape), std::vector<double>(static_cast<std::size_t>(n), 0.0));
}

NumericArray NumericArray::full(std::vector<int> shape, double value) {
    const auto n = shape_product(shape);
    return NumericArray(std::move(shape), std::vector<double>(static_cast<std::size_t>(n), value));
}

NumericArray NumericArray::from_vector(std::vector<double> values) {
    const int n = static_cast<int>(values.size());
    return NumericArray({n}, std::move(values));
}

NumericArray NumericArray::matrix(int rows, int cols, std::vector<double> values) {
    return NumericArray({rows, cols}, std::move(values));
}

std::int64_t NumericArray::numel() const { return static_cast<std::int64_t>(data.size()); }

int NumericArray::rows() const {
    if (ndim() != 2) throw DimensionError("rows() on array of shape " + shape_str());
    return shape[0];
}

int NumericArray::cols() const {
    if (ndim() != 2) throw DimensionError("cols() on array of shape " + shape_str());
    return shape[1];
}

bool NumericArray::all_finite() const {
    for (double v : data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void NumericArray::fill(double value) {
    for (double& v : data) v = value;
}

std::string NumericArray::shape_str() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << " x ";
        os << shape[i];
    }
    os << ']';
    return os.str();
}

Parameter::Parameter(std::string name_, NumericArray value_)
    : name(std::move(name_)),
      value(std::move(value_)),
      grad(NumericArray::zeros(value.shape)),
      ema_value(value) {}

void check_same_shape(const NumericArray& a, const NumericArray& b, const char* what) {
    if (!a.same_shape(b)) {
        throw DimensionError(std::string(what) + ": shape mismatch " + a.shape_str() + " vs " +
                             b.shape_str());
    }
}

NumericArray matmul(const NumericArray& a, const NumericArray& b) {
    const int m = a.rows(), k = a.cols();
    if (b.rows() != k) {
        throw DimensionError("matmul: inner dimensions " + a.shape_str() + " vs " + b.shape_str());
    }
    const int n = b.cols();
    NumericArray c = NumericArray::zeros({m, n});
    kernels::matmul(a.data.data(), b.data.data(), c.data.data(), m, k, n);
    return c;
}

void matmul_backward(const NumericArray& a, const NumericArray& b, const NumericArray& g,
                     NumericArray& da, NumericArray& db) {
    const int m = a.rows(), k = a.cols(), n = b.cols();
    if (b.rows() != k || g.rows() != m || g.cols() != n) {
        throw DimensionError("matmul_backward: inconsistent shapes " + a.shape_str() + ", " +
                             b.shape_str() + ", " + g.shape_str());
    }
    check_same_shape(da, a, "matmul_backward da");
    check_same_shape(db, b, "matmul_backward db");
    // da += g b^T: [m x n] * [k x n]^T
    NumericArray tmp = NumericArray::zeros({m, k});
    kernels::matmul_nt(g.data.data(), b.data.data(), tmp.data.data(), m, n, k);
    for (std::size_t i = 0; i < da.data.size(); ++i) da.data[i] += tmp.data[i];
    // db += a^T g
    kernels::matmul_tn_acc(a.data.data(), g.data.data(), db.data.data(), m, k, n);
}

NumericArray prelu(const NumericArray& x, double slope) {
    NumericArray y = NumericArray::zeros(x.shape);
    kernels::prelu_forward(x.data.data(), slope, y.data.data(), x.data.size());
    return y;
}

double cosine_similarity(const double* u, const double* v, int n) {
    double uv = 0.0, uu = 0.0, vv = 0.0;
    for (int i = 0; i < n; ++i) {
        uv += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    if (uu == 0.0 || vv == 0.0) {
        throw DegenerateInputError("cosine_similarity on zero vector");
    }
    return uv / (std::sqrt(uu) * std::sqrt(vv));
}

double cosine_similarity(const NumericArray& u, const NumericArray& v) {
    check_same_shape(u, v, "cosine_similarity");
    return cosine_similarity(u.data.data(), v.data.data(), static_cast<int>(u.data.size()));
}

double l2_norm(const NumericArray& a) {
    double s = 0.0;
    for (double v : a.data) s += v * v;
    return std::sqrt(s);
}

double l2_norm(const double* a, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += a[i] * a[i];
    return std::sqrt(s);
}

std::uint64_t bytes_checksum(const void* data, std::size_t len, std::uint64_t seed) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t params_checksum(const std::vector<const Parameter*>& params) {
    std::uint64_t h = 1469598103934665603ull;
    for (const Parameter* p : params) {
        h = bytes_checksum(p->name.data(), p->name.size(), h);
        h = bytes_checksum(p->value.data.data(), p->value.data.size() * sizeof(double), h);
    }
    return h;
}

std::uint64_t params_checksum(const std::vector<Parameter*>& params) {
    return params_checksum(std::vector<const Parameter*>(params.begin(), params.end()));
}

}  // namespace difrec
