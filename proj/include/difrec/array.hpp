#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "difrec/errors.hpp"

namespace difrec {

/// Dense row-major array of 64-bit floats. The shape product always equals
/// the data length; every model quantity in the repository lives in one of
/// these.
struct NumericArray {
    std::vector<int> shape;
    std::vector<double> data;

    NumericArray() = default;
    NumericArray(std::vector<int> shape_, std::vector<double> data_);

    static NumericArray zeros(std::vector<int> shape);
    static NumericArray full(std::vector<int> shape, double value);
    static NumericArray from_vector(std::vector<double> values);
    static NumericArray matrix(int rows, int cols, std::vector<double> values);

    std::int64_t numel() const;
    int ndim() const { return static_cast<int>(shape.size()); }

    // 2-d accessors; rows()/cols() require ndim == 2.
    int rows() const;
    int cols() const;
    double& at(int i) { return data[static_cast<std::size_t>(i)]; }
    double at(int i) const { return data[static_cast<std::size_t>(i)]; }
    double& at(int i, int j) { return data[static_cast<std::size_t>(i) * cols() + j]; }
    double at(int i, int j) const { return data[static_cast<std::size_t>(i) * cols() + j]; }

    double* row_ptr(int i) { return data.data() + static_cast<std::size_t>(i) * cols(); }
    const double* row_ptr(int i) const { return data.data() + static_cast<std::size_t>(i) * cols(); }

    bool same_shape(const NumericArray& other) const { return shape == other.shape; }
    bool all_finite() const;
    void fill(double value);

    std::string shape_str() const;
};

/// Trainable weight block: current value, accumulated gradient, and the
/// exponential moving average of the value, all shape-locked together.
struct Parameter {
    std::string name;
    NumericArray value;
    NumericArray grad;
    NumericArray ema_value;

    Parameter() = default;
    Parameter(std::string name_, NumericArray value_);

    void zero_grad() { grad.fill(0.0); }
    std::int64_t numel() const { return value.numel(); }
};

void check_same_shape(const NumericArray& a, const NumericArray& b, const char* what);

// a [m x k] times b [k x n]; throws DimensionError on inner mismatch.
NumericArray matmul(const NumericArray& a, const NumericArray& b);

// Accumulates dL/da += g b^T and dL/db += a^T g for c = a b.
void matmul_backward(const NumericArray& a, const NumericArray& b, const NumericArray& g,
                     NumericArray& da, NumericArray& db);

// Elementwise max(0,x) + slope*min(0,x).
NumericArray prelu(const NumericArray& x, double slope);

// u.v / (|u||v|); throws DegenerateInputError when either norm is zero.
double cosine_similarity(const NumericArray& u, const NumericArray& v);
double cosine_similarity(const double* u, const double* v, int n);

double l2_norm(const NumericArray& a);
double l2_norm(const double* a, int n);

// FNV-1a over the raw bytes of each value block, in order. Used by the
// frozen-stage checks and the checkpoint format.
std::uint64_t params_checksum(const std::vector<const Parameter*>& params);
std::uint64_t params_checksum(const std::vector<Parameter*>& params);
std::uint64_t bytes_checksum(const void* data, std::size_t len, std::uint64_t seed = 1469598103934665603ull);

}  // namespace difrec
