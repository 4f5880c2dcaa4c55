#include "difrec/kernels.hpp"

#include <cstdint>

// Each parallel loop assigns whole output rows to threads and accumulates
// inner sums in ascending index order, exactly like the serial reference, so
// results do not depend on the thread count. Scalar reductions (the PReLU
// slope gradient) stay serial for the same reason.

namespace difrec::kernels {

namespace {
constexpr std::int64_t kParallelCutoff = 16 * 1024;  // flops below this run serially anyway
}

void matmul(const double* a, const double* b, double* c, int m, int k, int n) {
    const std::int64_t work = static_cast<std::int64_t>(m) * k * n;
#pragma omp parallel for schedule(static) if (work >= kParallelCutoff)
    for (int i = 0; i < m; ++i) {
        double* ci = c + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) ci[j] = 0.0;
        const double* ai = a + static_cast<std::size_t>(i) * k;
        for (int kk = 0; kk < k; ++kk) {
            const double aik = ai[kk];
            const double* bk = b + static_cast<std::size_t>(kk) * n;
            for (int j = 0; j < n; ++j) ci[j] += aik * bk[j];
        }
    }
}

void matmul_nt(const double* a, const double* b, double* c, int m, int k, int n) {
    const std::int64_t work = static_cast<std::int64_t>(m) * k * n;
#pragma omp parallel for schedule(static) if (work >= kParallelCutoff)
    for (int i = 0; i < m; ++i) {
        const double* ai = a + static_cast<std::size_t>(i) * k;
        double* ci = c + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const double* bj = b + static_cast<std::size_t>(j) * k;
            double acc = 0.0;
            for (int kk = 0; kk < k; ++kk) acc += ai[kk] * bj[kk];
            ci[j] = acc;
        }
    }
}

void matmul_tn_acc(const double* a, const double* g, double* c, int m, int k, int n) {
    const std::int64_t work = static_cast<std::int64_t>(m) * k * n;
#pragma omp parallel for schedule(static) if (work >= kParallelCutoff)
    for (int kk = 0; kk < k; ++kk) {
        double* ck = c + static_cast<std::size_t>(kk) * n;
        for (int i = 0; i < m; ++i) {
            const double aik = a[static_cast<std::size_t>(i) * k + kk];
            const double* gi = g + static_cast<std::size_t>(i) * n;
            for (int j = 0; j < n; ++j) ck[j] += aik * gi[j];
        }
    }
}

void add_row_vector(double* y, const double* b, int m, int n) {
    const std::int64_t work = static_cast<std::int64_t>(m) * n;
#pragma omp parallel for schedule(static) if (work >= kParallelCutoff)
    for (int i = 0; i < m; ++i) {
        double* yi = y + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) yi[j] += b[j];
    }
}

void col_sum_acc(const double* g, double* b, int m, int n) {
    const std::int64_t work = static_cast<std::int64_t>(m) * n;
#pragma omp parallel for schedule(static) if (work >= kParallelCutoff)
    for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int i = 0; i < m; ++i) acc += g[static_cast<std::size_t>(i) * n + j];
        b[j] += acc;
    }
}

void prelu_forward(const double* x, double slope, double* y, std::size_t count) {
    const std::int64_t work = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(static) if (work >= kParallelCutoff)
    for (std::int64_t i = 0; i < work; ++i) {
        const double v = x[i];
        y[i] = v > 0.0 ? v : slope * v;
    }
}

double prelu_backward(const double* x, double slope, const double* g, double* dx,
                      std::size_t count) {
    const std::int64_t work = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(static) if (work >= kParallelCutoff)
    for (std::int64_t i = 0; i < work; ++i) {
        dx[i] = x[i] > 0.0 ? g[i] : g[i] * slope;
    }
    // Fixed-order reduction keeps the slope gradient identical to the
    // serial reference.
    double dslope = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        if (x[i] <= 0.0) dslope += g[i] * x[i];
    }
    return dslope;
}

}  // namespace difrec::kernels
