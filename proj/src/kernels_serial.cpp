#include "difrec/kernels.hpp"

namespace difrec::kernels {

void matmul_serial(const double* a, const double* b, double* c, int m, int k, int n) {
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

void matmul_nt_serial(const double* a, const double* b, double* c, int m, int k, int n) {
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

void matmul_tn_acc_serial(const double* a, const double* g, double* c, int m, int k, int n) {
    for (int kk = 0; kk < k; ++kk) {
        double* ck = c + static_cast<std::size_t>(kk) * n;
        for (int i = 0; i < m; ++i) {
            const double aik = a[static_cast<std::size_t>(i) * k + kk];
            const double* gi = g + static_cast<std::size_t>(i) * n;
            for (int j = 0; j < n; ++j) ck[j] += aik * gi[j];
        }
    }
}

void add_row_vector_serial(double* y, const double* b, int m, int n) {
    for (int i = 0; i < m; ++i) {
        double* yi = y + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) yi[j] += b[j];
    }
}

void col_sum_acc_serial(const double* g, double* b, int m, int n) {
    for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int i = 0; i < m; ++i) acc += g[static_cast<std::size_t>(i) * n + j];
        b[j] += acc;
    }
}

void prelu_forward_serial(const double* x, double slope, double* y, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
        const double v = x[i];
        y[i] = v > 0.0 ? v : slope * v;
    }
}

double prelu_backward_serial(const double* x, double slope, const double* g, double* dx,
                             std::size_t count) {
    double dslope = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double v = x[i];
        if (v > 0.0) {
            dx[i] = g[i];
        } else {
            dx[i] = g[i] * slope;
            dslope += g[i] * v;
        }
    }
    return dslope;
}

}  // namespace difrec::kernels
