#pragma once

#include <cstddef>

// Dense kernels behind the array layer. Each kernel has two
// implementations: the OpenMP one used by default and a serial reference
// kept for testing and benchmarking. Parallel loops split over output rows
// only, and every output element is accumulated in the same index order in
// both variants, so the two are bit-identical for any thread count.

namespace difrec::kernels {

// c[m x n] = a[m x k] * b[k x n]
void matmul(const double* a, const double* b, double* c, int m, int k, int n);
void matmul_serial(const double* a, const double* b, double* c, int m, int k, int n);

// c[m x n] = a[m x k] * b[n x k]^T   (rows-by-rows dot products)
void matmul_nt(const double* a, const double* b, double* c, int m, int k, int n);
void matmul_nt_serial(const double* a, const double* b, double* c, int m, int k, int n);

// c[k x n] += a[m x k]^T * g[m x n]
void matmul_tn_acc(const double* a, const double* g, double* c, int m, int k, int n);
void matmul_tn_acc_serial(const double* a, const double* g, double* c, int m, int k, int n);

// y[i,:] += b for every row of y[m x n]
void add_row_vector(double* y, const double* b, int m, int n);
void add_row_vector_serial(double* y, const double* b, int m, int n);

// b[n] += column sums of g[m x n]
void col_sum_acc(const double* g, double* b, int m, int n);
void col_sum_acc_serial(const double* g, double* b, int m, int n);

// y = max(0,x) + slope*min(0,x), elementwise over count values
void prelu_forward(const double* x, double slope, double* y, std::size_t count);
void prelu_forward_serial(const double* x, double slope, double* y, std::size_t count);

// dx = g * (x > 0 ? 1 : slope); returns d(loss)/d(slope) = sum over x<=0 of g*x
double prelu_backward(const double* x, double slope, const double* g, double* dx,
                      std::size_t count);
double prelu_backward_serial(const double* x, double slope, const double* g, double* dx,
                             std::size_t count);

}  // namespace difrec::kernels
