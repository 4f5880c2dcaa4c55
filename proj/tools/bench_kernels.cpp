#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <vector>

#include "difrec/kernels.hpp"
#include "difrec/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using Clock = std::chrono::steady_clock;

double time_ms(const std::function<void()>& fn, int reps) {
    fn();  // warm-up
    const auto start = Clock::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto stop = Clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count() / reps;
}

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("openmp: %d threads\n", omp_get_max_threads());
#else
    std::printf("openmp: compiled out\n");
#endif
    std::printf("%-14s %8s %12s %12s %8s %6s\n", "kernel", "size", "serial_ms", "parallel_ms",
                "speedup", "bits");

    difrec::Rng rng(20240817);
    bool all_equal = true;

    for (int n : {64, 128, 256, 512}) {
        std::vector<double> a(static_cast<std::size_t>(n) * n);
        std::vector<double> b(static_cast<std::size_t>(n) * n);
        for (double& v : a) v = rng.normal();
        for (double& v : b) v = rng.normal();
        std::vector<double> c_serial(a.size()), c_par(a.size());

        const int reps = n <= 128 ? 20 : 5;
        const double t_serial = time_ms(
            [&] { difrec::kernels::matmul_serial(a.data(), b.data(), c_serial.data(), n, n, n); },
            reps);
        const double t_par = time_ms(
            [&] { difrec::kernels::matmul(a.data(), b.data(), c_par.data(), n, n, n); }, reps);
        const bool equal = bits_equal(c_serial, c_par);
        all_equal = all_equal && equal;
        std::printf("%-14s %8d %12.3f %12.3f %8.2f %6s\n", "matmul", n, t_serial, t_par,
                    t_serial / t_par, equal ? "same" : "DIFF");
    }

    for (std::size_t count : {1u << 14, 1u << 18, 1u << 22}) {
        std::vector<double> x(count), g(count);
        for (double& v : x) v = rng.normal();
        for (double& v : g) v = rng.normal();
        std::vector<double> y_serial(count), y_par(count), dx_serial(count), dx_par(count);

        const double t_serial = time_ms(
            [&] {
                difrec::kernels::prelu_forward_serial(x.data(), 0.25, y_serial.data(), count);
                difrec::kernels::prelu_backward_serial(x.data(), 0.25, g.data(), dx_serial.data(),
                                                       count);
            },
            10);
        const double t_par = time_ms(
            [&] {
                difrec::kernels::prelu_forward(x.data(), 0.25, y_par.data(), count);
                difrec::kernels::prelu_backward(x.data(), 0.25, g.data(), dx_par.data(), count);
            },
            10);
        const bool equal = bits_equal(y_serial, y_par) && bits_equal(dx_serial, dx_par);
        all_equal = all_equal && equal;
        std::printf("%-14s %8zu %12.3f %12.3f %8.2f %6s\n", "prelu_fwd+bwd", count, t_serial,
                    t_par, t_serial / t_par, equal ? "same" : "DIFF");
    }

    if (!all_equal) {
        std::printf("FAIL: parallel kernels diverged from the serial reference\n");
        return 1;
    }
    std::printf("all kernels bit-identical to the serial reference\n");
    return 0;
}
