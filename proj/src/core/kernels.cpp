#include "omlab/core/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace omlab::core::kernels {

namespace {

std::atomic<int> g_threads{0};

// Below this many multiply-adds the fork/join overhead dominates.
constexpr long long kParallelGrain = 1 << 15;

int resolve_threads() {
    int t = g_threads.load(std::memory_order_relaxed);
    if (t > 0) return t;
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

bool use_parallel(int m, int k, int n) {
#ifdef _OPENMP
    return resolve_threads() > 1 &&
           static_cast<long long>(m) * k * n >= kParallelGrain;
#else
    (void)m;
    (void)k;
    (void)n;
    return false;
#endif
}

inline void row_nn(const double* a, const double* b, double* c_row, int i, int k, int n,
                   bool accumulate) {
    if (!accumulate) std::memset(c_row, 0, sizeof(double) * n);
    const double* a_row = a + static_cast<std::size_t>(i) * k;
    for (int kk = 0; kk < k; ++kk) {
        const double av = a_row[kk];
        const double* b_row = b + static_cast<std::size_t>(kk) * n;
        for (int j = 0; j < n; ++j) c_row[j] += av * b_row[j];
    }
}

inline void row_nt(const double* a, const double* b, double* c_row, int i, int k, int n,
                   bool accumulate) {
    const double* a_row = a + static_cast<std::size_t>(i) * k;
    for (int j = 0; j < n; ++j) {
        const double* b_row = b + static_cast<std::size_t>(j) * k;
        double acc = 0.0;
        for (int kk = 0; kk < k; ++kk) acc += a_row[kk] * b_row[kk];
        if (accumulate)
            c_row[j] += acc;
        else
            c_row[j] = acc;
    }
}

inline void row_tn(const double* a, const double* b, double* c_row, int i, int m, int k,
                   int n, bool accumulate) {
    if (!accumulate) std::memset(c_row, 0, sizeof(double) * n);
    for (int kk = 0; kk < k; ++kk) {
        const double av = a[static_cast<std::size_t>(kk) * m + i];
        const double* b_row = b + static_cast<std::size_t>(kk) * n;
        for (int j = 0; j < n; ++j) c_row[j] += av * b_row[j];
    }
}

}  // namespace

void set_threads(int n) { g_threads.store(n < 0 ? 0 : n, std::memory_order_relaxed); }

int threads() { return resolve_threads(); }

void matmul_nn(const double* a, const double* b, double* c, int m, int k, int n,
               bool accumulate) {
    if (use_parallel(m, k, n)) {
#ifdef _OPENMP
#pragma omp parallel for num_threads(resolve_threads()) schedule(static)
        for (int i = 0; i < m; ++i)
            row_nn(a, b, c + static_cast<std::size_t>(i) * n, i, k, n, accumulate);
        return;
#endif
    }
    serial::matmul_nn(a, b, c, m, k, n, accumulate);
}

void matmul_nt(const double* a, const double* b, double* c, int m, int k, int n,
               bool accumulate) {
    if (use_parallel(m, k, n)) {
#ifdef _OPENMP
#pragma omp parallel for num_threads(resolve_threads()) schedule(static)
        for (int i = 0; i < m; ++i)
            row_nt(a, b, c + static_cast<std::size_t>(i) * n, i, k, n, accumulate);
        return;
#endif
    }
    serial::matmul_nt(a, b, c, m, k, n, accumulate);
}

void matmul_tn(const double* a, const double* b, double* c, int m, int k, int n,
               bool accumulate) {
    if (use_parallel(m, k, n)) {
#ifdef _OPENMP
#pragma omp parallel for num_threads(resolve_threads()) schedule(static)
        for (int i = 0; i < m; ++i)
            row_tn(a, b, c + static_cast<std::size_t>(i) * n, i, m, k, n, accumulate);
        return;
#endif
    }
    serial::matmul_tn(a, b, c, m, k, n, accumulate);
}

namespace serial {

void matmul_nn(const double* a, const double* b, double* c, int m, int k, int n,
               bool accumulate) {
    for (int i = 0; i < m; ++i)
        row_nn(a, b, c + static_cast<std::size_t>(i) * n, i, k, n, accumulate);
}

void matmul_nt(const double* a, const double* b, double* c, int m, int k, int n,
               bool accumulate) {
    for (int i = 0; i < m; ++i)
        row_nt(a, b, c + static_cast<std::size_t>(i) * n, i, k, n, accumulate);
}

void matmul_tn(const double* a, const double* b, double* c, int m, int k, int n,
               bool accumulate) {
    for (int i = 0; i < m; ++i)
        row_tn(a, b, c + static_cast<std::size_t>(i) * n, i, m, k, n, accumulate);
}

}  // namespace serial

}  // namespace omlab::core::kernels
