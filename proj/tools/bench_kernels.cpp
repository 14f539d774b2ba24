// Serial vs OpenMP matmul throughput, with a bit-identity check between the
// two paths at every size.
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "omlab/core/kernels.hpp"
#include "omlab/core/random.hpp"

namespace k = omlab::core::kernels;

namespace {

using Matmul = std::function<void(const double*, const double*, double*, int, int, int)>;

double best_seconds(const Matmul& f, const double* a, const double* b, double* c, int s,
                    int reps) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f(a, b, c, s, s, s);
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"matmul kernel benchmark: serial reference vs parallel"};
    std::vector<int> sizes = {64, 128, 256, 384};
    int reps = 5;
    int threads = 0;
    app.add_option("--sizes", sizes, "square sizes to benchmark");
    app.add_option("--reps", reps, "timed repetitions per point (best-of)")->check(CLI::Range(1, 1000));
    app.add_option("--threads", threads, "parallel thread count (0 = hardware default)");
    CLI11_PARSE(app, argc, argv);

    k::set_threads(threads);
    std::printf("threads: %d\n", k::threads());
    std::printf("%6s  %-3s  %14s  %14s  %8s  %s\n", "size", "op", "serial GFLOP/s",
                "parallel GFLOP/s", "speedup", "match");

    struct Op {
        const char* name;
        Matmul serial, parallel;
    };
    const Op ops[] = {
        {"nn",
         [](const double* a, const double* b, double* c, int m, int kk, int n) {
             k::serial::matmul_nn(a, b, c, m, kk, n);
         },
         [](const double* a, const double* b, double* c, int m, int kk, int n) {
             k::matmul_nn(a, b, c, m, kk, n);
         }},
        {"nt",
         [](const double* a, const double* b, double* c, int m, int kk, int n) {
             k::serial::matmul_nt(a, b, c, m, kk, n);
         },
         [](const double* a, const double* b, double* c, int m, int kk, int n) {
             k::matmul_nt(a, b, c, m, kk, n);
         }},
        {"tn",
         [](const double* a, const double* b, double* c, int m, int kk, int n) {
             k::serial::matmul_tn(a, b, c, m, kk, n);
         },
         [](const double* a, const double* b, double* c, int m, int kk, int n) {
             k::matmul_tn(a, b, c, m, kk, n);
         }},
    };

    omlab::core::Rng rng(1234);
    bool all_exact = true;
    for (int s : sizes) {
        std::vector<double> a(static_cast<size_t>(s) * s), b(a.size());
        std::vector<double> c_serial(a.size()), c_parallel(a.size());
        for (double& v : a) v = rng.uniform(-1.0, 1.0);
        for (double& v : b) v = rng.uniform(-1.0, 1.0);
        const double flops = 2.0 * s * s * s;
        for (const Op& op : ops) {
            // Warm-up runs double as the outputs compared for bit-identity.
            op.serial(a.data(), b.data(), c_serial.data(), s, s, s);
            op.parallel(a.data(), b.data(), c_parallel.data(), s, s, s);
            const bool exact = c_serial == c_parallel;
            all_exact = all_exact && exact;
            const double ts = best_seconds(op.serial, a.data(), b.data(), c_serial.data(), s, reps);
            const double tp =
                best_seconds(op.parallel, a.data(), b.data(), c_parallel.data(), s, reps);
            std::printf("%6d  %-3s  %14.2f  %14.2f  %7.2fx  %s\n", s, op.name, flops / ts / 1e9,
                        flops / tp / 1e9, ts / tp, exact ? "exact" : "DIFFERS");
        }
    }
    k::set_threads(0);
    if (!all_exact) {
        std::fprintf(stderr, "parallel output differs from the serial reference\n");
        return 1;
    }
    return 0;
}
