// Timing comparison of the OpenMP kernels against their serial reference
// implementations: GF(2) elimination, the group multiplication table fill,
// algebra products and product_span.

#include <chrono>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mipcert/galgebra.hpp"
#include "mipcert/gf2.hpp"
#include "mipcert/pcgroup.hpp"
#include "mipcert/verify.hpp"

using namespace mipcert;
using Clock = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
    // one warm-up, then best of reps
    fn();
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        fn();
        const auto t1 = Clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void row(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-38s %10.2f ms %10.2f ms %8.2fx\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms);
}

gf2::Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    gf2::Matrix m(rows, cols);
    std::mt19937_64 rng(seed);
    for (auto& r : m.row)
        for (std::size_t w = 0; w < r.words().size(); ++w) r.words()[w] = rng();
    for (auto& r : m.row) {  // clear bits past cols
        if (cols % 64) r.words().back() &= (~std::uint64_t{0}) >> (64 - cols % 64);
    }
    return m;
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both columns run serially\n");
#endif
    std::printf("%-38s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    {
        const gf2::Matrix m = random_matrix(1024, 1024, 42);
        const double s = time_ms([&] { (void)gf2::rref_serial(m); }, 3);
        const double p = time_ms([&] { (void)gf2::rref(m); }, 3);
        row("rref 1024x1024 random", s, p);
    }
    {
        const gf2::Matrix m = random_matrix(2048, 2048, 43);
        const double s = time_ms([&] { (void)gf2::rref_serial(m); }, 2);
        const double p = time_ms([&] { (void)gf2::rref(m); }, 2);
        row("rref 2048x2048 random", s, p);
    }

    {
        const pc::Group h54(pc::build_H(5, 4));  // order 2048
        const double s = time_ms([&] { (void)h54.build_table(false); }, 2);
        const double p = time_ms([&] { (void)h54.build_table(true); }, 2);
        row("multiplication table H(5,4)", s, p);
    }

    {
        auto grp = std::make_shared<pc::Group>(pc::build_H(5, 4));
        alg::GroupAlgebra kh(grp);
        std::mt19937_64 rng(7);
        alg::BitVector a(kh.dim()), b(kh.dim());
        for (std::size_t i = 0; i < kh.dim(); ++i) {
            if (rng() & 1) a.set(i);
            if (rng() & 1) b.set(i);
        }
        const double s = time_ms([&] { (void)kh.mul_serial(a, b); }, 3);
        const double p = time_ms([&] { (void)kh.mul(a, b); }, 3);
        row("algebra product, dense, kH(5,4)", s, p);
    }

    {
        auto grp = std::make_shared<pc::Group>(pc::build_H(4, 3));
        alg::GroupAlgebra kh(grp);
        const gf2::Subspace aug = kh.augmentation_ideal();
        const std::span<const alg::BitVector> basis(aug.basis());
        auto mul = [&kh](const alg::BitVector& u, const alg::BitVector& v) {
            return kh.mul_serial(u, v);
        };
        const double s = time_ms(
            [&] { (void)gf2::product_span_serial(basis, basis, kh.dim(), mul); }, 2);
        const double p =
            time_ms([&] { (void)gf2::product_span(basis, basis, kh.dim(), mul); }, 2);
        row("product_span I x I, kH(4,3)", s, p);
    }

    {
        // exhaustive certificate multiplicativity at (4,3); thread count is the
        // only switch, the kernel is the same
        verify::Options opt;
        auto res = verify::run_verification(4, 3, opt);
        if (!res.certificate) {
            std::printf("verification failed, no certificate kernel timing\n");
            return 1;
        }
        const auto inst = verify::build_instance(4, 3);
        auto check = [&] {
            (void)verify::check_multiplicative(*res.certificate, *inst.G, *inst.kH,
                                               verify::Options::MultPolicy::exhaustive, 1,
                                               0);
        };
#ifdef _OPENMP
        const int max_threads = omp_get_max_threads();
        omp_set_num_threads(1);
        const double s = time_ms(check, 2);
        omp_set_num_threads(max_threads);
        const double p = time_ms(check, 2);
#else
        const double s = time_ms(check, 2);
        const double p = s;
#endif
        row("certificate mult check 512^2 pairs", s, p);
    }

    return 0;
}
