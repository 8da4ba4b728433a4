#pragma once

#include <cstddef>
#include <exception>
#include <type_traits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

// Data-parallel loops used by sweeps, Monte Carlo trials, quadrature panels
// and Fock-space accumulations. Every parallel kernel has a serial twin that
// the tests compare against; results never depend on the thread count.
namespace qinet::kernels {

void set_threads(int n);
int max_threads();

// Reductions are split into this many chunks regardless of thread count, so
// the summation order is fixed.
inline constexpr std::size_t kReduceChunks = 64;

template <class F>
auto map_serial(std::size_t n, F&& f) {
    using R = std::invoke_result_t<F&, std::size_t>;
    std::vector<R> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(f(i));
    return out;
}

template <class F>
auto map_parallel(std::size_t n, F&& f) {
    using R = std::invoke_result_t<F&, std::size_t>;
    std::vector<R> out(n);
    std::vector<std::exception_ptr> err(n);
    const auto sn = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < sn; ++i) {
        try {
            out[i] = f(static_cast<std::size_t>(i));
        } catch (...) {
            err[i] = std::current_exception();
        }
    }
    for (auto& e : err)
        if (e) std::rethrow_exception(e);
    return out;
}

// sum_i f(i), accumulated left to right.
template <class T, class F>
T reduce_serial(std::size_t n, T zero, F&& f) {
    T acc = zero;
    for (std::size_t i = 0; i < n; ++i) acc += f(i);
    return acc;
}

// Same sum, chunked: each chunk accumulates left to right, chunks are merged
// in order. Matches reduce_serial to rounding, and is bitwise stable across
// thread counts.
template <class T, class F>
T reduce_parallel(std::size_t n, T zero, F&& f) {
    const std::size_t chunks = n < kReduceChunks ? (n ? n : 1) : kReduceChunks;
    std::vector<T> part(chunks, zero);
    std::vector<std::exception_ptr> err(chunks);
    const auto sc = static_cast<long long>(chunks);
#pragma omp parallel for schedule(dynamic)
    for (long long c = 0; c < sc; ++c) {
        const std::size_t lo = n * c / chunks, hi = n * (c + 1) / chunks;
        try {
            T acc = zero;
            for (std::size_t i = lo; i < hi; ++i) acc += f(i);
            part[c] = std::move(acc);
        } catch (...) {
            err[c] = std::current_exception();
        }
    }
    for (auto& e : err)
        if (e) std::rethrow_exception(e);
    T acc = zero;
    for (auto& p : part) acc += p;
    return acc;
}

}  // namespace qinet::kernels
