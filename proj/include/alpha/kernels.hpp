#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include <omp.h>

namespace alpha::kernels {

/// Row-major sparse matrix view (compressed sparse rows).
struct CsrView {
    std::size_t rows = 0;
    const std::size_t* row_ptr = nullptr;
    const std::size_t* col_idx = nullptr;
    const double* values = nullptr;
};

// Below this many rows/entries the OpenMP versions run inline.
inline constexpr std::size_t kParallelThreshold = 1 << 14;
// Reductions sum fixed-size chunks, then the partial sums in order, so the
// result does not depend on the thread count.
inline constexpr std::size_t kReductionChunk = 4096;

// Reference implementations, kept for testing and benchmarking.
namespace serial {

inline void spmv(const CsrView& A, const double* x, double* y) {
    for (std::size_t r = 0; r < A.rows; ++r) {
        double s = 0.0;
        for (std::size_t k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) s += A.values[k] * x[A.col_idx[k]];
        y[r] = s;
    }
}

inline void lincomb(double a, const double* x, double b, const double* z, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * z[i];
}

template <class Term>
double sum(std::size_t n, const Term& term) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += term(i);
    return s;
}

}  // namespace serial

namespace parallel {

inline void spmv(const CsrView& A, const double* x, double* y) {
    const auto rows = static_cast<std::ptrdiff_t>(A.rows);
#pragma omp parallel for schedule(static) if (A.rows >= kParallelThreshold)
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
        double s = 0.0;
        for (std::size_t k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) s += A.values[k] * x[A.col_idx[k]];
        y[r] = s;
    }
}

inline void lincomb(double a, const double* x, double b, const double* z, double* out, std::size_t n) {
    const auto len = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
    for (std::ptrdiff_t i = 0; i < len; ++i) out[i] = a * x[i] + b * z[i];
}

template <class Term>
double sum(std::size_t n, const Term& term) {
    if (n <= kReductionChunk) return serial::sum(n, term);
    const std::size_t chunks = (n + kReductionChunk - 1) / kReductionChunk;
    std::vector<double> partial(chunks, 0.0);
    const auto nchunks = static_cast<std::ptrdiff_t>(chunks);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
    for (std::ptrdiff_t c = 0; c < nchunks; ++c) {
        const std::size_t lo = static_cast<std::size_t>(c) * kReductionChunk;
        const std::size_t hi = std::min(n, lo + kReductionChunk);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        partial[static_cast<std::size_t>(c)] = s;
    }
    double s = 0.0;
    for (double p : partial) s += p;
    return s;
}

}  // namespace parallel

// Entry points used by the library.
inline void spmv(const CsrView& A, const double* x, double* y) { parallel::spmv(A, x, y); }
inline void lincomb(double a, const double* x, double b, const double* z, double* out, std::size_t n) {
    parallel::lincomb(a, x, b, z, out, n);
}
template <class Term>
double sum(std::size_t n, const Term& term) {
    return parallel::sum(n, term);
}

}  // namespace alpha::kernels
