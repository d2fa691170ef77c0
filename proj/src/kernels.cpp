#include "gluconet/kernels.hpp"

#include <malloc.h>
#include <xmmintrin.h>

#include <algorithm>
#include <vector>

namespace gluconet::nn::detail {

namespace {

// Large tensors cross glibc's default mmap threshold, which makes every
// batch allocation a fresh mmap/munmap pair; raising it keeps the arena warm.
const bool malloc_tuned = [] {
    mallopt(M_MMAP_THRESHOLD, 64 * 1024 * 1024);
    return true;
}();

template <class T>
std::vector<T>& scratch() {
    thread_local std::vector<T> buf;
    return buf;
}

// 4 x (two vector lanes) register-blocked micro kernel; acc arrays map onto
// SIMD registers once the inner loops are unrolled.
template <class T>
void gemm_nn_impl(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n,
                  bool accumulate) {
    constexpr std::size_t MR = 4;
    constexpr std::size_t NR = 64 / sizeof(T);  // 16 floats or 8 doubles

    std::size_t j = 0;
    for (; j + NR <= n; j += NR) {
        std::size_t i = 0;
        for (; i + MR <= m; i += MR) {
            T acc[MR][NR];
            if (accumulate) {
                for (std::size_t r = 0; r < MR; ++r)
                    for (std::size_t q = 0; q < NR; ++q) acc[r][q] = c[(i + r) * n + j + q];
            } else {
                for (std::size_t r = 0; r < MR; ++r)
                    for (std::size_t q = 0; q < NR; ++q) acc[r][q] = T(0);
            }
            const T* a0 = a + (i + 0) * k;
            const T* a1 = a + (i + 1) * k;
            const T* a2 = a + (i + 2) * k;
            const T* a3 = a + (i + 3) * k;
            for (std::size_t p = 0; p < k; ++p) {
                const T* brow = b + p * n + j;
                const T w0 = a0[p], w1 = a1[p], w2 = a2[p], w3 = a3[p];
                for (std::size_t q = 0; q < NR; ++q) {
                    const T bv = brow[q];
                    acc[0][q] += w0 * bv;
                    acc[1][q] += w1 * bv;
                    acc[2][q] += w2 * bv;
                    acc[3][q] += w3 * bv;
                }
            }
            for (std::size_t r = 0; r < MR; ++r)
                for (std::size_t q = 0; q < NR; ++q) c[(i + r) * n + j + q] = acc[r][q];
        }
        for (; i < m; ++i) {
            T acc[NR];
            if (accumulate)
                for (std::size_t q = 0; q < NR; ++q) acc[q] = c[i * n + j + q];
            else
                for (std::size_t q = 0; q < NR; ++q) acc[q] = T(0);
            const T* arow = a + i * k;
            for (std::size_t p = 0; p < k; ++p) {
                const T* brow = b + p * n + j;
                const T w = arow[p];
                for (std::size_t q = 0; q < NR; ++q) acc[q] += w * brow[q];
            }
            for (std::size_t q = 0; q < NR; ++q) c[i * n + j + q] = acc[q];
        }
    }
    if (j < n) {
        const std::size_t rest = n - j;
        if (!accumulate)
            for (std::size_t i = 0; i < m; ++i) std::fill(c + i * n + j, c + i * n + j + rest, T(0));
        for (std::size_t i = 0; i < m; ++i) {
            const T* arow = a + i * k;
            T* crow = c + i * n + j;
            for (std::size_t p = 0; p < k; ++p) {
                const T w = arow[p];
                const T* brow = b + p * n + j;
                for (std::size_t q = 0; q < rest; ++q) crow[q] += w * brow[q];
            }
        }
    }
}

template <class T>
void transpose_into(const T* src, std::size_t rows, std::size_t cols, T* dst) {
    constexpr std::size_t BLOCK = 32;
    for (std::size_t i0 = 0; i0 < rows; i0 += BLOCK)
        for (std::size_t j0 = 0; j0 < cols; j0 += BLOCK) {
            const std::size_t ie = std::min(rows, i0 + BLOCK);
            const std::size_t je = std::min(cols, j0 + BLOCK);
            for (std::size_t i = i0; i < ie; ++i)
                for (std::size_t jj = j0; jj < je; ++jj) dst[jj * rows + i] = src[i * cols + jj];
        }
}

}  // namespace

template <class T>
void gemm_nn(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n,
             bool accumulate) {
    gemm_nn_impl(a, b, c, m, k, n, accumulate);
}

template <class T>
void gemm_tn(const T* a, const T* b, T* c, std::size_t k, std::size_t m, std::size_t n,
             bool accumulate) {
    // rank-1 updates over the shared K dimension; C is small (M x N weight
    // shapes) and stays cache-hot, so no transpose of the large activation
    // matrix is needed
    if (!accumulate) std::fill(c, c + m * n, T(0));
    std::size_t p = 0;
    for (; p + 4 <= k; p += 4) {
        const T* a0 = a + p * m;
        const T* b0 = b + p * n;
        for (std::size_t i = 0; i < m; ++i) {
            const T w0 = a0[i], w1 = a0[m + i], w2 = a0[2 * m + i], w3 = a0[3 * m + i];
            T* crow = c + i * n;
            for (std::size_t j = 0; j < n; ++j)
                crow[j] += w0 * b0[j] + w1 * b0[n + j] + w2 * b0[2 * n + j] + w3 * b0[3 * n + j];
        }
    }
    for (; p < k; ++p) {
        const T* arow = a + p * m;
        const T* brow = b + p * n;
        for (std::size_t i = 0; i < m; ++i) {
            const T w = arow[i];
            T* crow = c + i * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += w * brow[j];
        }
    }
}

template <class T>
void gemm_nt(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n,
             bool accumulate) {
    auto& buf = scratch<T>();
    if (buf.size() < k * n) buf.resize(k * n);
    transpose_into(b, n, k, buf.data());  // [N,K] -> [K,N]
    gemm_nn_impl(a, buf.data(), c, m, k, n, accumulate);
}

void enable_flush_to_zero() {
    _mm_setcsr(_mm_getcsr() | 0x8040);  // FTZ | DAZ
}

template <class T>
T dot(const T* a, const T* b, std::size_t n) {
    T acc0 = 0, acc1 = 0, acc2 = 0, acc3 = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 += a[i] * b[i];
        acc1 += a[i + 1] * b[i + 1];
        acc2 += a[i + 2] * b[i + 2];
        acc3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) acc0 += a[i] * b[i];
    return (acc0 + acc1) + (acc2 + acc3);
}

template void gemm_nn<float>(const float*, const float*, float*, std::size_t, std::size_t,
                             std::size_t, bool);
template void gemm_nn<double>(const double*, const double*, double*, std::size_t, std::size_t,
                              std::size_t, bool);
template void gemm_tn<float>(const float*, const float*, float*, std::size_t, std::size_t,
                             std::size_t, bool);
template void gemm_tn<double>(const double*, const double*, double*, std::size_t, std::size_t,
                              std::size_t, bool);
template void gemm_nt<float>(const float*, const float*, float*, std::size_t, std::size_t,
                             std::size_t, bool);
template void gemm_nt<double>(const double*, const double*, double*, std::size_t, std::size_t,
                              std::size_t, bool);
template float dot<float>(const float*, const float*, std::size_t);
template double dot<double>(const double*, const double*, std::size_t);
}  // namespace gluconet::nn::detail
