#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>

// Dense kernels behind the layer math. Implementations live in kernels.cpp,
// which is compiled with reassociation enabled so reductions vectorize; the
// summation order is fixed by the implementation, so results stay
// deterministic across runs of the same build.
namespace gluconet::nn::detail {

/// exp with a fast branch-free polynomial in single precision (~2e-7 relative,
/// vectorizes in activation loops); double precision stays on libm so
/// finite-difference checks see the exact function.
template <class T>
inline T exp_act(T x) {
    return std::exp(x);
}

template <>
inline float exp_act<float>(float x) {
    x = std::min(88.0f, std::max(-87.0f, x));
    const float z = x * 1.44269504088896341f;  // x / ln 2
    const float n = std::floor(z + 0.5f);
    x -= n * 0.693359375f;      // ln 2, split high
    x += n * 2.12194440e-4f;    // ln 2, split low (negated)
    float p = 1.9875691500e-4f;
    p = p * x + 1.3981999507e-3f;
    p = p * x + 8.3334519073e-3f;
    p = p * x + 4.1665795894e-2f;
    p = p * x + 1.6666665459e-1f;
    p = p * x + 5.0000001201e-1f;
    const float r = p * x * x + x + 1.0f;
    union {
        float f;
        std::int32_t i;
    } two_n;
    two_n.i = (static_cast<std::int32_t>(n) + 127) << 23;
    return r * two_n.f;
}

template <class T>
inline T sigmoid_act(T x) {
    return T(1) / (T(1) + exp_act(-x));
}

template <class T>
inline T tanh_act(T x) {
    return std::tanh(x);
}

template <>
inline float tanh_act<float>(float x) {
    const float e = exp_act(-2.0f * x);
    return (1.0f - e) / (1.0f + e);
}

/// C[M,N] = or += A[M,K] * B[K,N], row-major.
template <class T>
void gemm_nn(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n,
             bool accumulate);

/// C[M,N] += A[K,M]^T * B[K,N] (weight gradients: dW = x^T dy).
template <class T>
void gemm_tn(const T* a, const T* b, T* c, std::size_t k, std::size_t m, std::size_t n,
             bool accumulate);

/// C[M,N] = or += A[M,K] * B[N,K]^T (input gradients: dx = dy W^T).
template <class T>
void gemm_nt(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n,
             bool accumulate);

/// Plain dot product with unrolled independent accumulators.
template <class T>
T dot(const T* a, const T* b, std::size_t n);

/// Sets flush-to-zero/denormals-are-zero on the calling thread; saturated
/// activations otherwise produce subnormal gradients that run at microcode
/// speed. Flushing is deterministic.
void enable_flush_to_zero();

}  // namespace gluconet::nn::detail
