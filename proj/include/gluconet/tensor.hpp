#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "gluconet/kernels.hpp"

namespace gluconet::nn {

/// Dense row-major tensor with an optional gradient buffer of the same size.
/// T is float for training throughput or double for gradient checking.
template <class T>
struct TensorT {
    std::vector<std::size_t> shape;
    std::vector<T> values;
    std::vector<T> grad;  // empty until ensure_grad()

    TensorT() = default;
    explicit TensorT(std::vector<std::size_t> s)
        : shape(std::move(s)), values(count(shape), T(0)) {}
    TensorT(std::vector<std::size_t> s, std::vector<T> v) : shape(std::move(s)), values(std::move(v)) {
        if (values.size() != count(shape)) throw std::invalid_argument("tensor: values/shape mismatch");
    }

    static std::size_t count(const std::vector<std::size_t>& s) {
        return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
    }
    std::size_t numel() const { return values.size(); }
    std::size_t dim(std::size_t i) const { return shape.at(i); }

    T& at(std::size_t i, std::size_t j) { return values[i * shape[1] + j]; }
    const T& at(std::size_t i, std::size_t j) const { return values[i * shape[1] + j]; }

    void ensure_grad() {
        if (grad.size() != values.size()) grad.assign(values.size(), T(0));
    }
    void zero_grad() {
        if (!grad.empty()) std::fill(grad.begin(), grad.end(), T(0));
    }
    bool same_shape(const TensorT& o) const { return shape == o.shape; }
};

using Tensor = TensorT<double>;
using Tensor32 = TensorT<float>;

/// Named parameter tensors with stable insertion order (required for a
/// reproducible optimizer trajectory). Storage is pointer-stable so layers
/// can keep references across additions.
template <class T>
class ParamStoreT {
public:
    TensorT<T>& add(const std::string& name, std::vector<std::size_t> shape) {
        for (const auto& n : names_)
            if (n == name) throw std::invalid_argument("param store: duplicate name '" + name + "'");
        names_.push_back(name);
        tensors_.push_back(std::make_unique<TensorT<T>>(std::move(shape)));
        return *tensors_.back();
    }

    std::size_t size() const { return tensors_.size(); }
    TensorT<T>& tensor(std::size_t i) { return *tensors_[i]; }
    const TensorT<T>& tensor(std::size_t i) const { return *tensors_[i]; }
    const std::string& name(std::size_t i) const { return names_[i]; }

    TensorT<T>* find(const std::string& name) {
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == name) return tensors_[i].get();
        return nullptr;
    }

    std::size_t total_params() const {
        std::size_t n = 0;
        for (const auto& t : tensors_) n += t->numel();
        return n;
    }

    void zero_grad() {
        for (auto& t : tensors_) t->zero_grad();
    }

    /// FNV-1a over the raw parameter bytes; used by freeze contracts.
    std::uint64_t value_checksum() const {
        std::uint64_t h = 1469598103934665603ull;
        for (const auto& t : tensors_)
            for (T v : t->values) {
                const auto* p = reinterpret_cast<const unsigned char*>(&v);
                for (std::size_t b = 0; b < sizeof(T); ++b) h = (h ^ p[b]) * 1099511628211ull;
            }
        return h;
    }

private:
    std::vector<std::string> names_;
    std::vector<std::unique_ptr<TensorT<T>>> tensors_;
};

/// Deterministic uniform double in [0, 1); independent of libstdc++'s
/// distribution internals so trajectories are stable across toolchains.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Fan-in scaled uniform init: U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
template <class T>
void init_uniform_fanin(TensorT<T>& t, std::size_t fan_in, std::mt19937_64& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in == 0 ? 1 : fan_in));
    for (auto& v : t.values) v = static_cast<T>((2.0 * uniform01(rng) - 1.0) * bound);
}

}  // namespace gluconet::nn
