#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gluconet/tensor.hpp"

namespace gluconet::nn {

struct AdamConfig {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double clip_norm = 1.0;  // global gradient norm clip; <= 0 disables
};

/// Bias-corrected Adam over a ParamStore. Moment buffers follow the store's
/// insertion order, so identical seeds give identical trajectories.
template <class T>
class Adam {
public:
    explicit Adam(const AdamConfig& cfg = {}) : cfg_(cfg) {}

    void step(ParamStoreT<T>& params) {
        if (m_.empty()) {
            m_.resize(params.size());
            v_.resize(params.size());
            for (std::size_t i = 0; i < params.size(); ++i) {
                m_[i].assign(params.tensor(i).numel(), T(0));
                v_[i].assign(params.tensor(i).numel(), T(0));
            }
        }
        for (std::size_t i = 0; i < params.size(); ++i)
            if (params.tensor(i).grad.size() != params.tensor(i).numel())
                throw std::invalid_argument("adam: missing gradient for '" + params.name(i) + "'");

        double scale = 1.0;
        if (cfg_.clip_norm > 0.0) {
            double sq = 0.0;
            for (std::size_t i = 0; i < params.size(); ++i)
                for (T g : params.tensor(i).grad) sq += static_cast<double>(g) * static_cast<double>(g);
            const double norm = std::sqrt(sq);
            if (norm > cfg_.clip_norm) scale = cfg_.clip_norm / norm;
        }

        ++step_;
        const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
        const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
        for (std::size_t i = 0; i < params.size(); ++i) {
            auto& t = params.tensor(i);
            auto& m = m_[i];
            auto& v = v_[i];
            for (std::size_t j = 0; j < t.numel(); ++j) {
                const double g = static_cast<double>(t.grad[j]) * scale;
                const double mj = cfg_.beta1 * static_cast<double>(m[j]) + (1.0 - cfg_.beta1) * g;
                const double vj = cfg_.beta2 * static_cast<double>(v[j]) + (1.0 - cfg_.beta2) * g * g;
                m[j] = static_cast<T>(mj);
                v[j] = static_cast<T>(vj);
                const double mhat = mj / bc1;
                const double vhat = vj / bc2;
                t.values[j] -= static_cast<T>(cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps));
            }
        }
    }

    long step_count() const { return step_; }

private:
    AdamConfig cfg_;
    long step_ = 0;
    std::vector<std::vector<T>> m_, v_;
};

}  // namespace gluconet::nn
