#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>

#include "gluconet/tensor.hpp"

namespace gluconet::nn {

struct GradCheckResult {
    double max_rel_err = 0.0;
    std::size_t checked = 0;
    std::size_t skipped_kinks = 0;
};

/// Central-difference check of the gradients stored in `params` against the
/// scalar function `eval` (forward only; the caller runs forward + backward
/// once beforehand to populate grads). When the parameter count exceeds
/// sample_limit a seeded random subset is checked. `kink_signature`, when
/// provided, identifies the active set of piecewise-linear units after each
/// eval; coordinates whose +/- h evaluations land on different sides of a
/// kink are skipped since the function is not differentiable there.
template <class T>
GradCheckResult grad_check(ParamStoreT<T>& params, const std::function<double()>& eval,
                           std::size_t sample_limit = 0, std::uint64_t seed = 0,
                           const std::function<std::uint64_t()>& kink_signature = {},
                           double step = 1e-5) {
    static_assert(sizeof(T) >= sizeof(double),
                  "grad_check needs double precision; instantiate the model with T = double");
    GradCheckResult result;
    std::vector<std::pair<std::size_t, std::size_t>> coords;  // (tensor index, element index)
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params.tensor(i).grad.size() != params.tensor(i).numel())
            throw std::invalid_argument("grad_check: gradients not populated");
        for (std::size_t j = 0; j < params.tensor(i).numel(); ++j) coords.emplace_back(i, j);
    }
    if (sample_limit > 0 && coords.size() > sample_limit) {
        std::mt19937_64 rng(seed);
        for (std::size_t i = 0; i < sample_limit; ++i) {
            const auto j = i + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(coords.size() - i));
            std::swap(coords[i], coords[j]);
        }
        coords.resize(sample_limit);
    }

    for (const auto& [ti, ei] : coords) {
        auto& tensor = params.tensor(ti);
        const T saved = tensor.values[ei];
        tensor.values[ei] = saved + static_cast<T>(step);
        const double f_plus = eval();
        const std::uint64_t sig_plus = kink_signature ? kink_signature() : 0;
        tensor.values[ei] = saved - static_cast<T>(step);
        const double f_minus = eval();
        const std::uint64_t sig_minus = kink_signature ? kink_signature() : 0;
        tensor.values[ei] = saved;
        if (!std::isfinite(f_plus) || !std::isfinite(f_minus))
            throw std::invalid_argument("grad_check: non-finite loss during perturbation");
        if (kink_signature && sig_plus != sig_minus) {
            ++result.skipped_kinks;
            continue;
        }
        const double numeric = (f_plus - f_minus) / (2.0 * step);
        const double analytic = static_cast<double>(tensor.grad[ei]);
        const double denom = std::max(std::abs(analytic) + std::abs(numeric), 1e-4);
        result.max_rel_err = std::max(result.max_rel_err, std::abs(analytic - numeric) / denom);
        ++result.checked;
    }
    return result;
}

}  // namespace gluconet::nn
