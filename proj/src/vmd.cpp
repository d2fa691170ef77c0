#include "gluconet/vmd.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numeric>
#include <random>
#include <stdexcept>

#include "gluconet/fft.hpp"

namespace gluconet::vmd {

using fft::cdouble;

void VmdConfig::validate() const {
    if (modes < 1) throw std::invalid_argument("vmd: modes must be >= 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("vmd: alpha must be > 0");
    if (!(tol > 0.0)) throw std::invalid_argument("vmd: tol must be > 0");
    if (tau_dual < 0.0) throw std::invalid_argument("vmd: tau_dual must be >= 0");
    if (max_iters < 1) throw std::invalid_argument("vmd: max_iters must be >= 1");
}

ModeSet vmd_decompose(std::span<const double> signal, const VmdConfig& config) {
    config.validate();
    const std::size_t t_len = signal.size();
    if (t_len < 16) throw std::invalid_argument("vmd: signal shorter than 16 samples");
    for (double v : signal)
        if (!std::isfinite(v)) throw std::invalid_argument("vmd: non-finite sample");

    const auto m = static_cast<std::size_t>(config.modes);

    // even (mirror) extension by half the length on each side
    const std::size_t half = t_len / 2;
    const std::size_t n = half + t_len + (t_len - half);  // == 2 * t_len
    std::vector<cdouble> extended(n);
    for (std::size_t i = 0; i < half; ++i) extended[i] = signal[half - 1 - i];
    for (std::size_t i = 0; i < t_len; ++i) extended[half + i] = signal[i];
    for (std::size_t i = 0; i < t_len - half; ++i) extended[half + t_len + i] = signal[t_len - 1 - i];

    const std::vector<cdouble> spectrum = fft::fft(extended);
    const std::size_t bins = n / 2 + 1;  // one-sided bins, omega = k/n in [0, 0.5]
    std::vector<double> freq(bins);
    for (std::size_t k = 0; k < bins; ++k) freq[k] = static_cast<double>(k) / static_cast<double>(n);

    std::vector<cdouble> f_hat(spectrum.begin(), spectrum.begin() + static_cast<std::ptrdiff_t>(bins));

    std::vector<std::vector<cdouble>> u(m, std::vector<cdouble>(bins, cdouble{0.0, 0.0}));
    std::vector<std::vector<cdouble>> u_prev(m, std::vector<cdouble>(bins, cdouble{0.0, 0.0}));
    std::vector<cdouble> lambda_hat(bins, cdouble{0.0, 0.0});
    std::vector<cdouble> sum_modes(bins, cdouble{0.0, 0.0});

    std::vector<double> omega(m, 0.0);
    switch (config.init) {
        case OmegaInit::uniform:
            for (std::size_t k = 0; k < m; ++k)
                omega[k] = 0.5 * static_cast<double>(k) / static_cast<double>(m);
            break;
        case OmegaInit::zero:
            break;
        case OmegaInit::random: {
            std::mt19937_64 rng(config.seed);
            for (std::size_t k = 0; k < m; ++k)
                omega[k] = 0.5 * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
            std::sort(omega.begin(), omega.end());
            break;
        }
    }

    int iters = 0;
    bool converged = false;
    while (iters < config.max_iters) {
        ++iters;
        for (std::size_t k = 0; k < m; ++k) u_prev[k] = u[k];

        for (std::size_t k = 0; k < m; ++k) {
            // Gauss-Seidel: sum_modes tracks the latest estimate of every mode
            for (std::size_t b = 0; b < bins; ++b) sum_modes[b] -= u[k][b];
            double num = 0.0, den = 0.0;
            for (std::size_t b = 0; b < bins; ++b) {
                const double d = freq[b] - omega[k];
                const cdouble val =
                    (f_hat[b] - sum_modes[b] + 0.5 * lambda_hat[b]) / (1.0 + 2.0 * config.alpha * d * d);
                u[k][b] = val;
                const double p = std::norm(val);
                num += freq[b] * p;
                den += p;
            }
            if (den > 1e-300) omega[k] = num / den;  // spectral centroid; keep old value if empty
            for (std::size_t b = 0; b < bins; ++b) sum_modes[b] += u[k][b];
        }

        if (config.tau_dual > 0.0)
            for (std::size_t b = 0; b < bins; ++b)
                lambda_hat[b] += config.tau_dual * (f_hat[b] - sum_modes[b]);

        double diff = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            double dn = 0.0, pn = 0.0;
            for (std::size_t b = 0; b < bins; ++b) {
                dn += std::norm(u[k][b] - u_prev[k][b]);
                pn += std::norm(u_prev[k][b]);
            }
            diff += dn / (pn + 1e-300);
        }
        if (diff < config.tol) {
            converged = true;
            break;
        }
    }

    // invert each half spectrum (Hermitian completion) and crop the extension
    ModeSet out;
    out.iterations_used = iters;
    out.converged = converged;
    out.modes.resize(m);
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return omega[a] < omega[b]; });

    std::vector<cdouble> full(n);
    for (std::size_t rank = 0; rank < m; ++rank) {
        const std::size_t k = order[rank];
        std::fill(full.begin(), full.end(), cdouble{0.0, 0.0});
        for (std::size_t b = 0; b < bins; ++b) full[b] = u[k][b];
        for (std::size_t b = 1; b < n - bins + 1; ++b) full[n - b] = std::conj(full[b]);
        const auto rec = fft::ifft(full);
        auto& mode = out.modes[rank];
        mode.resize(t_len);
        for (std::size_t i = 0; i < t_len; ++i) mode[i] = rec[half + i].real();
        out.omegas.push_back(omega[k]);
    }

    out.residual.assign(signal.begin(), signal.end());
    for (const auto& mode : out.modes)
        for (std::size_t i = 0; i < t_len; ++i) out.residual[i] -= mode[i];
    return out;
}

GroupedModes group_modes(const ModeSet& modes, std::size_t split_index, bool residual_to_low) {
    if (split_index < 1 || split_index >= modes.mode_count())
        throw std::invalid_argument("group_modes: split_index must be in [1, mode_count)");
    GroupedModes g;
    g.low.assign(modes.length(), 0.0);
    g.high.assign(modes.length(), 0.0);
    for (std::size_t k = 0; k < modes.mode_count(); ++k) {
        auto& dst = (k < split_index) ? g.low : g.high;
        for (std::size_t i = 0; i < modes.length(); ++i) dst[i] += modes.modes[k][i];
    }
    if (residual_to_low)
        for (std::size_t i = 0; i < modes.length(); ++i) g.low[i] += modes.residual[i];
    return g;
}

std::pair<ModeSet, ModeSet> decompose_split(std::span<const double> train_signal,
                                            std::span<const double> test_signal,
                                            const VmdConfig& config) {
    return {vmd_decompose(train_signal, config), vmd_decompose(test_signal, config)};
}

void write_modes_file(const std::string& path, const ModeSet& modes) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_modes_file: cannot open " + path);
    std::fprintf(f, "# omegas:");
    for (double w : modes.omegas) std::fprintf(f, " %.10g", w);
    std::fprintf(f, "\n# columns: mode_0 .. mode_%zu residual\n", modes.mode_count() - 1);
    for (std::size_t i = 0; i < modes.length(); ++i) {
        for (std::size_t k = 0; k < modes.mode_count(); ++k)
            std::fprintf(f, "%s%.17g", k ? " " : "", modes.modes[k][i]);
        std::fprintf(f, " %.17g\n", modes.residual[i]);
    }
    std::fclose(f);
}

}  // namespace gluconet::vmd
