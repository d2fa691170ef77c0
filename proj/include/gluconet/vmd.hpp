#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gluconet::vmd {

enum class OmegaInit { uniform, zero, random };

struct VmdConfig {
    int modes = 5;            // m
    double alpha = 2000.0;    // bandwidth penalty
    double tau_dual = 0.0;    // dual ascent step; 0 disables the multiplier update
    double tol = 1e-7;        // convergence threshold on summed relative mode change
    int max_iters = 500;
    OmegaInit init = OmegaInit::uniform;
    unsigned seed = 0;        // used only by OmegaInit::random

    void validate() const;
};

/// Band-limited modes of a decomposition. Modes are sorted by center
/// frequency; omegas are normalized cycles/sample in [0, 0.5]. The residual
/// is defined as input minus the mode sum, so
///   sum_k modes[k] + residual == input
/// holds exactly.
struct ModeSet {
    std::vector<std::vector<double>> modes;
    std::vector<double> omegas;
    std::vector<double> residual;
    int iterations_used = 0;
    bool converged = false;

    std::size_t mode_count() const { return modes.size(); }
    std::size_t length() const { return residual.size(); }
};

/// ADMM decomposition in the frequency domain. The signal is mirror-extended
/// by half its length on each side, modes are solved on the half spectrum of
/// the extension, and the inverted modes are cropped back to the original
/// support. Non-convergence within max_iters returns converged=false rather
/// than an error.
ModeSet vmd_decompose(std::span<const double> signal, const VmdConfig& config);

struct GroupedModes {
    std::vector<double> low;
    std::vector<double> high;
};

/// Sums modes [0, split_index) into the low composite and the rest into the
/// high composite. The residual joins the low group by default; with
/// residual_to_low = false it is excluded and low + high reconstruct the
/// input only up to the residual.
GroupedModes group_modes(const ModeSet& modes, std::size_t split_index,
                         bool residual_to_low = true);

/// Independent decompositions of the train and test signals; nothing computed
/// from one influences the other.
std::pair<ModeSet, ModeSet> decompose_split(std::span<const double> train_signal,
                                            std::span<const double> test_signal,
                                            const VmdConfig& config);

/// Columnar text dump for plotting: a '# omegas: ...' header line followed by
/// one column per mode plus the residual.
void write_modes_file(const std::string& path, const ModeSet& modes);

}  // namespace gluconet::vmd
