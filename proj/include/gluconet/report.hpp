#pragma once

#include <string>
#include <vector>

#include "gluconet/metrics.hpp"

namespace gluconet::report {

/// One (patient, model, horizon, run) evaluation row.
struct RunRow {
    std::string patient;
    std::string model;
    std::size_t horizon_samples = 0;
    int run = 0;
    unsigned seed = 0;
    eval::Metrics metrics;
    std::size_t params = 0;
    bool diverged = false;
    std::size_t out_of_range = 0;  // predictions outside [0, 600] mg/dL (logged, not clamped)
};

inline int horizon_minutes(std::size_t horizon_samples) {
    return static_cast<int>(horizon_samples) * 5;
}

/// Full-precision machine-readable rows, one per patient x horizon x model x run.
void write_runs_csv(const std::string& path, const std::vector<RunRow>& rows);
std::vector<RunRow> read_runs_csv(const std::string& path);

/// Per-horizon-step breakdown rows.
struct StepRow {
    std::string patient;
    std::string model;
    std::size_t horizon_samples = 0;
    int run = 0;
    std::size_t step = 0;  // 1-based horizon step
    eval::Metrics metrics;
};
void write_steps_csv(const std::string& path, const std::vector<StepRow>& rows);

/// Mean +/- std across runs per (model, horizon metric), horizons as columns.
/// The .txt table rounds to 2 decimals; the .csv companion keeps full precision.
void write_summary(const std::string& txt_path, const std::string& csv_path,
                   const std::vector<RunRow>& rows);

void write_efficiency_csv(const std::string& path, const std::vector<eval::EfficiencyRow>& rows);

/// (params, mean rmse) per model configuration at the given horizon.
std::vector<eval::EfficiencyRow> efficiency_from_runs(const std::vector<RunRow>& rows,
                                                      std::size_t horizon_samples);

}  // namespace gluconet::report
