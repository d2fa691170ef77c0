#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gluconet::eval {

/// RMSE, MAE and R^2 pooled over all actual/predicted pairs. R^2 uses the
/// total sum of squares about the actual mean and is absent (not 0) when the
/// actuals have zero variance.
struct Metrics {
    double rmse = 0.0;
    double mae = 0.0;
    std::optional<double> r2;
};

Metrics compute_metrics(std::span<const double> actual, std::span<const double> predicted);

/// Per-horizon-step metrics of flattened [N, h] arrays (column k of each row).
std::vector<Metrics> per_step_metrics(std::span<const double> actual,
                                      std::span<const double> predicted, std::size_t horizon);

struct EfficiencyEntry {
    std::string config;
    std::size_t params = 0;
    double rmse = 0.0;
};

struct EfficiencyRow {
    std::string config;
    std::size_t params = 0;
    double rmse = 0.0;
    bool pareto = false;
};

/// Rows sorted by parameter count ascending with Pareto-front flags: a row is
/// flagged unless some other row has <= params and < rmse (or < params and
/// <= rmse).
std::vector<EfficiencyRow> efficiency_table(const std::vector<EfficiencyEntry>& entries);

}  // namespace gluconet::eval
