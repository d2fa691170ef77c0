#include "gluconet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gluconet::eval {

Metrics compute_metrics(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size()) throw std::invalid_argument("compute_metrics: size mismatch");
    const std::size_t n = actual.size();
    if (n < 2) throw std::invalid_argument("compute_metrics: need at least 2 pairs");

    double mean = 0.0;
    for (double y : actual) mean += y;
    mean /= static_cast<double>(n);

    double ss_res = 0.0, abs_sum = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = actual[i] - predicted[i];
        ss_res += e * e;
        abs_sum += std::abs(e);
        ss_tot += (actual[i] - mean) * (actual[i] - mean);
    }

    Metrics m;
    m.rmse = std::sqrt(ss_res / static_cast<double>(n));
    m.mae = abs_sum / static_cast<double>(n);
    if (ss_tot > 0.0) m.r2 = 1.0 - ss_res / ss_tot;
    return m;
}

std::vector<Metrics> per_step_metrics(std::span<const double> actual,
                                      std::span<const double> predicted, std::size_t horizon) {
    if (horizon == 0 || actual.size() != predicted.size() || actual.size() % horizon != 0)
        throw std::invalid_argument("per_step_metrics: bad shapes");
    const std::size_t rows = actual.size() / horizon;
    std::vector<Metrics> out;
    out.reserve(horizon);
    std::vector<double> a(rows), p(rows);
    for (std::size_t k = 0; k < horizon; ++k) {
        for (std::size_t r = 0; r < rows; ++r) {
            a[r] = actual[r * horizon + k];
            p[r] = predicted[r * horizon + k];
        }
        out.push_back(compute_metrics(a, p));
    }
    return out;
}

std::vector<EfficiencyRow> efficiency_table(const std::vector<EfficiencyEntry>& entries) {
    std::vector<EfficiencyRow> rows;
    rows.reserve(entries.size());
    for (const auto& e : entries) rows.push_back({e.config, e.params, e.rmse, true});
    std::sort(rows.begin(), rows.end(), [](const EfficiencyRow& a, const EfficiencyRow& b) {
        return a.params != b.params ? a.params < b.params : a.rmse < b.rmse;
    });
    for (auto& r : rows) {
        for (const auto& other : rows) {
            const bool leq = other.params <= r.params && other.rmse <= r.rmse;
            const bool strict = other.params < r.params || other.rmse < r.rmse;
            if (leq && strict) {
                r.pareto = false;
                break;
            }
        }
    }
    return rows;
}

}  // namespace gluconet::eval
