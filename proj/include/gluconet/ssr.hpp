#pragma once

#include <vector>

#include "gluconet/timeseries.hpp"

namespace gluconet::ssr {

/// Discrete meal or insulin bolus event.
struct EventRecord {
    enum class Kind { meal, bolus };
    Timestamp time = 0;
    Kind kind = Kind::meal;
    double magnitude = 0.0;  // grams for meals, insulin units for boluses
};

/// Piecewise-linear carbohydrate absorption: flat for `delay` samples after
/// the meal, rising at alpha_inc per sample up to `peak_at`, then decaying at
/// alpha_dec per sample until `end_at` (clamped at zero).
struct CarbKineticsParams {
    double alpha_inc = 0.11;
    double alpha_dec = 0.028;
    int delay = 3;      // first sample offset with a nonzero contribution
    int peak_at = 12;   // sample offset of the peak (value = meal size)
    int end_at = 48;    // contributions stop at this offset
    void validate() const;
};

/// Bi-exponential insulin activity profile parameterized by peak time and
/// total duration (minutes). tau, rise_factor and scale are derived:
///   tau   = t_p (1 - t_p/t_d) / (1 - 2 t_p/t_d)
///   a     = 2 tau / t_d
///   S     = 1 / (1 - a + (1 + a) e^{-t_d/tau})
struct InsulinKineticsParams {
    double t_p_minutes = 55.0;
    double t_d_minutes = 300.0;
    double tau = 0.0;
    double rise_factor = 0.0;  // a
    double scale = 0.0;        // S

    static InsulinKineticsParams from_peak_duration(double t_p_minutes, double t_d_minutes);
};

/// Remaining-activity fraction of one bolus after `minutes`, clamped to [0, 1]
/// and exactly 0 from t_d on.
double iob_at(double minutes, const InsulinKineticsParams& params);

std::vector<double> iob_curve(const std::vector<double>& elapsed_minutes,
                              const InsulinKineticsParams& params);

/// Continuous operative-carbohydrate feature on a uniform grid: additive
/// superposition of the per-meal absorption curve.
std::vector<double> operative_carbs(const std::vector<EventRecord>& meals,
                                    Timestamp grid_start, int step_seconds, std::size_t length,
                                    const CarbKineticsParams& params = {});

/// Continuous active-insulin feature: sum over boluses of dose * IOB(t - t_bolus).
std::vector<double> active_insulin_series(const std::vector<EventRecord>& boluses,
                                          Timestamp grid_start, int step_seconds, std::size_t length,
                                          const InsulinKineticsParams& params);

/// One piecewise-constant basal rate segment (units/hour).
struct BasalSegment {
    Timestamp start = 0;
    Timestamp end = 0;
    double rate_units_per_hour = 0.0;
};

/// Converts basal segments into per-grid-sample micro-boluses (rate * step/3600
/// units each) so basal insulin runs through the same activity curve.
std::vector<EventRecord> basal_to_microboluses(const std::vector<BasalSegment>& segments,
                                               Timestamp grid_start, int step_seconds,
                                               std::size_t length);

}  // namespace gluconet::ssr
