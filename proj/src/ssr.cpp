#include "gluconet/ssr.hpp"

#include <cmath>
#include <stdexcept>

namespace gluconet::ssr {

void CarbKineticsParams::validate() const {
    if (!(alpha_inc > 0.0)) throw std::invalid_argument("carb kinetics: alpha_inc must be > 0");
    if (!(alpha_dec > 0.0)) throw std::invalid_argument("carb kinetics: alpha_dec must be > 0");
    if (!(delay < peak_at && peak_at < end_at))
        throw std::invalid_argument("carb kinetics: require delay < peak_at < end_at");
}

InsulinKineticsParams InsulinKineticsParams::from_peak_duration(double t_p, double t_d) {
    if (!(t_p > 0.0 && t_d > 0.0))
        throw std::invalid_argument("insulin kinetics: t_p and t_d must be > 0");
    // tau has a pole at t_p = t_d/2; keep a margin so tau stays usable
    if (!(t_p < 0.5 * t_d * (1.0 - 1e-6)))
        throw std::invalid_argument("insulin kinetics: t_p must be < t_d/2");
    InsulinKineticsParams p;
    p.t_p_minutes = t_p;
    p.t_d_minutes = t_d;
    const double r = t_p / t_d;
    p.tau = t_p * (1.0 - r) / (1.0 - 2.0 * r);
    p.rise_factor = 2.0 * p.tau / t_d;
    p.scale = 1.0 / (1.0 - p.rise_factor + (1.0 + p.rise_factor) * std::exp(-t_d / p.tau));
    return p;
}

double iob_at(double minutes, const InsulinKineticsParams& p) {
    if (minutes < 0.0) throw std::invalid_argument("iob_at: negative elapsed time");
    if (p.tau <= 0.0) throw std::invalid_argument("iob_at: params not derived (use from_peak_duration)");
    if (minutes >= p.t_d_minutes) return 0.0;
    const double t = minutes;
    const double one_minus_a = 1.0 - p.rise_factor;
    const double inner =
        (t * t / (p.tau * p.t_d_minutes * one_minus_a) - t / p.tau - 1.0) * std::exp(-t / p.tau) + 1.0;
    const double v = 1.0 - p.scale * one_minus_a * inner;
    return std::min(1.0, std::max(0.0, v));
}

std::vector<double> iob_curve(const std::vector<double>& elapsed_minutes,
                              const InsulinKineticsParams& params) {
    std::vector<double> out;
    out.reserve(elapsed_minutes.size());
    for (double t : elapsed_minutes) out.push_back(iob_at(t, params));
    return out;
}

namespace {

// Nearest grid index of an event time; may be negative for events before the grid.
std::ptrdiff_t grid_index(Timestamp t, Timestamp grid_start, int step_seconds) {
    const double idx = static_cast<double>(t - grid_start) / static_cast<double>(step_seconds);
    return static_cast<std::ptrdiff_t>(std::llround(idx));
}

}  // namespace

std::vector<double> operative_carbs(const std::vector<EventRecord>& meals,
                                    Timestamp grid_start, int step_seconds, std::size_t length,
                                    const CarbKineticsParams& params) {
    params.validate();
    std::vector<double> out(length, 0.0);
    for (const auto& ev : meals) {
        if (ev.magnitude < 0.0) throw std::invalid_argument("operative_carbs: negative meal size");
        if (ev.magnitude == 0.0) continue;
        const std::ptrdiff_t m = grid_index(ev.time, grid_start, step_seconds);
        const std::ptrdiff_t first = std::max<std::ptrdiff_t>(m + params.delay, 0);
        const std::ptrdiff_t last = std::min<std::ptrdiff_t>(m + params.end_at,
                                                             static_cast<std::ptrdiff_t>(length));
        for (std::ptrdiff_t k = first; k < last; ++k) {
            const auto s = static_cast<double>(k - m);
            double v;
            if (s < params.peak_at)
                v = params.alpha_inc * (s - (params.delay - 1)) * ev.magnitude;
            else
                v = (1.0 - params.alpha_dec * (s - params.peak_at)) * ev.magnitude;
            out[static_cast<std::size_t>(k)] += std::max(0.0, v);
        }
    }
    return out;
}

std::vector<double> active_insulin_series(const std::vector<EventRecord>& boluses,
                                          Timestamp grid_start, int step_seconds, std::size_t length,
                                          const InsulinKineticsParams& params) {
    std::vector<double> out(length, 0.0);
    for (const auto& ev : boluses) {
        if (ev.magnitude < 0.0) throw std::invalid_argument("active_insulin_series: negative dose");
        if (ev.magnitude == 0.0) continue;
        const std::ptrdiff_t b = grid_index(ev.time, grid_start, step_seconds);
        const auto duration_samples =
            static_cast<std::ptrdiff_t>(std::ceil(params.t_d_minutes * 60.0 / step_seconds));
        const std::ptrdiff_t first = std::max<std::ptrdiff_t>(b, 0);
        const std::ptrdiff_t last = std::min<std::ptrdiff_t>(b + duration_samples + 1,
                                                             static_cast<std::ptrdiff_t>(length));
        for (std::ptrdiff_t k = first; k < last; ++k) {
            const double minutes = static_cast<double>(k - b) * step_seconds / 60.0;
            out[static_cast<std::size_t>(k)] += ev.magnitude * iob_at(minutes, params);
        }
    }
    return out;
}

std::vector<EventRecord> basal_to_microboluses(const std::vector<BasalSegment>& segments,
                                               Timestamp grid_start, int step_seconds,
                                               std::size_t length) {
    std::vector<EventRecord> out;
    const Timestamp grid_end = grid_start + static_cast<Timestamp>(length) * step_seconds;
    for (const auto& seg : segments) {
        if (seg.rate_units_per_hour < 0.0)
            throw std::invalid_argument("basal_to_microboluses: negative rate");
        if (seg.rate_units_per_hour == 0.0 || seg.end <= seg.start) continue;
        const double units_per_step = seg.rate_units_per_hour * step_seconds / 3600.0;
        Timestamp t = std::max(seg.start, grid_start);
        // snap forward onto the grid
        const Timestamp off = (t - grid_start) % step_seconds;
        if (off != 0) t += step_seconds - off;
        for (; t < std::min(seg.end, grid_end); t += step_seconds)
            out.push_back({t, EventRecord::Kind::bolus, units_per_step});
    }
    return out;
}

}  // namespace gluconet::ssr
