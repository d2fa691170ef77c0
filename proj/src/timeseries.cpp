#include "gluconet/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gluconet {

bool is_missing(double v) { return std::isnan(v); }

TimeAlignedSeries::TimeAlignedSeries(Timestamp start_time, int step_seconds,
                                     std::vector<std::string> names,
                                     std::vector<std::vector<double>> channels)
    : start_time_(start_time), step_seconds_(step_seconds),
      names_(std::move(names)), channels_(std::move(channels)) {
    if (step_seconds_ <= 0) throw std::invalid_argument("TimeAlignedSeries: step must be > 0");
    if (names_.size() != channels_.size())
        throw std::invalid_argument("TimeAlignedSeries: one name per channel required");
    for (std::size_t i = 1; i < channels_.size(); ++i) {
        if (channels_[i].size() != channels_[0].size())
            throw std::invalid_argument("TimeAlignedSeries: channel '" + names_[i] +
                                        "' length differs from '" + names_[0] + "'");
    }
}

std::size_t TimeAlignedSeries::length() const {
    return channels_.empty() ? 0 : channels_[0].size();
}

bool TimeAlignedSeries::has_channel(const std::string& name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

const std::vector<double>& TimeAlignedSeries::channel(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return channels_[i];
    throw std::invalid_argument("TimeAlignedSeries: no channel '" + name + "'");
}

std::vector<double>& TimeAlignedSeries::channel(const std::string& name) {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return channels_[i];
    throw std::invalid_argument("TimeAlignedSeries: no channel '" + name + "'");
}

void TimeAlignedSeries::add_channel(const std::string& name, std::vector<double> values) {
    if (has_channel(name)) throw std::invalid_argument("TimeAlignedSeries: duplicate channel '" + name + "'");
    if (!channels_.empty() && values.size() != length())
        throw std::invalid_argument("TimeAlignedSeries: channel '" + name + "' length mismatch");
    names_.push_back(name);
    channels_.push_back(std::move(values));
}

TimeAlignedSeries TimeAlignedSeries::slice(std::size_t begin, std::size_t end) const {
    if (begin > end || end > length()) throw std::invalid_argument("TimeAlignedSeries::slice: bad range");
    std::vector<std::vector<double>> out;
    out.reserve(channels_.size());
    for (const auto& ch : channels_)
        out.emplace_back(ch.begin() + static_cast<std::ptrdiff_t>(begin),
                         ch.begin() + static_cast<std::ptrdiff_t>(end));
    return TimeAlignedSeries(time_at(begin), step_seconds_, names_, std::move(out));
}

namespace {

std::vector<double> impute_channel(const std::vector<double>& raw, const std::string& name) {
    const std::size_t n = raw.size();
    std::vector<std::size_t> valid;
    for (std::size_t i = 0; i < n; ++i)
        if (!is_missing(raw[i])) valid.push_back(i);
    if (valid.empty())
        throw std::invalid_argument("impute_gaps: channel '" + name + "' has no valid samples");

    std::vector<double> out(raw);
    // leading/trailing: nearest valid value
    for (std::size_t i = 0; i < valid.front(); ++i) out[i] = raw[valid.front()];
    for (std::size_t i = valid.back() + 1; i < n; ++i) out[i] = raw[valid.back()];
    // interior: linear interpolation between bracketing valid samples
    for (std::size_t v = 0; v + 1 < valid.size(); ++v) {
        const std::size_t a = valid[v], b = valid[v + 1];
        const double ya = raw[a], yb = raw[b];
        for (std::size_t i = a + 1; i < b; ++i) {
            const double t = static_cast<double>(i - a) / static_cast<double>(b - a);
            out[i] = ya + t * (yb - ya);
        }
    }
    return out;
}

}  // namespace

TimeAlignedSeries impute_gaps(const TimeAlignedSeries& raw) {
    if (raw.length() == 0) throw std::invalid_argument("impute_gaps: empty series");
    std::vector<std::vector<double>> channels;
    channels.reserve(raw.channel_count());
    for (const auto& name : raw.channel_names())
        channels.push_back(impute_channel(raw.channel(name), name));
    return TimeAlignedSeries(raw.start_time(), raw.step_seconds(), raw.channel_names(),
                             std::move(channels));
}

std::vector<TimeAlignedSeries> split_on_long_gaps(const TimeAlignedSeries& raw,
                                                  const std::string& guide_channel,
                                                  std::size_t max_gap, std::size_t min_length) {
    const auto& guide = raw.channel(guide_channel);
    const std::size_t n = guide.size();
    std::vector<TimeAlignedSeries> pieces;
    std::size_t begin = 0, i = 0;
    while (i < n) {
        if (!is_missing(guide[i])) { ++i; continue; }
        std::size_t gap_end = i;
        while (gap_end < n && is_missing(guide[gap_end])) ++gap_end;
        if (gap_end - i > max_gap) {
            if (i - begin >= min_length) pieces.push_back(impute_gaps(raw.slice(begin, i)));
            begin = gap_end;
        }
        i = gap_end;
    }
    if (n - begin >= min_length) pieces.push_back(impute_gaps(raw.slice(begin, n)));
    return pieces;
}

WindowedDataset make_windows(const TimeAlignedSeries& series, std::size_t window,
                             std::size_t horizon, const std::string& target_channel) {
    if (window == 0 || horizon == 0) throw std::invalid_argument("make_windows: window and horizon must be >= 1");
    const std::size_t n = series.length();
    if (n < window + horizon)
        throw std::invalid_argument("make_windows: series length " + std::to_string(n) +
                                    " < window + horizon = " + std::to_string(window + horizon));
    const auto& target = series.channel(target_channel);
    const std::size_t channels = series.channel_count();
    const std::size_t count = n - window - horizon + 1;

    WindowedDataset ds;
    ds.window = window;
    ds.horizon = horizon;
    ds.channel_names = series.channel_names();
    ds.inputs.reserve(count);
    ds.targets.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        std::vector<double> in(window * channels);
        for (std::size_t r = 0; r < window; ++r)
            for (std::size_t c = 0; c < channels; ++c)
                in[r * channels + c] = series.channel(series.channel_names()[c])[s + r];
        ds.inputs.push_back(std::move(in));
        ds.targets.emplace_back(target.begin() + static_cast<std::ptrdiff_t>(s + window),
                                target.begin() + static_cast<std::ptrdiff_t>(s + window + horizon));
    }
    return ds;
}

bool NormStats::has(const std::string& name) const {
    return std::find(channel_names.begin(), channel_names.end(), name) != channel_names.end();
}

std::size_t NormStats::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < channel_names.size(); ++i)
        if (channel_names[i] == name) return i;
    throw std::invalid_argument("NormStats: no channel '" + name + "'");
}

double NormStats::normalize(const std::string& name, double v) const {
    const std::size_t i = index_of(name);
    return (v - location[i]) / scale[i];
}

double NormStats::denormalize(const std::string& name, double v) const {
    const std::size_t i = index_of(name);
    return v * scale[i] + location[i];
}

NormStats fit_norm(const TimeAlignedSeries& series, const std::vector<std::string>& channels) {
    NormStats stats;
    for (const auto& name : channels) {
        const auto& v = series.channel(name);
        if (v.empty()) throw std::invalid_argument("fit_norm: empty channel '" + name + "'");
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        var /= static_cast<double>(v.size());
        double sd = std::sqrt(var);
        if (sd == 0.0) {
            stats.warnings.push_back("channel '" + name + "' is constant; using scale 1");
            sd = 1.0;
        }
        stats.channel_names.push_back(name);
        stats.location.push_back(mean);
        stats.scale.push_back(sd);
    }
    return stats;
}

TimeAlignedSeries apply_norm(const TimeAlignedSeries& series, const NormStats& stats) {
    std::vector<std::vector<double>> channels;
    channels.reserve(series.channel_count());
    for (const auto& name : series.channel_names()) {
        std::vector<double> v = series.channel(name);
        if (stats.has(name)) {
            const std::size_t i = stats.index_of(name);
            for (double& x : v) x = (x - stats.location[i]) / stats.scale[i];
        }
        channels.push_back(std::move(v));
    }
    return TimeAlignedSeries(series.start_time(), series.step_seconds(), series.channel_names(),
                             std::move(channels));
}

std::vector<double> apply_norm(const std::vector<double>& values, const NormStats& stats,
                               const std::string& channel) {
    const std::size_t i = stats.index_of(channel);
    std::vector<double> out(values);
    for (double& x : out) x = (x - stats.location[i]) / stats.scale[i];
    return out;
}

std::vector<double> invert_norm(const std::vector<double>& values, const NormStats& stats,
                                const std::string& channel) {
    const std::size_t i = stats.index_of(channel);
    std::vector<double> out(values);
    for (double& x : out) x = x * stats.scale[i] + stats.location[i];
    return out;
}

std::pair<TimeAlignedSeries, TimeAlignedSeries> chrono_split(const TimeAlignedSeries& series,
                                                             double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("chrono_split: train_fraction must be in (0, 1)");
    const auto cut = static_cast<std::size_t>(std::floor(static_cast<double>(series.length()) * train_fraction));
    if (cut == 0 || cut >= series.length())
        throw std::invalid_argument("chrono_split: split leaves an empty side");
    return {series.slice(0, cut), series.slice(cut, series.length())};
}

}  // namespace gluconet
