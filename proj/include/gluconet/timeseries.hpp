#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace gluconet {

/// Unix time in seconds.
using Timestamp = std::int64_t;

inline constexpr int kDefaultStepSeconds = 300;  // CGM grid: one sample per 5 minutes

inline double missing_value() { return std::numeric_limits<double>::quiet_NaN(); }
bool is_missing(double v);

/// Uniformly sampled multi-channel record. Sample i of every channel sits at
/// start_time + i * step_seconds. All channels have identical length and the
/// grid has no holes; series containing missing samples (NaN) are only valid
/// as input to impute_gaps / split_on_long_gaps.
class TimeAlignedSeries {
public:
    TimeAlignedSeries() = default;
    TimeAlignedSeries(Timestamp start_time, int step_seconds,
                      std::vector<std::string> names,
                      std::vector<std::vector<double>> channels);

    Timestamp start_time() const { return start_time_; }
    int step_seconds() const { return step_seconds_; }
    std::size_t length() const;
    std::size_t channel_count() const { return names_.size(); }
    Timestamp time_at(std::size_t i) const { return start_time_ + static_cast<Timestamp>(i) * step_seconds_; }

    const std::vector<std::string>& channel_names() const { return names_; }
    bool has_channel(const std::string& name) const;
    const std::vector<double>& channel(const std::string& name) const;
    std::vector<double>& channel(const std::string& name);

    void add_channel(const std::string& name, std::vector<double> values);

    /// Rows [begin, end) as a new series on the shifted grid.
    TimeAlignedSeries slice(std::size_t begin, std::size_t end) const;

private:
    Timestamp start_time_ = 0;
    int step_seconds_ = kDefaultStepSeconds;
    std::vector<std::string> names_;
    std::vector<std::vector<double>> channels_;
};

/// Fills missing samples (NaN): linear interpolation for interior gaps,
/// nearest valid value at the edges. A channel with no valid sample is
/// rejected. The output contains no missing entries.
TimeAlignedSeries impute_gaps(const TimeAlignedSeries& raw);

/// Splits at runs of more than max_gap consecutive missing samples in
/// guide_channel, drops the gap samples and imputes each piece. Pieces
/// shorter than min_length samples are discarded.
std::vector<TimeAlignedSeries> split_on_long_gaps(const TimeAlignedSeries& raw,
                                                  const std::string& guide_channel,
                                                  std::size_t max_gap = 6,
                                                  std::size_t min_length = 2);

/// Sliding windows of all channels (stride 1) paired with the next `horizon`
/// values of the target channel.
struct WindowedDataset {
    std::size_t window = 0;
    std::size_t horizon = 0;
    std::vector<std::string> channel_names;
    /// inputs[i] is row-major window x channels; targets[i] has horizon entries.
    std::vector<std::vector<double>> inputs;
    std::vector<std::vector<double>> targets;

    std::size_t size() const { return inputs.size(); }
    std::size_t channels() const { return channel_names.size(); }
};

WindowedDataset make_windows(const TimeAlignedSeries& series, std::size_t window,
                             std::size_t horizon, const std::string& target_channel);

/// Per-channel location/scale for z-score normalization. Scales are strictly
/// positive; constant channels get scale 1 and are listed in warnings.
struct NormStats {
    std::vector<std::string> channel_names;
    std::vector<double> location;
    std::vector<double> scale;
    std::vector<std::string> warnings;

    bool has(const std::string& name) const;
    std::size_t index_of(const std::string& name) const;
    double normalize(const std::string& name, double v) const;
    double denormalize(const std::string& name, double v) const;
};

/// Mean/stddev statistics of the named channels. Fit on the training portion
/// only; apply_norm/invert_norm reuse the fitted stats everywhere else.
NormStats fit_norm(const TimeAlignedSeries& series, const std::vector<std::string>& channels);

/// Copies the series with every channel named in stats z-scored.
TimeAlignedSeries apply_norm(const TimeAlignedSeries& series, const NormStats& stats);

std::vector<double> apply_norm(const std::vector<double>& values, const NormStats& stats,
                               const std::string& channel);
std::vector<double> invert_norm(const std::vector<double>& values, const NormStats& stats,
                                const std::string& channel);

/// Chronological split: the first floor(length * train_fraction) samples make
/// the train series, the rest the test series.
std::pair<TimeAlignedSeries, TimeAlignedSeries> chrono_split(const TimeAlignedSeries& series,
                                                             double train_fraction);

}  // namespace gluconet
