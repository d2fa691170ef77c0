#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "gluconet/dataio.hpp"
#include "gluconet/distill.hpp"
#include "gluconet/metrics.hpp"
#include "gluconet/models.hpp"
#include "gluconet/report.hpp"
#include "gluconet/ssr.hpp"
#include "gluconet/timeseries.hpp"
#include "gluconet/train.hpp"
#include "gluconet/vmd.hpp"

namespace gluconet::pipeline {

inline constexpr const char* kLowChannel = "glucose_low";
inline constexpr const char* kHighChannel = "glucose_high";
inline constexpr const char* kGlucoseChannel = "glucose";
inline constexpr const char* kCarbChannel = "carbs";
inline constexpr const char* kInsulinChannel = "insulin";

struct ExperimentConfig {
    std::vector<std::size_t> horizons{1, 6, 12};
    std::size_t window = 36;
    double train_fraction = 0.7;

    vmd::VmdConfig vmd;
    std::size_t split_index = 2;
    bool residual_to_low = true;

    ssr::CarbKineticsParams carb;
    double insulin_t_p = 55.0;
    double insulin_t_d = 300.0;

    std::vector<std::pair<std::size_t, std::size_t>> lstm_vec{{32, 16}};
    nn::KdConfig kd;
    /// extra distillation weights to sweep; each adds a gluconet_kd_st@a=...
    /// row per (horizon, run) on top of the primary kd.alpha student
    std::vector<double> kd_alpha_sweep;
    int epochs_low = 300;
    int epochs_teacher = 500;
    int epochs_student = 500;
    double lr = 0.001;
    std::size_t batch = 64;
    int runs = 5;
    unsigned seed = 1;

    bool train_teacher_variant = true;      // GlucoNet(LT) row
    bool train_student_supervised = true;   // GlucoNet(ST) row, no KD
    std::vector<std::size_t> baseline_horizons;  // empty = all horizons
    std::size_t max_gap = 6;               // imputation limit before a segment split
    int jobs = 1;

    void validate() const;
    /// Reduced training budget (30/50/50 epochs) for desk-scale runs.
    void apply_desk_epochs();
    void apply_paper_epochs();
};

/// Feature channels of one contiguous segment of one split.
/// LFFD: normalized low-frequency glucose + operative carbs + active insulin.
/// HFFD: raw high-frequency glucose + the same transformed event channels.
/// raw:  undecomposed glucose (z-scored for the baseline model's sake) +
///       event channels.
struct SegmentFeatures {
    TimeAlignedSeries lffd;
    TimeAlignedSeries hffd;
    TimeAlignedSeries raw;
};

struct SplitFeatures {
    std::vector<SegmentFeatures> train;
    std::vector<SegmentFeatures> test;
    /// glucose_low and glucose statistics, both fit on the train split only
    NormStats norm;
    std::vector<vmd::ModeSet> train_modes;
    std::vector<vmd::ModeSet> test_modes;
};

/// VMD per split (never across), SSR transforms from the raw event streams,
/// channels stacked. A missing test record makes a chronological split of the
/// train record at cfg.train_fraction.
SplitFeatures build_feature_sets(const dataio::PatientRecord& record,
                                 const std::optional<dataio::PatientRecord>& test_record,
                                 const ExperimentConfig& cfg);

/// Feature channels for inference on new data using normalization statistics
/// fit at training time.
std::vector<SegmentFeatures> build_inference_features(const dataio::PatientRecord& record,
                                                      const ExperimentConfig& cfg,
                                                      const NormStats& stats);

/// Windows of every segment concatenated chronologically.
struct HorizonData {
    nn::BatchDataset<float> lffd;
    nn::BatchDataset<float> hffd;
    nn::BatchDataset<float> raw;
    std::vector<double> actual;  // raw glucose targets in mg/dL, [N, h] flattened
};

/// `stats`, when given, denormalizes the glucose targets back into `actual`.
HorizonData make_horizon_data(const std::vector<SegmentFeatures>& segments, std::size_t window,
                              std::size_t horizon, const NormStats* stats = nullptr);

/// Trained model set of one (horizon, run) job.
struct TrainedModels {
    std::unique_ptr<nn::LowFreqModel<float>> low;
    std::unique_ptr<nn::TransformerModel<float>> teacher;
    std::unique_ptr<nn::TransformerModel<float>> student_kd;
    std::unique_ptr<nn::TransformerModel<float>> student_sup;
    std::unique_ptr<nn::BaselineModel<float>> baseline;
    nn::TrainLog low_log, teacher_log, student_kd_log, student_sup_log, baseline_log;
    nn::BestSnapshot<float> low_best, teacher_best, student_kd_best, student_sup_best, baseline_best;
    bool diverged() const {
        return low_log.diverged || teacher_log.diverged || student_kd_log.diverged ||
               student_sup_log.diverged || baseline_log.diverged;
    }
};

TrainedModels train_all(const HorizonData& train_data, const ExperimentConfig& cfg,
                        std::size_t horizon, unsigned run_seed, bool with_baseline);

/// Denorm(low prediction) + high prediction, in mg/dL. Values outside
/// [0, 600] are counted (not clamped).
struct CombinedPrediction {
    std::vector<double> values;  // [N, h]
    std::size_t out_of_range = 0;
};

CombinedPrediction predict_full(nn::LowFreqModel<float>& low, nn::TransformerModel<float>& high,
                                const HorizonData& data, const NormStats& norm);

struct LossRow {
    std::string model;
    std::size_t horizon_samples = 0;
    int run = 0;
    int epoch = 0;
    double loss = 0.0;
};

struct ExperimentResult {
    std::vector<report::RunRow> runs;
    std::vector<report::StepRow> steps;
    std::vector<LossRow> losses;
    NormStats norm;
    /// per-job failures; rows from healthy jobs are still present
    std::vector<std::string> errors;
};

/// The full protocol: feature construction, per-horizon window generation,
/// `runs` independent seeded trainings of every model variant, combined
/// inference on the test split, metrics. Jobs (horizon x run) execute in
/// parallel up to cfg.jobs with isolated state; results are assembled in a
/// fixed order so output is independent of scheduling. A non-empty
/// checkpoint_dir receives final and best-epoch parameter files plus an
/// architecture sidecar per trained model.
ExperimentResult run_experiment(const dataio::PatientRecord& record,
                                const std::optional<dataio::PatientRecord>& test_record,
                                const ExperimentConfig& cfg, std::ostream* log = nullptr,
                                const std::string& checkpoint_dir = "");

}  // namespace gluconet::pipeline
