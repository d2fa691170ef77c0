#include "gluconet/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "gluconet/serialize.hpp"
#include "gluconet/train.hpp"

namespace gluconet::pipeline {

void ExperimentConfig::validate() const {
    if (horizons.empty()) throw std::invalid_argument("experiment: no horizons");
    for (std::size_t h : horizons)
        if (h == 0) throw std::invalid_argument("experiment: horizon must be >= 1");
    if (window == 0) throw std::invalid_argument("experiment: window must be >= 1");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("experiment: train_fraction must be in (0,1)");
    vmd.validate();
    if (split_index < 1 || split_index >= static_cast<std::size_t>(vmd.modes))
        throw std::invalid_argument("experiment: split_index must be in [1, modes)");
    carb.validate();
    kd.validate();
    for (double a : kd_alpha_sweep)
        if (!(a >= 0.0 && a <= 1.0))
            throw std::invalid_argument("experiment: kd_alpha_sweep values must be in [0,1]");
    if (runs < 1) throw std::invalid_argument("experiment: runs must be >= 1");
    if (epochs_low < 1 || epochs_teacher < 1 || epochs_student < 1)
        throw std::invalid_argument("experiment: epochs must be >= 1");
    if (batch == 0) throw std::invalid_argument("experiment: batch must be >= 1");
    if (jobs < 0) throw std::invalid_argument("experiment: jobs must be >= 0");
}

void ExperimentConfig::apply_desk_epochs() {
    epochs_low = 30;
    epochs_teacher = 50;
    epochs_student = 50;
}

void ExperimentConfig::apply_paper_epochs() {
    epochs_low = 300;
    epochs_teacher = 500;
    epochs_student = 500;
}

namespace {

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t tag) {
    std::uint64_t z = base * 0x9e3779b97f4a7c15ull + tag;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// SSR event channels evaluated on a segment's grid.
void add_event_channels(TimeAlignedSeries& series, const dataio::PatientRecord& record,
                        const ExperimentConfig& cfg) {
    const auto insulin_params =
        ssr::InsulinKineticsParams::from_peak_duration(cfg.insulin_t_p, cfg.insulin_t_d);
    series.add_channel(kCarbChannel,
                       ssr::operative_carbs(record.meals, series.start_time(), series.step_seconds(),
                                            series.length(), cfg.carb));
    std::vector<ssr::EventRecord> doses = record.boluses;
    const auto micro = ssr::basal_to_microboluses(record.basal, series.start_time(),
                                                  series.step_seconds(), series.length());
    doses.insert(doses.end(), micro.begin(), micro.end());
    std::sort(doses.begin(), doses.end(),
              [](const ssr::EventRecord& a, const ssr::EventRecord& b) { return a.time < b.time; });
    series.add_channel(kInsulinChannel,
                       ssr::active_insulin_series(doses, series.start_time(), series.step_seconds(),
                                                  series.length(), insulin_params));
}

struct SegmentSide {
    std::vector<TimeAlignedSeries> train;
    std::vector<TimeAlignedSeries> test;
};

// Imputed contiguous glucose segments assigned to train/test so every train
// timestamp precedes every test timestamp.
SegmentSide split_segments(const dataio::PatientRecord& record,
                           const std::optional<dataio::PatientRecord>& test_record,
                           const ExperimentConfig& cfg) {
    SegmentSide out;
    const std::size_t min_len = std::max<std::size_t>(cfg.window + 1, 16);
    if (test_record) {
        out.train = split_on_long_gaps(dataio::record_to_series(record), kGlucoseChannel,
                                       cfg.max_gap, min_len);
        out.test = split_on_long_gaps(dataio::record_to_series(*test_record), kGlucoseChannel,
                                      cfg.max_gap, min_len);
        return out;
    }
    auto segments = split_on_long_gaps(dataio::record_to_series(record), kGlucoseChannel,
                                       cfg.max_gap, min_len);
    std::size_t total = 0;
    for (const auto& s : segments) total += s.length();
    const auto cut = static_cast<std::size_t>(std::floor(static_cast<double>(total) * cfg.train_fraction));
    std::size_t seen = 0;
    for (auto& seg : segments) {
        if (seen + seg.length() <= cut) {
            seen += seg.length();
            out.train.push_back(std::move(seg));
        } else if (seen >= cut) {
            out.test.push_back(std::move(seg));
        } else {
            const std::size_t k = cut - seen;
            seen += seg.length();
            if (k >= min_len) out.train.push_back(seg.slice(0, k));
            if (seg.length() - k >= min_len) out.test.push_back(seg.slice(k, seg.length()));
        }
    }
    if (out.train.empty() || out.test.empty())
        throw std::invalid_argument("experiment: not enough contiguous data for a train/test split");
    return out;
}

}  // namespace

SplitFeatures build_feature_sets(const dataio::PatientRecord& record,
                                 const std::optional<dataio::PatientRecord>& test_record,
                                 const ExperimentConfig& cfg) {
    cfg.validate();
    SegmentSide sides = split_segments(record, test_record, cfg);

    SplitFeatures out;
    struct Raw {
        TimeAlignedSeries base;
        vmd::GroupedModes grouped;
    };
    std::vector<Raw> train_raw, test_raw;

    auto decompose_side = [&](std::vector<TimeAlignedSeries>& segs, std::vector<Raw>& raws,
                              std::vector<vmd::ModeSet>& mode_sets) {
        for (auto& seg : segs) {
            vmd::ModeSet modes = vmd::vmd_decompose(seg.channel(kGlucoseChannel), cfg.vmd);
            raws.push_back({std::move(seg),
                            vmd::group_modes(modes, cfg.split_index, cfg.residual_to_low)});
            mode_sets.push_back(std::move(modes));
        }
    };
    decompose_side(sides.train, train_raw, out.train_modes);
    decompose_side(sides.test, test_raw, out.test_modes);

    // normalization statistics come from the train split only: the low
    // channel for the GlucoNet path, the raw glucose channel for the baseline
    std::vector<double> train_low, train_glucose;
    for (const auto& r : train_raw) {
        train_low.insert(train_low.end(), r.grouped.low.begin(), r.grouped.low.end());
        const auto& g = r.base.channel(kGlucoseChannel);
        train_glucose.insert(train_glucose.end(), g.begin(), g.end());
    }
    TimeAlignedSeries train_stats_series(0, kDefaultStepSeconds, {kLowChannel, kGlucoseChannel},
                                         {std::move(train_low), std::move(train_glucose)});
    out.norm = fit_norm(train_stats_series, {kLowChannel, kGlucoseChannel});

    const dataio::PatientRecord& test_events = test_record ? *test_record : record;
    auto build_side = [&](std::vector<Raw>& raws, const dataio::PatientRecord& events,
                          std::vector<SegmentFeatures>& dst) {
        for (auto& r : raws) {
            SegmentFeatures f;
            f.raw = TimeAlignedSeries(r.base.start_time(), r.base.step_seconds(), {kGlucoseChannel},
                                      {apply_norm(r.base.channel(kGlucoseChannel), out.norm,
                                                  kGlucoseChannel)});
            add_event_channels(f.raw, events, cfg);
            f.lffd = TimeAlignedSeries(r.base.start_time(), r.base.step_seconds(), {kLowChannel},
                                       {apply_norm(r.grouped.low, out.norm, kLowChannel)});
            f.lffd.add_channel(kCarbChannel, f.raw.channel(kCarbChannel));
            f.lffd.add_channel(kInsulinChannel, f.raw.channel(kInsulinChannel));
            f.hffd = TimeAlignedSeries(r.base.start_time(), r.base.step_seconds(), {kHighChannel},
                                       {std::move(r.grouped.high)});
            f.hffd.add_channel(kCarbChannel, f.raw.channel(kCarbChannel));
            f.hffd.add_channel(kInsulinChannel, f.raw.channel(kInsulinChannel));
            dst.push_back(std::move(f));
        }
    };
    build_side(train_raw, record, out.train);
    build_side(test_raw, test_events, out.test);
    return out;
}

std::vector<SegmentFeatures> build_inference_features(const dataio::PatientRecord& record,
                                                      const ExperimentConfig& cfg,
                                                      const NormStats& stats) {
    const std::size_t min_len = std::max<std::size_t>(cfg.window + 1, 16);
    auto segments = split_on_long_gaps(dataio::record_to_series(record), kGlucoseChannel,
                                       cfg.max_gap, min_len);
    if (segments.empty())
        throw std::invalid_argument("inference: no contiguous segment long enough");
    std::vector<SegmentFeatures> out;
    for (auto& seg : segments) {
        const vmd::ModeSet modes = vmd::vmd_decompose(seg.channel(kGlucoseChannel), cfg.vmd);
        vmd::GroupedModes grouped = vmd::group_modes(modes, cfg.split_index, cfg.residual_to_low);
        SegmentFeatures f;
        f.raw = TimeAlignedSeries(seg.start_time(), seg.step_seconds(), {kGlucoseChannel},
                                  {apply_norm(seg.channel(kGlucoseChannel), stats, kGlucoseChannel)});
        add_event_channels(f.raw, record, cfg);
        f.lffd = TimeAlignedSeries(seg.start_time(), seg.step_seconds(), {kLowChannel},
                                   {apply_norm(grouped.low, stats, kLowChannel)});
        f.lffd.add_channel(kCarbChannel, f.raw.channel(kCarbChannel));
        f.lffd.add_channel(kInsulinChannel, f.raw.channel(kInsulinChannel));
        f.hffd = TimeAlignedSeries(seg.start_time(), seg.step_seconds(), {kHighChannel},
                                   {std::move(grouped.high)});
        f.hffd.add_channel(kCarbChannel, f.raw.channel(kCarbChannel));
        f.hffd.add_channel(kInsulinChannel, f.raw.channel(kInsulinChannel));
        out.push_back(std::move(f));
    }
    return out;
}

namespace {

void append_windows(nn::BatchDataset<float>& dst, const WindowedDataset& src) {
    nn::BatchDataset<float> part = nn::BatchDataset<float>::from_windows(src);
    if (dst.count == 0) {
        dst = std::move(part);
        return;
    }
    if (dst.window != part.window || dst.channels != part.channels || dst.horizon != part.horizon)
        throw std::invalid_argument("append_windows: mismatched shapes");
    dst.count += part.count;
    dst.inputs.insert(dst.inputs.end(), part.inputs.begin(), part.inputs.end());
    dst.targets.insert(dst.targets.end(), part.targets.begin(), part.targets.end());
}

}  // namespace

HorizonData make_horizon_data(const std::vector<SegmentFeatures>& segments, std::size_t window,
                              std::size_t horizon, const NormStats* stats) {
    HorizonData out;
    for (const auto& seg : segments) {
        if (seg.raw.length() < window + horizon) continue;  // segment too short for this horizon
        append_windows(out.lffd, make_windows(seg.lffd, window, horizon, kLowChannel));
        append_windows(out.hffd, make_windows(seg.hffd, window, horizon, kHighChannel));
        const WindowedDataset raw = make_windows(seg.raw, window, horizon, kGlucoseChannel);
        for (const auto& t : raw.targets)
            for (double v : t)
                out.actual.push_back(stats ? stats->denormalize(kGlucoseChannel, v) : v);
        append_windows(out.raw, raw);
    }
    if (out.lffd.count == 0)
        throw std::invalid_argument("make_horizon_data: no segment long enough for window+horizon");
    return out;
}

TrainedModels train_all(const HorizonData& train_data, const ExperimentConfig& cfg,
                        std::size_t horizon, unsigned run_seed, bool with_baseline) {
    TrainedModels models;
    nn::TrainConfig tc;
    tc.batch = cfg.batch;
    tc.lr = cfg.lr;

    nn::LowFreqConfig low_cfg = nn::LowFreqConfig::for_lstm_vec(cfg.lstm_vec, horizon);
    low_cfg.window = cfg.window;
    models.low = std::make_unique<nn::LowFreqModel<float>>(low_cfg, mix_seed(run_seed, 1));
    tc.epochs = cfg.epochs_low;
    tc.shuffle_seed = mix_seed(run_seed, 11);
    models.low_log = nn::train_supervised(*models.low, train_data.lffd, tc, &models.low_best);

    nn::TransformerConfig teacher_cfg = nn::TransformerConfig::teacher(horizon);
    teacher_cfg.window = cfg.window;
    models.teacher = std::make_unique<nn::TransformerModel<float>>(teacher_cfg, mix_seed(run_seed, 2));
    tc.epochs = cfg.epochs_teacher;
    tc.shuffle_seed = mix_seed(run_seed, 12);
    models.teacher_log = nn::train_supervised(*models.teacher, train_data.hffd, tc, &models.teacher_best);

    nn::TransformerConfig student_cfg = nn::TransformerConfig::student(horizon);
    student_cfg.window = cfg.window;
    models.student_kd = std::make_unique<nn::TransformerModel<float>>(student_cfg, mix_seed(run_seed, 3));
    nn::KdConfig kd = cfg.kd;
    kd.epochs = cfg.epochs_student;
    tc.shuffle_seed = mix_seed(run_seed, 13);
    if (!models.teacher_log.diverged)
        models.student_kd_log = nn::distill_train(*models.student_kd, *models.teacher,
                                                  train_data.hffd, kd, tc, &models.student_kd_best);

    if (cfg.train_student_supervised) {
        models.student_sup =
            std::make_unique<nn::TransformerModel<float>>(student_cfg, mix_seed(run_seed, 3));
        tc.epochs = cfg.epochs_student;
        tc.shuffle_seed = mix_seed(run_seed, 13);
        models.student_sup_log =
            nn::train_supervised(*models.student_sup, train_data.hffd, tc, &models.student_sup_best);
    }

    if (with_baseline) {
        nn::BaselineConfig base_cfg;
        base_cfg.horizon = horizon;
        base_cfg.window = cfg.window;
        models.baseline = std::make_unique<nn::BaselineModel<float>>(base_cfg, mix_seed(run_seed, 5));
        tc.epochs = cfg.epochs_low;
        tc.shuffle_seed = mix_seed(run_seed, 15);
        models.baseline_log =
            nn::train_supervised(*models.baseline, train_data.raw, tc, &models.baseline_best);
    }
    return models;
}

CombinedPrediction predict_full(nn::LowFreqModel<float>& low, nn::TransformerModel<float>& high,
                                const HorizonData& data, const NormStats& norm) {
    if (low.config().horizon != high.config().horizon)
        throw std::invalid_argument("predict_full: horizon mismatch between models");
    const std::vector<float> y1 = nn::predict_all(low, data.lffd);
    const std::vector<float> y2 = nn::predict_all(high, data.hffd);
    CombinedPrediction out;
    out.values.resize(y1.size());
    const std::size_t li = norm.index_of(kLowChannel);
    for (std::size_t i = 0; i < y1.size(); ++i) {
        const double denormed = static_cast<double>(y1[i]) * norm.scale[li] + norm.location[li];
        out.values[i] = denormed + static_cast<double>(y2[i]);
        if (!(out.values[i] >= 0.0 && out.values[i] <= 600.0)) ++out.out_of_range;
    }
    return out;
}

namespace {

struct JobResult {
    std::vector<report::RunRow> rows;
    std::vector<report::StepRow> steps;
    std::vector<LossRow> losses;
    std::string error;
};

void append_losses(JobResult& jr, const std::string& model, std::size_t horizon, int run,
                   const nn::TrainLog& log) {
    for (std::size_t e = 0; e < log.epoch_loss.size(); ++e)
        jr.losses.push_back({model, horizon, run, static_cast<int>(e), log.epoch_loss[e]});
}

template <class Model>
void save_model_files(const std::string& dir, const std::string& tag, Model& model,
                      const nn::BestSnapshot<float>& best) {
    nn::save_checkpoint(dir + "/ckpt_" + tag + "_final.bin", model.params());
    if (best.epoch >= 0) {
        // write the best-epoch weights through a scratch copy of the store
        auto& ps = model.params();
        std::vector<std::vector<float>> final_values(ps.size());
        for (std::size_t i = 0; i < ps.size(); ++i) final_values[i] = ps.tensor(i).values;
        best.restore_into(ps);
        nn::save_checkpoint(dir + "/ckpt_" + tag + "_best.bin", ps);
        for (std::size_t i = 0; i < ps.size(); ++i) ps.tensor(i).values = std::move(final_values[i]);
    }
}

report::RunRow make_row(const std::string& patient, const std::string& model, std::size_t horizon,
                        int run, unsigned seed, const eval::Metrics& m, std::size_t params,
                        std::size_t out_of_range, bool diverged) {
    report::RunRow row;
    row.patient = patient;
    row.model = model;
    row.horizon_samples = horizon;
    row.run = run;
    row.seed = seed;
    row.metrics = m;
    row.params = params;
    row.out_of_range = out_of_range;
    row.diverged = diverged;
    return row;
}

}  // namespace

ExperimentResult run_experiment(const dataio::PatientRecord& record,
                                const std::optional<dataio::PatientRecord>& test_record,
                                const ExperimentConfig& cfg, std::ostream* log,
                                const std::string& checkpoint_dir) {
    cfg.validate();
    std::mutex log_mutex;
    auto say = [&](const std::string& msg) {
        if (!log) return;
        const std::lock_guard<std::mutex> lock(log_mutex);
        (*log) << msg << '\n' << std::flush;
    };

    const SplitFeatures features = build_feature_sets(record, test_record, cfg);
    say("features: " + std::to_string(features.train.size()) + " train / " +
        std::to_string(features.test.size()) + " test segments");

    struct PerHorizon {
        std::size_t horizon;
        HorizonData train;
        HorizonData test;
        bool baseline;
    };
    std::vector<PerHorizon> horizon_data;
    for (std::size_t h : cfg.horizons) {
        PerHorizon ph;
        ph.horizon = h;
        ph.train = make_horizon_data(features.train, cfg.window, h, &features.norm);
        ph.test = make_horizon_data(features.test, cfg.window, h, &features.norm);
        ph.baseline = cfg.baseline_horizons.empty() ||
                      std::find(cfg.baseline_horizons.begin(), cfg.baseline_horizons.end(), h) !=
                          cfg.baseline_horizons.end();
        say("horizon " + std::to_string(h) + ": " + std::to_string(ph.train.lffd.count) +
            " train / " + std::to_string(ph.test.lffd.count) + " test windows");
        horizon_data.push_back(std::move(ph));
    }

    const std::string patient = record.patient_id;
    const int total_jobs = static_cast<int>(horizon_data.size()) * cfg.runs;
    std::vector<JobResult> results(static_cast<std::size_t>(total_jobs));

    auto run_job_inner = [&](int job_index) {
        const auto& ph = horizon_data[static_cast<std::size_t>(job_index) / cfg.runs];
        const int run = job_index % cfg.runs;
        const unsigned run_seed = cfg.seed + 1000u * static_cast<unsigned>(run);
        JobResult& jr = results[static_cast<std::size_t>(job_index)];

        TrainedModels models = train_all(ph.train, cfg, ph.horizon, run_seed, ph.baseline);
        append_losses(jr, "low", ph.horizon, run, models.low_log);
        append_losses(jr, "teacher", ph.horizon, run, models.teacher_log);
        append_losses(jr, "student_kd", ph.horizon, run, models.student_kd_log);
        if (models.student_sup) append_losses(jr, "student_sup", ph.horizon, run, models.student_sup_log);
        if (models.baseline) append_losses(jr, "baseline", ph.horizon, run, models.baseline_log);
        if (!checkpoint_dir.empty()) {
            const std::string tag =
                "h" + std::to_string(ph.horizon) + "_run" + std::to_string(run);
            save_model_files(checkpoint_dir, tag + "_low", *models.low, models.low_best);
            save_model_files(checkpoint_dir, tag + "_teacher", *models.teacher, models.teacher_best);
            save_model_files(checkpoint_dir, tag + "_student_kd", *models.student_kd,
                             models.student_kd_best);
            if (models.student_sup)
                save_model_files(checkpoint_dir, tag + "_student_sup", *models.student_sup,
                                 models.student_sup_best);
            if (models.baseline)
                save_model_files(checkpoint_dir, tag + "_baseline", *models.baseline,
                                 models.baseline_best);
        }
        auto eval_variant = [&](const std::string& name, nn::TransformerModel<float>* high,
                                bool variant_diverged) {
            if (!high) return;
            const std::size_t params =
                nn::count_params(models.low->params()) + nn::count_params(high->params());
            if (variant_diverged || models.low_log.diverged) {
                jr.rows.push_back(make_row(patient, name, ph.horizon, run, run_seed, {}, params, 0, true));
                say("job h=" + std::to_string(ph.horizon) + " run=" + std::to_string(run) + " " +
                    name + ": diverged, skipping metrics");
                return;
            }
            const CombinedPrediction pred = predict_full(*models.low, *high, ph.test, features.norm);
            const eval::Metrics m = eval::compute_metrics(ph.test.actual, pred.values);
            jr.rows.push_back(make_row(patient, name, ph.horizon, run, run_seed, m, params,
                                       pred.out_of_range, false));
            const auto steps = eval::per_step_metrics(ph.test.actual, pred.values, ph.horizon);
            for (std::size_t s = 0; s < steps.size(); ++s)
                jr.steps.push_back({patient, name, ph.horizon, run, s + 1, steps[s]});
        };

        if (cfg.train_teacher_variant)
            eval_variant("gluconet_lt", models.teacher.get(), models.teacher_log.diverged);
        if (cfg.train_student_supervised)
            eval_variant("gluconet_st", models.student_sup.get(), models.student_sup_log.diverged);
        eval_variant("gluconet_kd_st", models.student_kd.get(),
                     models.teacher_log.diverged || models.student_kd_log.diverged);

        for (double alpha : cfg.kd_alpha_sweep) {
            nn::TransformerConfig student_cfg = nn::TransformerConfig::student(ph.horizon);
            student_cfg.window = cfg.window;
            nn::TransformerModel<float> swept(student_cfg, mix_seed(run_seed, 3));
            nn::KdConfig kd = cfg.kd;
            kd.alpha = alpha;
            kd.epochs = cfg.epochs_student;
            nn::TrainConfig tc;
            tc.batch = cfg.batch;
            tc.lr = cfg.lr;
            tc.shuffle_seed = mix_seed(run_seed, 13);
            nn::TrainLog log;
            if (!models.teacher_log.diverged)
                log = nn::distill_train(swept, *models.teacher, ph.train.hffd, kd, tc);
            char name[48];
            std::snprintf(name, sizeof(name), "gluconet_kd_st@a=%g", alpha);
            eval_variant(name, &swept, models.teacher_log.diverged || log.diverged);
        }

        if (models.baseline) {
            const std::size_t params = nn::count_params(models.baseline->params());
            if (models.baseline_log.diverged) {
                jr.rows.push_back(
                    make_row(patient, "baseline", ph.horizon, run, run_seed, {}, params, 0, true));
            } else {
                const std::vector<float> raw_pred = nn::predict_all(*models.baseline, ph.test.raw);
                std::vector<double> pred(raw_pred.size());
                for (std::size_t i = 0; i < raw_pred.size(); ++i)
                    pred[i] = features.norm.denormalize(kGlucoseChannel,
                                                        static_cast<double>(raw_pred[i]));
                std::size_t oor = 0;
                for (double v : pred)
                    if (!(v >= 0.0 && v <= 600.0)) ++oor;
                const eval::Metrics m = eval::compute_metrics(ph.test.actual, pred);
                jr.rows.push_back(
                    make_row(patient, "baseline", ph.horizon, run, run_seed, m, params, oor, false));
                const auto steps = eval::per_step_metrics(ph.test.actual, pred, ph.horizon);
                for (std::size_t s = 0; s < steps.size(); ++s)
                    jr.steps.push_back({patient, "baseline", ph.horizon, run, s + 1, steps[s]});
            }
        }
        say("job h=" + std::to_string(ph.horizon) + " run=" + std::to_string(run) + " done");
    };
    auto run_job = [&](int job_index) {
        try {
            run_job_inner(job_index);
        } catch (const std::exception& e) {
            results[static_cast<std::size_t>(job_index)].error = e.what();
            say(std::string("job failed: ") + e.what());
        }
    };

    int workers = cfg.jobs;
    if (workers == 0)
        workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min(workers, total_jobs);
    if (workers <= 1) {
        for (int j = 0; j < total_jobs; ++j) run_job(j);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int j = next.fetch_add(1); j < total_jobs; j = next.fetch_add(1)) run_job(j);
            });
        for (auto& t : pool) t.join();
    }

    ExperimentResult out;
    out.norm = features.norm;
    for (const auto& jr : results) {
        out.runs.insert(out.runs.end(), jr.rows.begin(), jr.rows.end());
        out.steps.insert(out.steps.end(), jr.steps.begin(), jr.steps.end());
        out.losses.insert(out.losses.end(), jr.losses.begin(), jr.losses.end());
        if (!jr.error.empty()) out.errors.push_back(jr.error);
    }
    return out;
}

}  // namespace gluconet::pipeline
