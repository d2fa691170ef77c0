// gluconet command-line tool: synthetic fixtures, decomposition, feature
// transforms, training, inference and reporting. Every artifact-writing
// subcommand drops a manifest next to its outputs; rerunning with the same
// manifest reproduces the outputs byte for byte.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "gluconet/config.hpp"
#include "gluconet/dataio.hpp"
#include "gluconet/pipeline.hpp"
#include "gluconet/serialize.hpp"
#include "gluconet/version.hpp"
#include "gluconet/vmd.hpp"

namespace fs = std::filesystem;
using namespace gluconet;

namespace {

std::string default_out_root() {
    const char* env = std::getenv("GLUCONET_OUT");
    return env && *env ? env : ".";
}

fs::path prepare_out_dir(const std::string& out) {
    fs::path dir = out.empty() ? fs::path(default_out_root()) : fs::path(out);
    fs::create_directories(dir);
    return dir;
}

void write_norm_stats(const fs::path& path, const NormStats& stats) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    for (std::size_t i = 0; i < stats.channel_names.size(); ++i) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%s %.17g %.17g\n", stats.channel_names[i].c_str(),
                      stats.location[i], stats.scale[i]);
        os << buf;
    }
}

NormStats read_norm_stats(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    NormStats stats;
    std::string name;
    double loc, scale;
    while (is >> name >> loc >> scale) {
        stats.channel_names.push_back(name);
        stats.location.push_back(loc);
        stats.scale.push_back(scale);
    }
    if (stats.channel_names.empty()) throw std::runtime_error("empty norm stats file " + path.string());
    return stats;
}

struct CommonOpts {
    std::string out;
    std::string config_file;
    unsigned seed = 0;
    bool seed_set = false;
    int verbosity = 1;
};

pipeline::ExperimentConfig resolve_experiment(const CommonOpts& common) {
    config::KvConfig kv;
    if (!common.config_file.empty()) kv = config::KvConfig::parse_file(common.config_file);
    pipeline::ExperimentConfig cfg = config::experiment_from_kv(kv);
    if (common.seed_set) cfg.seed = common.seed;
    return cfg;
}

dataio::PatientRecord load_input(const std::string& csv, const std::string& ohio) {
    if (!csv.empty()) return dataio::load_csv(csv);
    return dataio::load_ohio_xml(ohio);
}

int run_synth(const CommonOpts& common, const std::string& synth_config, int days, double noise,
              bool days_set, bool noise_set) {
    dataio::SynthConfig synth;
    if (!synth_config.empty()) synth = dataio::load_synth_config(synth_config);
    if (days_set) synth.days = days;
    if (noise_set) synth.noise_std = noise;
    if (common.seed_set) synth.seed = common.seed;
    synth.validate();

    const fs::path dir = prepare_out_dir(common.out);
    const auto record = dataio::generate_synthetic(synth);
    dataio::save_csv((dir / "data.csv").string(), record);

    std::ostringstream cfg_text;
    cfg_text << "[synth]\ndays = " << synth.days << "\nbaseline_mgdl = " << synth.baseline_mgdl
             << "\ncircadian_amp = " << synth.circadian_amp << "\ncarb_gain = " << synth.carb_gain
             << "\ninsulin_gain = " << synth.insulin_gain
             << "\nbolus_per_carb = " << synth.bolus_per_carb
             << "\nmeals_per_day = " << synth.meals_per_day
             << "\nmeal_jitter_minutes = " << synth.meal_jitter_minutes
             << "\nnoise_std = " << synth.noise_std << "\nseed = " << synth.seed
             << "\nstep_seconds = " << synth.step_seconds << "\n";
    config::Manifest manifest{"synth", synth.seed, cfg_text.str(), {}};
    config::write_manifest((dir / "manifest.txt").string(), manifest);
    if (common.verbosity > 0)
        std::cout << "wrote " << (dir / "data.csv").string() << " (" << record.glucose.size()
                  << " samples, " << record.meals.size() << " meals)\n";
    return 0;
}

int run_decompose(const CommonOpts& common, const std::string& input, const std::string& channel,
                  vmd::VmdConfig vmd_cfg) {
    const fs::path dir = prepare_out_dir(common.out);
    const auto record = dataio::load_csv(input);
    const auto series = impute_gaps(dataio::record_to_series(record));
    const auto modes = vmd::vmd_decompose(series.channel(channel), vmd_cfg);
    vmd::write_modes_file((dir / "modes.txt").string(), modes);
    if (!modes.converged)
        std::cerr << "note: decomposition hit max_iters without reaching tol (result kept)\n";

    std::ostringstream cfg_text;
    cfg_text << "[vmd]\nmodes = " << vmd_cfg.modes << "\nalpha = " << vmd_cfg.alpha
             << "\ntau_dual = " << vmd_cfg.tau_dual << "\ntol = " << vmd_cfg.tol
             << "\nmax_iters = " << vmd_cfg.max_iters << "\nseed = " << vmd_cfg.seed
             << "\nchannel = " << channel << "\n";
    config::Manifest manifest{"decompose", vmd_cfg.seed, cfg_text.str(),
                              {{input, config::hash_file(input)}}};
    config::write_manifest((dir / "manifest.txt").string(), manifest);
    if (common.verbosity > 0)
        std::cout << "wrote " << (dir / "modes.txt").string() << " (" << modes.mode_count()
                  << " modes, " << modes.iterations_used << " iterations)\n";
    return 0;
}

int run_features(const CommonOpts& common, const std::string& input) {
    const auto cfg = resolve_experiment(common);
    const fs::path dir = prepare_out_dir(common.out);
    const auto record = dataio::load_csv(input);
    const auto series = dataio::record_to_series(record);
    const auto carbs = ssr::operative_carbs(record.meals, series.start_time(),
                                            series.step_seconds(), series.length(), cfg.carb);
    const auto insulin_params =
        ssr::InsulinKineticsParams::from_peak_duration(cfg.insulin_t_p, cfg.insulin_t_d);
    auto doses = record.boluses;
    const auto micro = ssr::basal_to_microboluses(record.basal, series.start_time(),
                                                  series.step_seconds(), series.length());
    doses.insert(doses.end(), micro.begin(), micro.end());
    std::sort(doses.begin(), doses.end(),
              [](const ssr::EventRecord& a, const ssr::EventRecord& b) { return a.time < b.time; });
    const auto insulin = ssr::active_insulin_series(doses, series.start_time(),
                                                    series.step_seconds(), series.length(),
                                                    insulin_params);

    std::ofstream os(dir / "features.csv");
    if (!os) throw std::runtime_error("cannot open features.csv");
    os << "timestamp,operative_carbs,active_insulin\n";
    for (std::size_t i = 0; i < series.length(); ++i) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%.10g,%.10g", carbs[i], insulin[i]);
        os << dataio::format_timestamp(series.time_at(i)) << ',' << buf << '\n';
    }
    os.close();

    config::Manifest manifest{"features", cfg.seed, config::experiment_to_text(cfg),
                              {{input, config::hash_file(input)}}};
    config::write_manifest((dir / "manifest.txt").string(), manifest);
    if (common.verbosity > 0) std::cout << "wrote " << (dir / "features.csv").string() << "\n";
    return 0;
}

struct TrainInputs {
    std::string train_csv, test_csv, ohio_train, ohio_test;
    bool use_synth = false;
    int synth_days = 14;
    unsigned synth_seed = 1;
};

int run_train(const CommonOpts& common, const TrainInputs& in, pipeline::ExperimentConfig cfg,
              const std::string& resolved_config_text) {
    const fs::path dir = prepare_out_dir(common.out);

    dataio::PatientRecord record;
    std::optional<dataio::PatientRecord> test_record;
    std::vector<std::pair<std::string, std::uint64_t>> inputs;
    if (in.use_synth) {
        dataio::SynthConfig synth;
        synth.days = in.synth_days;
        synth.seed = in.synth_seed;
        record = dataio::generate_synthetic(synth);
    } else if (!in.train_csv.empty() || !in.ohio_train.empty()) {
        record = load_input(in.train_csv, in.ohio_train);
        const std::string train_path = in.train_csv.empty() ? in.ohio_train : in.train_csv;
        inputs.emplace_back(train_path, config::hash_file(train_path));
        if (!in.test_csv.empty() || !in.ohio_test.empty()) {
            test_record = load_input(in.test_csv, in.ohio_test);
            const std::string test_path = in.test_csv.empty() ? in.ohio_test : in.test_csv;
            inputs.emplace_back(test_path, config::hash_file(test_path));
        }
    } else {
        throw std::runtime_error("train: provide --train-csv/--ohio-train or --synth");
    }

    const auto result = pipeline::run_experiment(
        record, test_record, cfg, common.verbosity > 0 ? &std::cout : nullptr, dir.string());

    report::write_runs_csv((dir / "runs.csv").string(), result.runs);
    report::write_steps_csv((dir / "steps.csv").string(), result.steps);
    write_norm_stats(dir / "norm_stats.txt", result.norm);
    {
        std::ofstream os(dir / "losses.csv");
        os << "model,horizon_min,run,epoch,loss\n";
        char buf[48];
        for (const auto& row : result.losses) {
            std::snprintf(buf, sizeof(buf), "%.17g", row.loss);
            os << row.model << ',' << report::horizon_minutes(row.horizon_samples) << ',' << row.run
               << ',' << row.epoch << ',' << buf << '\n';
        }
    }
    {
        std::ofstream os(dir / "config.txt");
        os << resolved_config_text;
    }
    {
        std::ofstream os(dir / "arch.txt");
        const std::size_t h = cfg.horizons.front();
        nn::LowFreqConfig low_cfg = nn::LowFreqConfig::for_lstm_vec(cfg.lstm_vec, h);
        low_cfg.window = cfg.window;
        nn::LowFreqModel<float> low(low_cfg, 0);
        nn::TransformerConfig teacher_cfg = nn::TransformerConfig::teacher(h);
        teacher_cfg.window = cfg.window;
        nn::TransformerModel<float> teacher(teacher_cfg, 0);
        nn::TransformerConfig student_cfg = nn::TransformerConfig::student(h);
        student_cfg.window = cfg.window;
        nn::TransformerModel<float> student(student_cfg, 0);
        nn::BaselineConfig base_cfg;
        base_cfg.horizon = h;
        base_cfg.window = cfg.window;
        nn::BaselineModel<float> baseline(base_cfg, 0);
        auto dump = [&os](const std::string& title, const auto& model) {
            os << title << ": " << model.config().describe() << "\n";
            for (const auto& [name, count] : nn::param_breakdown(model.params()))
                os << "  " << name << " " << count << "\n";
            os << "  total " << nn::count_params(model.params()) << "\n";
        };
        dump("low", low);
        dump("teacher", teacher);
        dump("student", student);
        dump("baseline", baseline);
    }
    config::Manifest manifest{"train", cfg.seed, resolved_config_text, std::move(inputs)};
    config::write_manifest((dir / "manifest.txt").string(), manifest);

    std::size_t diverged = 0;
    for (const auto& r : result.runs) diverged += r.diverged ? 1 : 0;
    if (common.verbosity > 0) {
        std::cout << "wrote " << (dir / "runs.csv").string() << " (" << result.runs.size() << " rows";
        if (diverged) std::cout << ", " << diverged << " diverged";
        std::cout << ")\n";
    }
    if (!result.errors.empty()) {
        for (const auto& e : result.errors) std::cerr << "error: job failed: " << e << "\n";
        std::cerr << "error: " << result.errors.size()
                  << " job(s) failed; partial results were written\n";
        return 1;
    }
    return 0;
}

int run_predict(const CommonOpts& common, const std::string& model_dir, const std::string& input,
                std::size_t horizon, int run) {
    const fs::path mdir(model_dir);
    const fs::path dir = prepare_out_dir(common.out);
    const auto kv = config::KvConfig::parse_file((mdir / "config.txt").string());
    pipeline::ExperimentConfig cfg = config::experiment_from_kv(kv);
    const NormStats stats = read_norm_stats(mdir / "norm_stats.txt");

    nn::LowFreqConfig low_cfg = nn::LowFreqConfig::for_lstm_vec(cfg.lstm_vec, horizon);
    low_cfg.window = cfg.window;
    nn::LowFreqModel<float> low(low_cfg, 0);
    nn::TransformerConfig student_cfg = nn::TransformerConfig::student(horizon);
    student_cfg.window = cfg.window;
    nn::TransformerModel<float> student(student_cfg, 0);
    const std::string tag = "h" + std::to_string(horizon) + "_run" + std::to_string(run);
    nn::load_checkpoint((mdir / ("ckpt_" + tag + "_low_final.bin")).string(), low.params());
    nn::load_checkpoint((mdir / ("ckpt_" + tag + "_student_kd_final.bin")).string(),
                        student.params());

    const auto record = dataio::load_csv(input);
    const auto segments = pipeline::build_inference_features(record, cfg, stats);
    std::ofstream os(dir / "predictions.csv");
    if (!os) throw std::runtime_error("cannot open predictions.csv");
    os << "window_end";
    for (std::size_t k = 1; k <= horizon; ++k) os << ",pred_plus_" << k * 5 << "min";
    os << "\n";
    std::size_t out_of_range = 0;
    for (const auto& seg : segments) {
        if (seg.raw.length() < cfg.window + horizon) continue;
        const auto data = pipeline::make_horizon_data({seg}, cfg.window, horizon);
        const auto combined = pipeline::predict_full(low, student, data, stats);
        out_of_range += combined.out_of_range;
        for (std::size_t i = 0; i < data.lffd.count; ++i) {
            os << dataio::format_timestamp(seg.raw.time_at(i + cfg.window - 1));
            for (std::size_t k = 0; k < horizon; ++k) {
                char buf[40];
                std::snprintf(buf, sizeof(buf), "%.10g", combined.values[i * horizon + k]);
                os << ',' << buf;
            }
            os << '\n';
        }
    }
    os.close();
    if (out_of_range)
        std::cerr << "note: " << out_of_range
                  << " predictions outside [0, 600] mg/dL (reported unclamped)\n";

    config::Manifest manifest{"predict", cfg.seed, config::experiment_to_text(cfg),
                              {{input, config::hash_file(input)}}};
    config::write_manifest((dir / "predict_manifest.txt").string(), manifest);
    if (common.verbosity > 0) std::cout << "wrote " << (dir / "predictions.csv").string() << "\n";
    return 0;
}

int run_evaluate(const CommonOpts& common, const std::string& run_dir) {
    const fs::path rdir(run_dir);
    const fs::path dir = prepare_out_dir(common.out.empty() ? run_dir : common.out);
    const auto rows = report::read_runs_csv((rdir / "runs.csv").string());
    report::write_summary((dir / "summary.txt").string(), (dir / "summary.csv").string(), rows);
    std::vector<std::size_t> horizons;
    for (const auto& r : rows)
        if (std::find(horizons.begin(), horizons.end(), r.horizon_samples) == horizons.end())
            horizons.push_back(r.horizon_samples);
    std::sort(horizons.begin(), horizons.end());
    for (std::size_t h : horizons) {
        const auto table = report::efficiency_from_runs(rows, h);
        report::write_efficiency_csv(
            (dir / ("efficiency_" + std::to_string(report::horizon_minutes(h)) + "min.csv")).string(),
            table);
    }
    config::Manifest manifest{"evaluate",
                              0,
                              "",
                              {{(rdir / "runs.csv").string(),
                                config::hash_file((rdir / "runs.csv").string())}}};
    config::write_manifest((dir / "evaluate_manifest.txt").string(), manifest);
    if (common.verbosity > 0) {
        std::ifstream summary(dir / "summary.txt");
        std::cout << summary.rdbuf();
    }
    return 0;
}

int run_report(const CommonOpts& common, const std::vector<std::string>& run_files) {
    const fs::path dir = prepare_out_dir(common.out);
    std::vector<report::RunRow> all;
    std::vector<std::pair<std::string, std::uint64_t>> inputs;
    for (const auto& f : run_files) {
        const auto rows = report::read_runs_csv(f);
        all.insert(all.end(), rows.begin(), rows.end());
        inputs.emplace_back(f, config::hash_file(f));
    }
    report::write_runs_csv((dir / "all_runs.csv").string(), all);
    report::write_summary((dir / "summary.txt").string(), (dir / "summary.csv").string(), all);
    config::Manifest manifest{"report", 0, "", std::move(inputs)};
    config::write_manifest((dir / "report_manifest.txt").string(), manifest);
    if (common.verbosity > 0)
        std::cout << "aggregated " << all.size() << " rows from " << run_files.size() << " files\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GlucoNet blood-glucose forecasting pipeline"};
    app.set_version_flag("--version", std::string("gluconet ") + kVersion);
    app.require_subcommand(1);

    CommonOpts common;
    app.add_option("-o,--out", common.out, "Output directory (default $GLUCONET_OUT or .)")
        ->envname("GLUCONET_OUT");
    app.add_option("--config", common.config_file, "Sectioned key=value configuration file");
    auto* seed_opt = app.add_option("--seed", common.seed, "Seed override");
    app.add_flag("-q{0},--quiet{0}", common.verbosity, "Suppress progress output");

    auto* synth = app.add_subcommand("synth", "Generate a synthetic patient trace (CSV)");
    synth->fallthrough();
    std::string synth_config;
    int synth_days = 14;
    double synth_noise = 6.0;
    synth->add_option("--synth-config", synth_config, "Synthetic generator key=value file");
    auto* days_opt = synth->add_option("--days", synth_days, "Trace length in days");
    auto* noise_opt = synth->add_option("--noise-std", synth_noise, "Gaussian noise level (mg/dL)");

    auto* decompose = app.add_subcommand("decompose", "Run VMD on the glucose channel of a CSV");
    decompose->fallthrough();
    std::string dec_input, dec_channel = "glucose";
    vmd::VmdConfig dec_cfg;
    decompose->add_option("input", dec_input, "Input CSV file")->required();
    decompose->add_option("--modes", dec_cfg.modes, "Number of modes");
    decompose->add_option("--alpha", dec_cfg.alpha, "Bandwidth penalty");
    decompose->add_option("--tau-dual", dec_cfg.tau_dual, "Dual ascent step (0 disables)");
    decompose->add_option("--tol", dec_cfg.tol, "Convergence threshold");
    decompose->add_option("--max-iters", dec_cfg.max_iters, "Iteration cap");
    decompose->add_option("--channel", dec_channel, "Channel to decompose");
    std::string dec_init = "uniform";
    decompose->add_option("--init", dec_init, "Center frequency init: uniform|zero|random");

    auto* features = app.add_subcommand("features", "Emit operative-carb and active-insulin curves");
    features->fallthrough();
    std::string feat_input;
    features->add_option("input", feat_input, "Input CSV file")->required();

    auto* train = app.add_subcommand("train", "Run the full training protocol");
    train->fallthrough();
    TrainInputs tin;
    std::string horizons_flag, lstm_vec_flag;
    int runs_flag = -1, jobs_flag = -1;
    bool paper_epochs = false, desk_epochs = false;
    train->add_option("--train-csv", tin.train_csv, "Training CSV");
    train->add_option("--test-csv", tin.test_csv, "Held-out test CSV");
    train->add_option("--ohio-train", tin.ohio_train, "OhioT1DM training XML");
    train->add_option("--ohio-test", tin.ohio_test, "OhioT1DM testing XML");
    train->add_flag("--synth", tin.use_synth, "Train on the built-in synthetic fixture");
    train->add_option("--synth-days", tin.synth_days, "Fixture length in days");
    train->add_option("--synth-seed", tin.synth_seed, "Fixture seed");
    train->add_option("--horizons", horizons_flag, "Comma-separated horizons in samples");
    train->add_option("--lstm-vec", lstm_vec_flag, "Low model LSTM stack, e.g. 128,64 or 64,64;64,32");
    train->add_option("--runs", runs_flag, "Independent seeded runs");
    train->add_option("--jobs", jobs_flag, "Parallel jobs (0 = hardware)");
    train->add_flag("--paper-epochs", paper_epochs, "Use the full 300/500/500 epoch budget");
    train->add_flag("--desk-epochs", desk_epochs, "Use the reduced 30/50/50 epoch budget (default)");
    std::string kd_sweep_flag;
    train->add_option("--kd-alpha-sweep", kd_sweep_flag,
                      "Extra distillation weights, e.g. 0.1,0.3,0.5,0.7,0.9");

    auto* predict = app.add_subcommand("predict", "Forecast from saved checkpoints");
    predict->fallthrough();
    std::string pred_model_dir, pred_input;
    std::size_t pred_horizon = 6;
    int pred_run = 0;
    predict->add_option("--model-dir", pred_model_dir, "Directory written by train")->required();
    predict->add_option("--input", pred_input, "Input CSV")->required();
    predict->add_option("--horizon", pred_horizon, "Horizon in samples");
    predict->add_option("--run", pred_run, "Run index of the checkpoint");

    auto* evaluate = app.add_subcommand("evaluate", "Summaries + efficiency tables from a run dir");
    evaluate->fallthrough();
    std::string eval_run_dir;
    evaluate->add_option("--run-dir", eval_run_dir, "Directory written by train")->required();

    auto* rep = app.add_subcommand("report", "Aggregate runs.csv files across patients");
    rep->fallthrough();
    std::vector<std::string> report_files;
    rep->add_option("runs", report_files, "runs.csv files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    common.seed_set = seed_opt->count() > 0;

    try {
        if (*synth)
            return run_synth(common, synth_config, synth_days, synth_noise, days_opt->count() > 0,
                             noise_opt->count() > 0);
        if (*decompose) {
            if (dec_init == "uniform") dec_cfg.init = vmd::OmegaInit::uniform;
            else if (dec_init == "zero") dec_cfg.init = vmd::OmegaInit::zero;
            else if (dec_init == "random") dec_cfg.init = vmd::OmegaInit::random;
            else throw std::runtime_error("decompose: --init must be uniform|zero|random");
            if (common.seed_set) dec_cfg.seed = common.seed;
            return run_decompose(common, dec_input, dec_channel, dec_cfg);
        }
        if (*features) return run_features(common, feat_input);
        if (*train) {
            pipeline::ExperimentConfig cfg = resolve_experiment(common);
            if (paper_epochs && desk_epochs)
                throw std::runtime_error("train: choose one of --paper-epochs/--desk-epochs");
            // precedence: flags > file > defaults; the command-line default budget is desk scale
            if (paper_epochs) cfg.apply_paper_epochs();
            else if (desk_epochs || common.config_file.empty()) cfg.apply_desk_epochs();
            if (!horizons_flag.empty()) {
                cfg.horizons.clear();
                std::string cur;
                for (char c : horizons_flag + ",") {
                    if (c == ',') {
                        if (!cur.empty()) cfg.horizons.push_back(std::stoul(cur));
                        cur.clear();
                    } else {
                        cur += c;
                    }
                }
            }
            if (!lstm_vec_flag.empty()) {
                const auto kv =
                    config::KvConfig::parse_text("[models]\nlstm_vec = " + lstm_vec_flag + "\n");
                cfg.lstm_vec = config::experiment_from_kv(kv).lstm_vec;
            }
            if (!kd_sweep_flag.empty()) {
                const auto kv = config::KvConfig::parse_text("[kd]\nalpha_sweep = " + kd_sweep_flag + "\n");
                cfg.kd_alpha_sweep = config::experiment_from_kv(kv).kd_alpha_sweep;
            }
            if (runs_flag >= 0) cfg.runs = runs_flag;
            if (jobs_flag >= 0) cfg.jobs = jobs_flag;
            if (common.seed_set) cfg.seed = common.seed;
            cfg.validate();
            return run_train(common, tin, cfg, config::experiment_to_text(cfg));
        }
        if (*predict) return run_predict(common, pred_model_dir, pred_input, pred_horizon, pred_run);
        if (*evaluate) return run_evaluate(common, eval_run_dir);
        if (*rep) return run_report(common, report_files);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
