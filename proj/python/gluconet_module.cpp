// Python bindings for the main numerical operations: imputation, windowing,
// normalization, the sparse-event transforms, VMD, metrics and the synthetic
// generator. Training runs through the CLI; these bindings cover the
// signal-level surface.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gluconet/dataio.hpp"
#include "gluconet/metrics.hpp"
#include "gluconet/ssr.hpp"
#include "gluconet/timeseries.hpp"
#include "gluconet/version.hpp"
#include "gluconet/vmd.hpp"

namespace py = pybind11;
using namespace gluconet;

namespace {

std::vector<double> to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 1) throw std::invalid_argument("expected a 1-d array");
    return {a.data(), a.data() + a.shape(0)};
}

py::array_t<double> to_array(const std::vector<double>& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

vmd::VmdConfig make_vmd_config(int modes, double alpha, double tau_dual, double tol, int max_iters,
                               const std::string& init, unsigned seed) {
    vmd::VmdConfig cfg;
    cfg.modes = modes;
    cfg.alpha = alpha;
    cfg.tau_dual = tau_dual;
    cfg.tol = tol;
    cfg.max_iters = max_iters;
    cfg.seed = seed;
    if (init == "uniform") cfg.init = vmd::OmegaInit::uniform;
    else if (init == "zero") cfg.init = vmd::OmegaInit::zero;
    else if (init == "random") cfg.init = vmd::OmegaInit::random;
    else throw std::invalid_argument("init must be 'uniform', 'zero' or 'random'");
    return cfg;
}

}  // namespace

PYBIND11_MODULE(gluconet_core, m) {
    m.doc() = "Blood-glucose forecasting pipeline: signal-level operations";
    m.attr("__version__") = kVersion;

    m.def(
        "impute_gaps",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& values) {
            TimeAlignedSeries s(0, kDefaultStepSeconds, {"x"}, {to_vector(values)});
            return to_array(impute_gaps(s).channel("x"));
        },
        py::arg("values"),
        "Fill NaN gaps: linear interpolation inside, nearest value at the edges");

    m.def(
        "make_windows",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& values,
           std::size_t window, std::size_t horizon) {
            TimeAlignedSeries s(0, kDefaultStepSeconds, {"x"}, {to_vector(values)});
            const auto ds = make_windows(s, window, horizon, "x");
            py::array_t<double> inputs({ds.size(), window});
            py::array_t<double> targets({ds.size(), horizon});
            for (std::size_t i = 0; i < ds.size(); ++i) {
                std::copy(ds.inputs[i].begin(), ds.inputs[i].end(),
                          inputs.mutable_data() + i * window);
                std::copy(ds.targets[i].begin(), ds.targets[i].end(),
                          targets.mutable_data() + i * horizon);
            }
            return py::make_tuple(inputs, targets);
        },
        py::arg("values"), py::arg("window") = 36, py::arg("horizon") = 6,
        "Sliding windows (stride 1) paired with the next `horizon` values");

    m.def(
        "zscore_fit",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& values) {
            TimeAlignedSeries s(0, kDefaultStepSeconds, {"x"}, {to_vector(values)});
            const auto stats = fit_norm(s, {"x"});
            return py::make_tuple(stats.location[0], stats.scale[0]);
        },
        py::arg("values"), "Mean and (positive) standard deviation; constant input gives scale 1");

    m.def(
        "operative_carbs",
        [](const std::vector<std::pair<std::ptrdiff_t, double>>& meals, std::size_t length,
           double alpha_inc, double alpha_dec) {
            ssr::CarbKineticsParams params;
            params.alpha_inc = alpha_inc;
            params.alpha_dec = alpha_dec;
            std::vector<ssr::EventRecord> events;
            for (const auto& [sample, grams] : meals)
                events.push_back({sample * kDefaultStepSeconds, ssr::EventRecord::Kind::meal, grams});
            return to_array(ssr::operative_carbs(events, 0, kDefaultStepSeconds, length, params));
        },
        py::arg("meals"), py::arg("length"), py::arg("alpha_inc") = 0.11,
        py::arg("alpha_dec") = 0.028,
        "Continuous carb-effect curve from (sample_index, grams) meal events");

    m.def(
        "insulin_params",
        [](double t_p, double t_d) {
            const auto p = ssr::InsulinKineticsParams::from_peak_duration(t_p, t_d);
            return py::make_tuple(p.tau, p.rise_factor, p.scale);
        },
        py::arg("t_p") = 55.0, py::arg("t_d") = 300.0,
        "Derived (tau, rise_factor, scale) of the insulin activity curve");

    m.def(
        "iob_curve",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& minutes, double t_p,
           double t_d) {
            const auto p = ssr::InsulinKineticsParams::from_peak_duration(t_p, t_d);
            return to_array(ssr::iob_curve(to_vector(minutes), p));
        },
        py::arg("minutes"), py::arg("t_p") = 55.0, py::arg("t_d") = 300.0,
        "Remaining-activity fraction per elapsed minute, clamped to [0, 1]");

    m.def(
        "active_insulin",
        [](const std::vector<std::pair<std::ptrdiff_t, double>>& boluses, std::size_t length,
           double t_p, double t_d) {
            const auto p = ssr::InsulinKineticsParams::from_peak_duration(t_p, t_d);
            std::vector<ssr::EventRecord> events;
            for (const auto& [sample, units] : boluses)
                events.push_back({sample * kDefaultStepSeconds, ssr::EventRecord::Kind::bolus, units});
            return to_array(ssr::active_insulin_series(events, 0, kDefaultStepSeconds, length, p));
        },
        py::arg("boluses"), py::arg("length"), py::arg("t_p") = 55.0, py::arg("t_d") = 300.0,
        "Dose-scaled insulin-on-board curve from (sample_index, units) events");

    m.def(
        "vmd_decompose",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& signal, int modes,
           double alpha, double tau_dual, double tol, int max_iters, const std::string& init,
           unsigned seed) {
            const auto cfg = make_vmd_config(modes, alpha, tau_dual, tol, max_iters, init, seed);
            const auto result = vmd::vmd_decompose(to_vector(signal), cfg);
            py::array_t<double> modes_arr({result.mode_count(), result.length()});
            for (std::size_t k = 0; k < result.mode_count(); ++k)
                std::copy(result.modes[k].begin(), result.modes[k].end(),
                          modes_arr.mutable_data() + k * result.length());
            return py::make_tuple(modes_arr, to_array(result.omegas), to_array(result.residual),
                                  result.iterations_used, result.converged);
        },
        py::arg("signal"), py::arg("modes") = 5, py::arg("alpha") = 2000.0,
        py::arg("tau_dual") = 0.0, py::arg("tol") = 1e-7, py::arg("max_iters") = 500,
        py::arg("init") = "uniform", py::arg("seed") = 0,
        "Frequency-domain decomposition: (modes, omegas, residual, iterations, converged)");

    m.def(
        "group_modes",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& signal,
           std::size_t split_index, int modes, double alpha, bool residual_to_low) {
            const auto cfg = make_vmd_config(modes, alpha, 0.0, 1e-7, 500, "uniform", 0);
            const auto ms = vmd::vmd_decompose(to_vector(signal), cfg);
            const auto g = vmd::group_modes(ms, split_index, residual_to_low);
            return py::make_tuple(to_array(g.low), to_array(g.high));
        },
        py::arg("signal"), py::arg("split_index") = 2, py::arg("modes") = 5,
        py::arg("alpha") = 2000.0, py::arg("residual_to_low") = true,
        "Decompose and sum modes below/above split_index into (low, high)");

    m.def(
        "compute_metrics",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& actual,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& predicted) {
            const auto m_ = eval::compute_metrics(to_vector(actual), to_vector(predicted));
            return py::make_tuple(m_.rmse, m_.mae,
                                  m_.r2 ? py::object(py::float_(*m_.r2)) : py::object(py::none()));
        },
        py::arg("actual"), py::arg("predicted"),
        "(rmse, mae, r2); r2 is None when the actuals have zero variance");

    m.def(
        "generate_synthetic",
        [](int days, unsigned seed, double noise_std, int meals_per_day) {
            dataio::SynthConfig cfg;
            cfg.days = days;
            cfg.seed = seed;
            cfg.noise_std = noise_std;
            cfg.meals_per_day = meals_per_day;
            const auto rec = dataio::generate_synthetic(cfg);
            std::vector<double> glucose;
            glucose.reserve(rec.glucose.size());
            for (const auto& [ts, v] : rec.glucose) glucose.push_back(v);
            std::vector<std::pair<std::ptrdiff_t, double>> meals, boluses;
            const Timestamp start = rec.glucose.front().first;
            for (const auto& e : rec.meals)
                meals.emplace_back((e.time - start) / cfg.step_seconds, e.magnitude);
            for (const auto& e : rec.boluses)
                boluses.emplace_back((e.time - start) / cfg.step_seconds, e.magnitude);
            return py::make_tuple(to_array(glucose), meals, boluses);
        },
        py::arg("days") = 14, py::arg("seed") = 1, py::arg("noise_std") = 6.0,
        py::arg("meals_per_day") = 3,
        "Seeded synthetic trace: (glucose mg/dL on the 5-min grid, meals, boluses)");
}
