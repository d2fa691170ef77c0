#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "gluconet/distill.hpp"
#include "gluconet/optim.hpp"
#include "gluconet/tensor.hpp"
#include "gluconet/timeseries.hpp"

namespace gluconet::nn {

/// Window/target pairs packed for batched training.
template <class T>
struct BatchDataset {
    std::size_t count = 0, window = 0, channels = 0, horizon = 0;
    std::vector<T> inputs;   // count x window x channels
    std::vector<T> targets;  // count x horizon

    static BatchDataset from_windows(const WindowedDataset& ds) {
        BatchDataset out;
        out.count = ds.size();
        out.window = ds.window;
        out.channels = ds.channels();
        out.horizon = ds.horizon;
        out.inputs.reserve(out.count * out.window * out.channels);
        out.targets.reserve(out.count * out.horizon);
        for (const auto& w : ds.inputs)
            for (double v : w) out.inputs.push_back(static_cast<T>(v));
        for (const auto& t : ds.targets)
            for (double v : t) out.targets.push_back(static_cast<T>(v));
        return out;
    }

    void gather(const std::vector<std::size_t>& idx, std::size_t from, std::size_t to,
                TensorT<T>& x, TensorT<T>& y) const {
        const std::size_t b = to - from;
        const std::size_t in_stride = window * channels;
        x.shape = {b, window, channels};
        x.values.resize(b * in_stride);  // reuses capacity across batches
        y.shape = {b, horizon};
        y.values.resize(b * horizon);
        for (std::size_t i = 0; i < b; ++i) {
            const std::size_t s = idx[from + i];
            std::copy(&inputs[s * in_stride], &inputs[s * in_stride] + in_stride,
                      &x.values[i * in_stride]);
            std::copy(&targets[s * horizon], &targets[s * horizon] + horizon,
                      &y.values[i * horizon]);
        }
    }
};

struct TrainConfig {
    int epochs = 300;
    std::size_t batch = 64;
    double lr = 0.001;
    double clip_norm = 1.0;
    std::uint64_t shuffle_seed = 0;
};

struct TrainLog {
    std::vector<double> epoch_loss;
    bool diverged = false;
    int best_epoch = -1;
};

/// Copy of the parameter values at the epoch with the lowest training loss.
/// There is no early stopping; this is saved alongside the final state.
template <class T>
struct BestSnapshot {
    int epoch = -1;
    double loss = std::numeric_limits<double>::infinity();
    std::vector<std::vector<T>> values;

    void consider(int e, double l, const ParamStoreT<T>& params) {
        if (l >= loss) return;
        epoch = e;
        loss = l;
        values.resize(params.size());
        for (std::size_t i = 0; i < params.size(); ++i) values[i] = params.tensor(i).values;
    }
    void restore_into(ParamStoreT<T>& params) const {
        if (epoch < 0) throw std::invalid_argument("best snapshot: nothing recorded");
        for (std::size_t i = 0; i < params.size(); ++i) params.tensor(i).values = values[i];
    }
};

namespace detail {

inline std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, int epoch) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(epoch) + 1);
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

}  // namespace detail

/// Batched inference over the whole dataset in index order: returns [N, h].
template <class T, class Model>
std::vector<T> predict_all(Model& model, const BatchDataset<T>& ds, std::size_t batch = 64) {
    detail::enable_flush_to_zero();
    std::vector<T> out(ds.count * ds.horizon);
    std::vector<std::size_t> idx(ds.count);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    TensorT<T> x, y;
    for (std::size_t from = 0; from < ds.count; from += batch) {
        const std::size_t to = std::min(ds.count, from + batch);
        ds.gather(idx, from, to, x, y);
        const TensorT<T> pred = model.forward(x);
        std::copy(pred.values.begin(), pred.values.end(), out.begin() + static_cast<std::ptrdiff_t>(from * ds.horizon));
    }
    return out;
}

/// Minimizes MSE with Adam over shuffled minibatches. A non-finite batch loss
/// aborts the run with diverged = true.
template <class T, class Model>
TrainLog train_supervised(Model& model, const BatchDataset<T>& ds, const TrainConfig& tc,
                          BestSnapshot<T>* best = nullptr) {
    detail::enable_flush_to_zero();
    if (ds.count == 0) throw std::invalid_argument("train: empty dataset");
    Adam<T> opt(AdamConfig{tc.lr, 0.9, 0.999, 1e-8, tc.clip_norm});
    TrainLog log;
    TensorT<T> x, y, dpred;
    for (int epoch = 0; epoch < tc.epochs; ++epoch) {
        const auto idx = detail::epoch_order(ds.count, tc.shuffle_seed, epoch);
        double loss_sum = 0.0;
        for (std::size_t from = 0; from < ds.count; from += tc.batch) {
            const std::size_t to = std::min(ds.count, from + tc.batch);
            ds.gather(idx, from, to, x, y);
            const TensorT<T> pred = model.forward(x);
            const double loss = mse_loss(pred, y, &dpred);
            if (!std::isfinite(loss)) {
                log.diverged = true;
                return log;
            }
            loss_sum += loss * static_cast<double>(to - from);
            model.params().zero_grad();
            model.backward(dpred);
            opt.step(model.params());
        }
        const double epoch_loss = loss_sum / static_cast<double>(ds.count);
        log.epoch_loss.push_back(epoch_loss);
        if (best) {
            best->consider(epoch, epoch_loss, model.params());
            log.best_epoch = best->epoch;
        }
    }
    return log;
}

/// Knowledge distillation of a frozen teacher into the student. Teacher
/// outputs are computed once up front; the optimizer only ever sees the
/// student's parameters. Epoch count comes from kd.epochs.
template <class T, class SModel, class TModel>
TrainLog distill_train(SModel& student, TModel& teacher, const BatchDataset<T>& ds,
                       const KdConfig& kd, const TrainConfig& tc, BestSnapshot<T>* best = nullptr) {
    detail::enable_flush_to_zero();
    kd.validate();
    if (ds.count == 0) throw std::invalid_argument("distill: empty dataset");
    if (teacher.config().horizon != student.config().horizon)
        throw std::invalid_argument("distill: teacher/student horizon mismatch");
    const std::vector<T> teacher_out = predict_all(teacher, ds, tc.batch);

    Adam<T> opt(AdamConfig{tc.lr, 0.9, 0.999, 1e-8, tc.clip_norm});
    TrainLog log;
    TensorT<T> x, y, dpred;
    for (int epoch = 0; epoch < kd.epochs; ++epoch) {
        const auto idx = detail::epoch_order(ds.count, tc.shuffle_seed, epoch);
        double loss_sum = 0.0;
        for (std::size_t from = 0; from < ds.count; from += tc.batch) {
            const std::size_t to = std::min(ds.count, from + tc.batch);
            ds.gather(idx, from, to, x, y);
            TensorT<T> t_out({to - from, ds.horizon});
            for (std::size_t i = 0; i < to - from; ++i)
                std::copy(&teacher_out[idx[from + i] * ds.horizon],
                          &teacher_out[idx[from + i] * ds.horizon] + ds.horizon,
                          &t_out.values[i * ds.horizon]);
            const TensorT<T> pred = student.forward(x);
            const double loss = kd_loss(pred, t_out, y, kd, &dpred);
            if (!std::isfinite(loss)) {
                log.diverged = true;
                return log;
            }
            loss_sum += loss * static_cast<double>(to - from);
            student.params().zero_grad();
            student.backward(dpred);
            opt.step(student.params());
        }
        const double epoch_loss = loss_sum / static_cast<double>(ds.count);
        log.epoch_loss.push_back(epoch_loss);
        if (best) {
            best->consider(epoch, epoch_loss, student.params());
            log.best_epoch = best->epoch;
        }
    }
    return log;
}

}  // namespace gluconet::nn
