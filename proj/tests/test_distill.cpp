#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gluconet/distill.hpp"
#include "gluconet/gradcheck.hpp"
#include "gluconet/models.hpp"
#include "gluconet/train.hpp"

using namespace gluconet::nn;

namespace {

Tensor rand2d(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double scale = 1.0) {
    Tensor t({rows, cols});
    for (auto& v : t.values) v = scale * (2.0 * uniform01(rng) - 1.0);
    return t;
}

BatchDataset<double> tiny_dataset(std::size_t n, std::size_t window, std::size_t channels,
                                  std::size_t horizon, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    BatchDataset<double> ds;
    ds.count = n;
    ds.window = window;
    ds.channels = channels;
    ds.horizon = horizon;
    ds.inputs.resize(n * window * channels);
    ds.targets.resize(n * horizon);
    for (auto& v : ds.inputs) v = 2.0 * uniform01(rng) - 1.0;
    for (auto& v : ds.targets) v = 2.0 * uniform01(rng) - 1.0;
    return ds;
}

}  // namespace

TEST_CASE("kd_loss: alpha = 0 equals the supervised MSE exactly") {
    std::mt19937_64 rng(1);
    const Tensor s = rand2d(4, 6, rng);
    const Tensor t = rand2d(4, 6, rng);
    const Tensor y = rand2d(4, 6, rng);
    KdConfig kd;
    kd.alpha = 0.0;
    Tensor dkd, dmse;
    const double got = kd_loss(s, t, y, kd, &dkd);
    const double want = mse_loss(s, y, &dmse);
    CHECK(std::abs(got - want) <= 1e-12);
    for (std::size_t i = 0; i < dkd.numel(); ++i)
        CHECK(dkd.values[i] == doctest::Approx(dmse.values[i]).epsilon(1e-15));
}

TEST_CASE("kd_loss: alpha = 1, tau = 1, identity softening equals teacher-student MSE") {
    std::mt19937_64 rng(2);
    const Tensor s = rand2d(3, 6, rng);
    const Tensor t = rand2d(3, 6, rng);
    const Tensor y = rand2d(3, 6, rng);
    KdConfig kd;
    kd.alpha = 1.0;
    kd.tau = 1.0;
    const double got = kd_loss(s, t, y, kd);
    CHECK(std::abs(got - mse_loss(s, t)) <= 1e-12);
}

TEST_CASE("kd_loss: worked example equals 0.375") {
    Tensor s({1, 2}, {1.0, 2.0});
    Tensor t({1, 2}, {1.5, 2.5});
    Tensor y({1, 2}, {2.0, 2.0});
    KdConfig kd;
    kd.alpha = 0.5;
    kd.tau = 1.0;
    CHECK(kd_loss(s, t, y, kd) == doctest::Approx(0.375).epsilon(1e-15));
}

TEST_CASE("kd_loss: validation errors") {
    Tensor s({1, 2}, {1.0, 2.0});
    Tensor t({1, 3}, {1.0, 2.0, 3.0});
    Tensor y({1, 2}, {1.0, 2.0});
    KdConfig kd;
    CHECK_THROWS_AS(kd_loss(s, t, y, kd), std::invalid_argument);
    kd.alpha = 1.5;
    CHECK_THROWS_AS(kd_loss(s, s, y, kd), std::invalid_argument);
    kd.alpha = 0.5;
    kd.tau = 0.0;
    CHECK_THROWS_AS(kd_loss(s, s, y, kd), std::invalid_argument);
}

TEST_CASE("kd_loss: nonnegative, zero iff student matches target and teacher") {
    std::mt19937_64 rng(3);
    KdConfig kd;
    kd.alpha = 0.4;
    for (int trial = 0; trial < 25; ++trial) {
        const Tensor s = rand2d(3, 4, rng);
        const Tensor t = rand2d(3, 4, rng);
        const Tensor y = rand2d(3, 4, rng);
        CHECK(kd_loss(s, t, y, kd) >= 0.0);
    }
    const Tensor same = rand2d(3, 4, rng);
    CHECK(kd_loss(same, same, same, kd) == 0.0);
    Tensor off = same;
    off.values[0] += 0.25;
    CHECK(kd_loss(off, same, same, kd) > 0.0);
}

TEST_CASE("kd_loss: continuous in alpha, endpoints match degenerate forms") {
    std::mt19937_64 rng(4);
    const Tensor s = rand2d(2, 5, rng);
    const Tensor t = rand2d(2, 5, rng);
    const Tensor y = rand2d(2, 5, rng);
    KdConfig kd;
    kd.tau = 1.0;
    double prev = 0.0;
    for (int i = 0; i <= 100; ++i) {
        kd.alpha = static_cast<double>(i) / 100.0;
        const double v = kd_loss(s, t, y, kd);
        if (i == 0) CHECK(std::abs(v - mse_loss(s, y)) <= 1e-12);
        if (i == 100) CHECK(std::abs(v - mse_loss(s, t)) <= 1e-12);
        if (i > 0) CHECK(std::abs(v - prev) < 0.05 * (1.0 + std::abs(prev)));
        prev = v;
    }
}

TEST_CASE("kd_loss: gradient matches finite differences for both softenings") {
    std::mt19937_64 rng(5);
    for (auto softening : {KdConfig::Softening::identity, KdConfig::Softening::tempered_softmax}) {
        KdConfig kd;
        kd.alpha = 0.6;
        kd.tau = 2.0;
        kd.softening = softening;
        Tensor s = rand2d(3, 5, rng);
        const Tensor t = rand2d(3, 5, rng);
        const Tensor y = rand2d(3, 5, rng);
        Tensor grad;
        kd_loss(s, t, y, kd, &grad);
        const double h = 1e-6;
        for (std::size_t i = 0; i < s.numel(); ++i) {
            const double saved = s.values[i];
            s.values[i] = saved + h;
            const double fp = kd_loss(s, t, y, kd);
            s.values[i] = saved - h;
            const double fm = kd_loss(s, t, y, kd);
            s.values[i] = saved;
            const double numeric = (fp - fm) / (2.0 * h);
            const double denom = std::max(std::abs(grad.values[i]) + std::abs(numeric), 1e-4);
            CHECK(std::abs(grad.values[i] - numeric) / denom < 1e-5);
        }
    }
}

TEST_CASE("kd_loss: no gradient flows to the teacher (frozen contract)") {
    // the teacher enters kd_loss only as constant values; there is no teacher
    // gradient slot at all, and distill_train never hands teacher parameters
    // to the optimizer
    std::mt19937_64 rng(6);
    const Tensor s = rand2d(2, 4, rng);
    Tensor t = rand2d(2, 4, rng);
    const Tensor y = rand2d(2, 4, rng);
    KdConfig kd;
    Tensor dstudent;
    kd_loss(s, t, y, kd, &dstudent);
    CHECK(dstudent.numel() == s.numel());
    CHECK(t.grad.empty());
}

TEST_CASE("distill_train: teacher parameters are bit-identical before and after") {
    auto ds = tiny_dataset(24, 12, 3, 2, 42);
    TransformerConfig tcfg = TransformerConfig::teacher(2);
    tcfg.window = 12;
    TransformerModel<double> teacher(tcfg, 9);
    const std::uint64_t checksum_before = teacher.params().value_checksum();

    TransformerConfig scfg = TransformerConfig::student(2);
    scfg.window = 12;
    TransformerModel<double> student(scfg, 10);
    KdConfig kd;
    kd.epochs = 3;
    TrainConfig tc;
    tc.batch = 8;
    tc.shuffle_seed = 5;
    const TrainLog log = distill_train(student, teacher, ds, kd, tc);
    CHECK(!log.diverged);
    CHECK(log.epoch_loss.size() == 3);
    CHECK(teacher.params().value_checksum() == checksum_before);
}

TEST_CASE("distill_train: alpha = 0 reproduces plain supervised training bit for bit") {
    auto ds = tiny_dataset(20, 12, 3, 2, 43);
    TransformerConfig tcfg = TransformerConfig::teacher(2);
    tcfg.window = 12;
    TransformerModel<double> teacher(tcfg, 3);

    TransformerConfig scfg = TransformerConfig::student(2);
    scfg.window = 12;

    TransformerModel<double> distilled(scfg, 77);
    KdConfig kd;
    kd.alpha = 0.0;
    kd.epochs = 4;
    TrainConfig tc;
    tc.batch = 8;
    tc.shuffle_seed = 11;
    distill_train(distilled, teacher, ds, kd, tc);

    TransformerModel<double> supervised(scfg, 77);
    TrainConfig tc2 = tc;
    tc2.epochs = 4;
    train_supervised(supervised, ds, tc2);

    CHECK(distilled.params().value_checksum() == supervised.params().value_checksum());
}

TEST_CASE("distill_train: horizon mismatch rejected") {
    auto ds = tiny_dataset(12, 12, 3, 2, 44);
    TransformerConfig tcfg = TransformerConfig::teacher(3);
    tcfg.window = 12;
    TransformerModel<double> teacher(tcfg, 1);
    TransformerConfig scfg = TransformerConfig::student(2);
    scfg.window = 12;
    TransformerModel<double> student(scfg, 2);
    KdConfig kd;
    TrainConfig tc;
    CHECK_THROWS_AS(distill_train(student, teacher, ds, kd, tc), std::invalid_argument);
}

TEST_CASE("distill_train: distilled student no worse than scratch on most seeds") {
    // paired-run oracle at small scale: labels carry heavy noise, the student
    // sees a small noisy slice, and the teacher was trained on a larger slice
    // so its outputs are a cleaner target than the raw labels; validation
    // targets are noiseless
    const std::size_t window = 12, horizon = 2, channels = 2;
    auto make_split = [&](std::size_t n, std::uint64_t seed, double label_noise) {
        std::mt19937_64 rng(seed);
        BatchDataset<double> ds;
        ds.count = n;
        ds.window = window;
        ds.channels = channels;
        ds.horizon = horizon;
        ds.inputs.resize(n * window * channels);
        ds.targets.resize(n * horizon);
        for (std::size_t i = 0; i < n; ++i) {
            const double phase = 6.28 * uniform01(rng);
            for (std::size_t t = 0; t < window; ++t) {
                ds.inputs[(i * window + t) * channels + 0] = std::sin(0.4 * static_cast<double>(t) + phase);
                ds.inputs[(i * window + t) * channels + 1] = std::cos(0.4 * static_cast<double>(t) + phase);
            }
            for (std::size_t hstep = 0; hstep < horizon; ++hstep)
                ds.targets[i * horizon + hstep] =
                    std::sin(0.4 * static_cast<double>(window + hstep) + phase) +
                    label_noise * (uniform01(rng) - 0.5);
        }
        return ds;
    };
    const auto teacher_ds = make_split(400, 1, 2.0);
    const auto student_ds = make_split(120, 3, 2.0);
    const auto val_ds = make_split(60, 2, 0.0);

    TransformerConfig tcfg = TransformerConfig::teacher(horizon);
    tcfg.window = window;
    tcfg.input_channels = channels;
    TransformerModel<double> teacher(tcfg, 500);
    TrainConfig teacher_tc;
    teacher_tc.epochs = 80;
    teacher_tc.batch = 32;
    teacher_tc.shuffle_seed = 9;
    train_supervised(teacher, teacher_ds, teacher_tc);

    auto val_mse = [&](TransformerModel<double>& m) {
        const auto pred = predict_all(m, val_ds);
        Tensor p({val_ds.count, horizon}, pred);
        Tensor y({val_ds.count, horizon}, val_ds.targets);
        return mse_loss(p, y);
    };

    int kd_wins = 0;
    const int seeds = 5;
    for (int s = 0; s < seeds; ++s) {
        TransformerConfig scfg = TransformerConfig::student(horizon);
        scfg.window = window;
        scfg.input_channels = channels;
        TrainConfig tc;
        tc.epochs = 20;
        tc.batch = 32;
        tc.shuffle_seed = static_cast<std::uint64_t>(s) + 40;

        TransformerModel<double> distilled(scfg, static_cast<std::uint64_t>(s) + 900);
        KdConfig kd;
        kd.alpha = 0.7;
        kd.tau = 1.0;
        kd.epochs = 20;
        distill_train(distilled, teacher, student_ds, kd, tc);

        TransformerModel<double> scratch(scfg, static_cast<std::uint64_t>(s) + 900);
        train_supervised(scratch, student_ds, tc);

        if (val_mse(distilled) <= val_mse(scratch) * 1.0001) ++kd_wins;
    }
    CHECK(kd_wins >= 3);
}

TEST_CASE("train_supervised: best snapshot tracks the lowest epoch loss") {
    auto ds = tiny_dataset(32, 12, 3, 2, 45);
    TransformerConfig scfg = TransformerConfig::student(2);
    scfg.window = 12;
    TransformerModel<double> model(scfg, 4);
    TrainConfig tc;
    tc.epochs = 6;
    tc.batch = 8;
    BestSnapshot<double> best;
    const TrainLog log = train_supervised(model, ds, tc, &best);
    REQUIRE(best.epoch >= 0);
    double lowest = log.epoch_loss[0];
    int lowest_epoch = 0;
    for (std::size_t e = 1; e < log.epoch_loss.size(); ++e)
        if (log.epoch_loss[e] < lowest) {
            lowest = log.epoch_loss[e];
            lowest_epoch = static_cast<int>(e);
        }
    CHECK(best.epoch == lowest_epoch);
    CHECK(best.loss == doctest::Approx(lowest));
}
