#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gluconet/ssr.hpp"

using namespace gluconet;
using ssr::EventRecord;

namespace {
constexpr int kStep = 300;
EventRecord meal_at(std::ptrdiff_t sample, double grams) {
    return {static_cast<Timestamp>(sample) * kStep, EventRecord::Kind::meal, grams};
}
EventRecord bolus_at(std::ptrdiff_t sample, double units) {
    return {static_cast<Timestamp>(sample) * kStep, EventRecord::Kind::bolus, units};
}
}  // namespace

TEST_CASE("operative carbs: no events gives zeros") {
    const auto out = ssr::operative_carbs({}, 0, kStep, 20, {});
    for (double v : out) CHECK(v == 0.0);
}

TEST_CASE("operative carbs: piecewise form for a 50 g meal") {
    const auto out = ssr::operative_carbs({meal_at(0, 50.0)}, 0, kStep, 60, {});
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 0.0);
    CHECK(out[2] == 0.0);
    CHECK(out[3] == doctest::Approx(0.11 * 1 * 50.0));   // ramp starts at s = 3
    CHECK(out[11] == doctest::Approx(49.5));             // 0.11 * 9 * 50
    CHECK(out[12] == doctest::Approx(50.0));             // peak equals the meal size
    CHECK(out[30] == doctest::Approx(24.8));             // (1 - 0.028 * 18) * 50
    CHECK(out[47] == doctest::Approx(1.0));              // last nonzero decay sample
    CHECK(out[48] == 0.0);
    CHECK(out[55] == 0.0);
}

TEST_CASE("operative carbs: peak is C_m at s=12 and first nonzero at s=3 (defaults)") {
    const auto out = ssr::operative_carbs({meal_at(0, 80.0)}, 0, kStep, 50, {});
    std::size_t first_nonzero = 0;
    while (first_nonzero < out.size() && out[first_nonzero] == 0.0) ++first_nonzero;
    CHECK(first_nonzero == 3);
    double peak = 0.0;
    std::size_t peak_at = 0;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out[i] > peak) {
            peak = out[i];
            peak_at = i;
        }
    CHECK(peak == doctest::Approx(80.0));
    CHECK(peak_at == 12);
}

TEST_CASE("operative carbs: superposition of two meals") {
    const auto a = ssr::operative_carbs({meal_at(0, 50.0)}, 0, kStep, 80, {});
    const auto b = ssr::operative_carbs({meal_at(10, 30.0)}, 0, kStep, 80, {});
    const auto both = ssr::operative_carbs({meal_at(0, 50.0), meal_at(10, 30.0)}, 0, kStep, 80, {});
    for (std::size_t i = 0; i < both.size(); ++i) CHECK(both[i] == doctest::Approx(a[i] + b[i]));
}

TEST_CASE("operative carbs: linear in meal size") {
    const auto one = ssr::operative_carbs({meal_at(4, 1.0)}, 0, kStep, 60, {});
    const auto fifty = ssr::operative_carbs({meal_at(4, 50.0)}, 0, kStep, 60, {});
    for (std::size_t i = 0; i < one.size(); ++i) CHECK(fifty[i] == doctest::Approx(50.0 * one[i]));
}

TEST_CASE("operative carbs: negative magnitude rejected, outputs finite and nonnegative") {
    CHECK_THROWS_AS(ssr::operative_carbs({meal_at(0, -1.0)}, 0, kStep, 10, {}),
                    std::invalid_argument);
    const auto out = ssr::operative_carbs({meal_at(-30, 65.0), meal_at(20, 40.0)}, 0, kStep, 90, {});
    for (double v : out) {
        CHECK(std::isfinite(v));
        CHECK(v >= 0.0);
    }
}

TEST_CASE("insulin params: numeric evaluation at defaults (t_p=55, t_d=300)") {
    const auto p = ssr::InsulinKineticsParams::from_peak_duration(55.0, 300.0);
    CHECK(p.tau == doctest::Approx(70.921052631579).epsilon(1e-9));
    CHECK(p.rise_factor == doctest::Approx(0.472807017544).epsilon(1e-9));
    CHECK(p.scale == doctest::Approx(1.822739819412).epsilon(1e-9));
}

TEST_CASE("insulin params: singularity at t_p = t_d/2 is rejected") {
    CHECK_THROWS_AS(ssr::InsulinKineticsParams::from_peak_duration(150.0, 300.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(ssr::InsulinKineticsParams::from_peak_duration(151.0, 300.0),
                    std::invalid_argument);
}

TEST_CASE("insulin params: t_p = t_d/4 gives tau = 3 t_d / 8") {
    const auto p = ssr::InsulinKineticsParams::from_peak_duration(75.0, 300.0);
    CHECK(p.tau == doctest::Approx(112.5).epsilon(1e-12));
}

TEST_CASE("iob curve: boundary values and monotonicity on the 5-minute grid") {
    const auto p = ssr::InsulinKineticsParams::from_peak_duration(55.0, 300.0);
    CHECK(ssr::iob_at(0.0, p) == 1.0);  // inner brace is exactly zero at t = 0
    CHECK(ssr::iob_at(300.0, p) == 0.0);
    CHECK(ssr::iob_at(299.9, p) == doctest::Approx(0.0).epsilon(0.02));
    std::vector<double> grid;
    for (int k = 0; k <= 60; ++k) grid.push_back(5.0 * k);
    const auto curve = ssr::iob_curve(grid, p);
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) CHECK(curve[i + 1] <= curve[i] + 1e-12);
    for (double v : curve) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    CHECK(curve[1] == doctest::Approx(0.995725270025).epsilon(1e-9));
    CHECK(curve[30] == doctest::Approx(0.167627945848).epsilon(1e-9));
}

TEST_CASE("active insulin: zeros, unit scaling and dose linearity") {
    const auto p = ssr::InsulinKineticsParams::from_peak_duration(55.0, 300.0);
    SUBCASE("no boluses") {
        for (double v : ssr::active_insulin_series({}, 0, kStep, 30, p)) CHECK(v == 0.0);
    }
    SUBCASE("a 1-unit bolus reproduces the iob curve") {
        const auto series = ssr::active_insulin_series({bolus_at(0, 1.0)}, 0, kStep, 70, p);
        for (std::size_t k = 0; k < series.size(); ++k)
            CHECK(series[k] == doctest::Approx(ssr::iob_at(5.0 * static_cast<double>(k), p)));
    }
    SUBCASE("2-unit bolus is exactly twice the 1-unit series") {
        const auto one = ssr::active_insulin_series({bolus_at(3, 1.0)}, 0, kStep, 80, p);
        const auto two = ssr::active_insulin_series({bolus_at(3, 2.0)}, 0, kStep, 80, p);
        for (std::size_t k = 0; k < one.size(); ++k) CHECK(two[k] == doctest::Approx(2.0 * one[k]));
    }
    SUBCASE("zero before the first bolus; negative dose rejected") {
        const auto series = ssr::active_insulin_series({bolus_at(10, 2.5)}, 0, kStep, 40, p);
        for (std::size_t k = 0; k < 10; ++k) CHECK(series[k] == 0.0);
        CHECK(series[10] == doctest::Approx(2.5));
        CHECK_THROWS_AS(ssr::active_insulin_series({bolus_at(0, -2.0)}, 0, kStep, 10, p),
                        std::invalid_argument);
    }
}

TEST_CASE("basal: piecewise rate becomes 5-minute micro-boluses") {
    // 1.2 u/h for one hour = 0.1 u per 5-minute step, 12 steps
    const std::vector<ssr::BasalSegment> segs{{0, 3600, 1.2}};
    const auto micro = ssr::basal_to_microboluses(segs, 0, kStep, 24);
    REQUIRE(micro.size() == 12);
    for (const auto& ev : micro) CHECK(ev.magnitude == doctest::Approx(0.1));
    CHECK(micro.front().time == 0);
    CHECK(micro.back().time == 3300);
}
