#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "gluconet/dataio.hpp"

using namespace gluconet;
using dataio::parse_timestamp;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(std::string p, const std::string& content) : path(std::move(p)) {
        std::ofstream os(path);
        os << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

std::string read_all(const std::string& path) {
    std::ifstream is(path);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("timestamps: iso and ohio formats, round trip") {
    CHECK(parse_timestamp("1970-01-01T00:00:00") == 0);
    CHECK(parse_timestamp("1970-01-01 00:05:00") == 300);
    CHECK(parse_timestamp("07-12-2021 16:00:00") == parse_timestamp("2021-12-07T16:00:00"));
    const Timestamp ts = parse_timestamp("2024-02-29T23:59:59");
    CHECK(dataio::format_timestamp(ts) == "2024-02-29T23:59:59");
    CHECK_THROWS_AS(parse_timestamp("2024-13-01T00:00:00"), std::invalid_argument);
    CHECK_THROWS_AS(parse_timestamp("not a time"), std::invalid_argument);
}

TEST_CASE("csv: well-formed file parses all streams") {
    TempFile f("dataio_ok.csv",
               "timestamp,glucose,carbs,bolus,basal_rate\n"
               "2024-01-01T00:00:00,110,,,1.2\n"
               "2024-01-01T00:05:00,112,45,4.5,\n"
               "2024-01-01T00:10:00,114,,,0\n");
    const auto rec = dataio::load_csv(f.path);
    REQUIRE(rec.glucose.size() == 3);
    CHECK(rec.glucose[0].second == 110);
    CHECK(rec.glucose[2].second == 114);
    REQUIRE(rec.meals.size() == 1);
    CHECK(rec.meals[0].magnitude == 45);
    REQUIRE(rec.boluses.size() == 1);
    CHECK(rec.boluses[0].magnitude == 4.5);
    REQUIRE(rec.basal.size() == 1);
    CHECK(rec.basal[0].rate_units_per_hour == 1.2);
    CHECK(rec.basal[0].end - rec.basal[0].start == 600);
}

TEST_CASE("csv: timestamp regression names the offending line") {
    TempFile f("dataio_order.csv",
               "timestamp,glucose,carbs,bolus,basal_rate\n"
               "2024-01-01T00:05:00,110,,,\n"
               "2024-01-01T00:00:00,112,,,\n");
    try {
        dataio::load_csv(f.path);
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("csv: unknown header rejected; malformed number names line and column") {
    TempFile bad_header("dataio_hdr.csv", "time,glucose\n");
    CHECK_THROWS_AS(dataio::load_csv(bad_header.path), std::runtime_error);

    TempFile bad_cell("dataio_cell.csv",
                      "timestamp,glucose,carbs,bolus,basal_rate\n"
                      "2024-01-01T00:00:00,abc,,,\n");
    try {
        dataio::load_csv(bad_cell.path);
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("line 2") != std::string::npos);
        CHECK(msg.find("column 2") != std::string::npos);
    }
}

TEST_CASE("csv: empty carbs cell emits no meal event") {
    TempFile f("dataio_empty.csv",
               "timestamp,glucose,carbs,bolus,basal_rate\n"
               "2024-01-01T00:00:00,110,,,\n");
    CHECK(dataio::load_csv(f.path).meals.empty());
}

TEST_CASE("csv: write(load(f)) reproduces the canonical file") {
    const std::string canonical =
        "timestamp,glucose,carbs,bolus,basal_rate\n"
        "2024-01-01T00:00:00,110,,,1.2\n"
        "2024-01-01T00:05:00,112.5,45,4.5,\n"
        "2024-01-01T00:10:00,114,,,0\n";
    TempFile f("dataio_rt.csv", canonical);
    const auto rec = dataio::load_csv(f.path);
    const std::string out_path = "dataio_rt_out.csv";
    dataio::save_csv(out_path, rec);
    CHECK(read_all(out_path) == canonical);
    std::remove(out_path.c_str());
}

TEST_CASE("ohio xml: minimal fixture parses with counts") {
    TempFile f("dataio_ohio.xml",
               "<?xml version=\"1.0\"?>\n"
               "<patient id=\"559\" weight=\"99\">\n"
               "  <glucose_level>\n"
               "    <event ts=\"07-12-2021 16:00:00\" value=\"101\"/>\n"
               "    <event ts=\"07-12-2021 16:05:00\" value=\"105\"/>\n"
               "  </glucose_level>\n"
               "  <meal>\n"
               "    <event ts=\"07-12-2021 16:10:00\" type=\"Snack\" carbs=\"30\"/>\n"
               "  </meal>\n"
               "  <bolus>\n"
               "    <event ts_begin=\"07-12-2021 16:10:00\" ts_end=\"07-12-2021 16:10:00\" type=\"normal\" dose=\"1.3\"/>\n"
               "  </bolus>\n"
               "  <basal>\n"
               "    <event ts=\"07-12-2021 16:00:00\" value=\"0.9\"/>\n"
               "  </basal>\n"
               "  <sleep>\n"
               "    <event ts_begin=\"07-12-2021 22:00:00\" quality=\"2\"/>\n"
               "  </sleep>\n"
               "</patient>\n");
    dataio::XmlLoadStats stats;
    const auto rec = dataio::load_ohio_xml(f.path, &stats);
    CHECK(rec.patient_id == "559");
    REQUIRE(rec.glucose.size() == 2);
    CHECK(rec.glucose[0].second == 101);
    CHECK(stats.glucose_events == 2);
    REQUIRE(rec.meals.size() == 1);
    CHECK(rec.meals[0].magnitude == 30);
    REQUIRE(rec.boluses.size() == 1);
    CHECK(rec.boluses[0].magnitude == 1.3);
    REQUIRE(rec.basal.size() == 1);
    CHECK(rec.basal[0].rate_units_per_hour == 0.9);
    CHECK(rec.basal[0].end == rec.glucose.back().first);  // runs to the last reading
    REQUIRE(stats.unmapped_sections.size() == 1);
    CHECK(stats.unmapped_sections[0] == "sleep");
}

TEST_CASE("ohio xml: missing meal section is fine; malformed xml rejected") {
    TempFile ok("dataio_ohio2.xml",
                "<patient id=\"x\"><glucose_level>"
                "<event ts=\"07-12-2021 16:00:00\" value=\"101\"/>"
                "</glucose_level></patient>");
    const auto rec = dataio::load_ohio_xml(ok.path);
    CHECK(rec.meals.empty());
    CHECK(rec.glucose.size() == 1);

    TempFile bad("dataio_bad.xml", "<patient><glucose_level><event ts=\"oops ");
    CHECK_THROWS_AS(dataio::load_ohio_xml(bad.path), std::runtime_error);
}

TEST_CASE("ohio xml: temp_basal overrides the scheduled rate inside its interval") {
    TempFile f("dataio_ohio3.xml",
               "<patient id=\"x\">"
               "<glucose_level><event ts=\"2024-01-01 00:00:00\" value=\"100\"/>"
               "<event ts=\"2024-01-01 02:00:00\" value=\"100\"/></glucose_level>"
               "<basal><event ts=\"2024-01-01 00:00:00\" value=\"1.0\"/></basal>"
               "<temp_basal><event ts_begin=\"2024-01-01 00:30:00\" ts_end=\"2024-01-01 01:00:00\" value=\"0.5\"/></temp_basal>"
               "</patient>");
    const auto rec = dataio::load_ohio_xml(f.path);
    REQUIRE(rec.basal.size() == 3);
    CHECK(rec.basal[0].rate_units_per_hour == 1.0);
    CHECK(rec.basal[0].end == parse_timestamp("2024-01-01T00:30:00"));
    CHECK(rec.basal[1].rate_units_per_hour == 0.5);
    CHECK(rec.basal[2].rate_units_per_hour == 1.0);
    CHECK(rec.basal[2].start == parse_timestamp("2024-01-01T01:00:00"));
}

TEST_CASE("record_to_series: rasterizes onto the grid with gaps as missing") {
    dataio::PatientRecord rec;
    rec.glucose = {{0, 100.0}, {300, 101.0}, {1200, 104.0}};
    const auto series = dataio::record_to_series(rec);
    REQUIRE(series.length() == 5);
    const auto& g = series.channel("glucose");
    CHECK(g[0] == 100.0);
    CHECK(g[1] == 101.0);
    CHECK(is_missing(g[2]));
    CHECK(is_missing(g[3]));
    CHECK(g[4] == 104.0);
}

TEST_CASE("synthetic: determinism, range, meal effect") {
    dataio::SynthConfig cfg;
    cfg.days = 3;
    cfg.seed = 9;
    const auto a = dataio::generate_synthetic(cfg);
    const auto b = dataio::generate_synthetic(cfg);
    REQUIRE(a.glucose.size() == b.glucose.size());
    for (std::size_t i = 0; i < a.glucose.size(); ++i) CHECK(a.glucose[i] == b.glucose[i]);
    CHECK(a.glucose.size() == 3 * 288);
    CHECK(a.meals.size() == 9);
    CHECK(a.boluses.size() == 9);

    SUBCASE("all samples inside the physiologic range under defaults (14 days)") {
        dataio::SynthConfig full;
        const auto rec = dataio::generate_synthetic(full);
        for (const auto& [ts, v] : rec.glucose) {
            CHECK(v >= 40.0);
            CHECK(v <= 400.0);
        }
    }
    SUBCASE("noise 0 and no meals gives the constant-plus-drift trace") {
        dataio::SynthConfig quiet;
        quiet.days = 2;
        quiet.noise_std = 0.0;
        quiet.meals_per_day = 0;
        const auto rec = dataio::generate_synthetic(quiet);
        for (const auto& [ts, v] : rec.glucose) {
            CHECK(v >= quiet.baseline_mgdl - quiet.circadian_amp - 1e-9);
            CHECK(v <= quiet.baseline_mgdl + quiet.circadian_amp + 1e-9);
        }
        CHECK(rec.meals.empty());
    }
    SUBCASE("adding one meal raises glucose within (15, 180] minutes after it") {
        dataio::SynthConfig base;
        base.days = 1;
        base.noise_std = 0.0;
        base.meals_per_day = 0;
        dataio::SynthConfig with_meal = base;
        with_meal.meals_per_day = 1;
        with_meal.bolus_per_carb = 0.0;  // isolate the carb kernel
        const auto quiet = dataio::generate_synthetic(base);
        const auto fed = dataio::generate_synthetic(with_meal);
        REQUIRE(fed.meals.size() == 1);
        const Timestamp meal_ts = fed.meals[0].time;
        bool raised = false;
        for (std::size_t i = 0; i < quiet.glucose.size(); ++i) {
            const Timestamp ts = quiet.glucose[i].first;
            const double delta = fed.glucose[i].second - quiet.glucose[i].second;
            const double minutes = static_cast<double>(ts - meal_ts) / 60.0;
            if (minutes > 15.0 && minutes <= 180.0) {
                CHECK(delta >= 0.0);
                if (delta > 1.0) raised = true;
            } else if (minutes < 0.0) {
                CHECK(delta == 0.0);
            }
        }
        CHECK(raised);
    }
}

TEST_CASE("synthetic: key=value config parsing") {
    TempFile f("synth_cfg_test.txt",
               "# fixture settings\n"
               "days = 4\n"
               "noise_std = 2.5\n"
               "seed = 123\n"
               "meals_per_day = 2\n");
    const auto cfg = dataio::load_synth_config(f.path);
    CHECK(cfg.days == 4);
    CHECK(cfg.noise_std == 2.5);
    CHECK(cfg.seed == 123);
    CHECK(cfg.meals_per_day == 2);

    TempFile bad("synth_cfg_bad.txt", "dayz = 4\n");
    CHECK_THROWS_AS(dataio::load_synth_config(bad.path), std::runtime_error);
}
