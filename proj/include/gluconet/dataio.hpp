#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gluconet/ssr.hpp"
#include "gluconet/timeseries.hpp"

namespace gluconet::dataio {

/// Parses "YYYY-MM-DD[T ]HH:MM:SS" (ISO-8601) or "DD-MM-YYYY HH:MM:SS"
/// (OhioT1DM) into unix seconds.
Timestamp parse_timestamp(const std::string& text);

/// ISO-8601 "YYYY-MM-DDTHH:MM:SS".
std::string format_timestamp(Timestamp ts);

/// One participant's raw event streams. Timestamps within each stream are
/// non-decreasing.
struct PatientRecord {
    std::string patient_id;
    std::vector<std::pair<Timestamp, double>> glucose;  // mg/dL
    std::vector<ssr::EventRecord> meals;                // grams
    std::vector<ssr::EventRecord> boluses;              // units
    std::vector<ssr::BasalSegment> basal;               // units/hour
};

// CSV interchange schema: header exactly
//   timestamp,glucose,carbs,bolus,basal_rate
// ISO-8601 timestamps, one row per event time, empty cells = absent value.
// A basal_rate cell starts a segment at that rate lasting until the next
// basal_rate cell (rate 0 closes a segment without starting one).
PatientRecord load_csv(const std::string& path);
void save_csv(const std::string& path, const PatientRecord& record);

struct XmlLoadStats {
    std::size_t glucose_events = 0;
    std::size_t meal_events = 0;
    std::size_t bolus_events = 0;
    std::size_t basal_events = 0;
    std::size_t temp_basal_events = 0;
    std::vector<std::string> unmapped_sections;  // counted, never guessed at
};

/// Read-only adapter for the OhioT1DM event-list XML layout (glucose_level,
/// meal, bolus, basal, temp_basal sections). Unrecognized sections are
/// skipped and reported through stats.
PatientRecord load_ohio_xml(const std::string& path, XmlLoadStats* stats = nullptr);

/// Glucose rasterized onto the uniform grid as a 'glucose' channel; slots
/// without a reading are missing (NaN) and must be imputed downstream.
TimeAlignedSeries record_to_series(const PatientRecord& record,
                                   int step_seconds = kDefaultStepSeconds);

/// Synthetic trace parameters. The generator reuses the transform kernels
/// (operative carbs up, scaled insulin activity down) plus a sinusoidal
/// circadian drift and seeded Gaussian noise, so pipeline learning checks on
/// the fixture are sharp.
struct SynthConfig {
    int days = 14;
    double baseline_mgdl = 140.0;
    double circadian_amp = 15.0;
    double carb_gain = 0.9;        // mg/dL rise per gram of operative carbs
    double insulin_gain = 8.0;     // mg/dL drop per unit of active insulin
    double bolus_per_carb = 0.1;   // units dosed per gram eaten
    int meals_per_day = 3;
    double meal_jitter_minutes = 25.0;
    double noise_std = 6.0;
    unsigned seed = 1;
    int step_seconds = kDefaultStepSeconds;

    void validate() const;
};

PatientRecord generate_synthetic(const SynthConfig& config);

/// Plain key=value text file (one per line, '#' comments); unknown keys are
/// rejected.
SynthConfig load_synth_config(const std::string& path);

}  // namespace gluconet::dataio
