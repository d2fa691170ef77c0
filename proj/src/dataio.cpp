#include "gluconet/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "gluconet/tensor.hpp"

namespace gluconet::dataio {

namespace {

// Howard Hinnant's civil-date algorithms.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const int yoe = y - era * 400;
    const int doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const int doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<std::int64_t>(era) * 146097 + doe - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<int>(z - era * 146097);
    const int yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const int mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = static_cast<int>(yoe + era * 400) + (m <= 2);
}

bool parse_int_field(const std::string& s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    out = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
        out = out * 10 + (s[i] - '0');
    }
    return true;
}

}  // namespace

Timestamp parse_timestamp(const std::string& text) {
    int a = 0, b = 0, c = 0, hh = 0, mm = 0, ss = 0;
    // "YYYY-MM-DD?HH:MM:SS" or "DD-MM-YYYY HH:MM:SS"
    const bool iso = text.size() == 19 && text[4] == '-' && text[7] == '-' &&
                     (text[10] == 'T' || text[10] == ' ') && text[13] == ':' && text[16] == ':';
    const bool ohio = text.size() == 19 && text[2] == '-' && text[5] == '-' && text[10] == ' ' &&
                      text[13] == ':' && text[16] == ':';
    int y, mo, d;
    if (iso) {
        if (!parse_int_field(text, 0, 4, a) || !parse_int_field(text, 5, 2, b) ||
            !parse_int_field(text, 8, 2, c))
            throw std::invalid_argument("bad timestamp '" + text + "'");
        y = a;
        mo = b;
        d = c;
    } else if (ohio) {
        if (!parse_int_field(text, 0, 2, a) || !parse_int_field(text, 3, 2, b) ||
            !parse_int_field(text, 6, 4, c))
            throw std::invalid_argument("bad timestamp '" + text + "'");
        y = c;
        mo = b;
        d = a;
    } else {
        throw std::invalid_argument("bad timestamp '" + text + "' (expected ISO-8601 or DD-MM-YYYY HH:MM:SS)");
    }
    if (!parse_int_field(text, 11, 2, hh) || !parse_int_field(text, 14, 2, mm) ||
        !parse_int_field(text, 17, 2, ss))
        throw std::invalid_argument("bad timestamp '" + text + "'");
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || hh > 23 || mm > 59 || ss > 60)
        throw std::invalid_argument("bad timestamp '" + text + "'");
    return days_from_civil(y, mo, d) * 86400 + hh * 3600 + mm * 60 + ss;
}

std::string format_timestamp(Timestamp ts) {
    std::int64_t days = ts / 86400;
    std::int64_t sec = ts % 86400;
    if (sec < 0) {
        sec += 86400;
        --days;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02lld:%02lld:%02lld", y, m, d,
                  static_cast<long long>(sec / 3600), static_cast<long long>((sec / 60) % 60),
                  static_cast<long long>(sec % 60));
    return buf;
}

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    cells.push_back(cur);
    return cells;
}

double parse_number(const std::string& cell, int line_no, int col) {
    try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("csv: malformed number at line " + std::to_string(line_no) +
                                 ", column " + std::to_string(col));
    }
}

constexpr const char* kCsvHeader = "timestamp,glucose,carbs,bolus,basal_rate";

std::string trim_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

PatientRecord load_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("csv: cannot open " + path);
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("csv: empty file " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader)
        throw std::runtime_error("csv: unknown header '" + line + "' (expected '" + kCsvHeader + "')");

    PatientRecord rec;
    const auto slash = path.find_last_of('/');
    std::string stem = slash == std::string::npos ? path : path.substr(slash + 1);
    const auto dot = stem.find_last_of('.');
    if (dot != std::string::npos && dot > 0) stem.erase(dot);
    rec.patient_id = stem;
    Timestamp prev = std::numeric_limits<Timestamp>::min();
    Timestamp open_basal_start = 0;
    double open_basal_rate = -1.0;
    Timestamp last_ts = 0;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        const auto cells = split_csv_row(line);
        if (cells.size() != 5)
            throw std::runtime_error("csv: expected 5 cells at line " + std::to_string(line_no) +
                                     ", got " + std::to_string(cells.size()));
        Timestamp ts;
        try {
            ts = parse_timestamp(cells[0]);
        } catch (const std::exception& e) {
            throw std::runtime_error("csv: line " + std::to_string(line_no) + ": " + e.what());
        }
        if (ts < prev)
            throw std::runtime_error("csv: timestamp goes backwards at line " + std::to_string(line_no));
        prev = ts;
        last_ts = ts;
        if (!cells[1].empty()) rec.glucose.emplace_back(ts, parse_number(cells[1], line_no, 2));
        if (!cells[2].empty())
            rec.meals.push_back({ts, ssr::EventRecord::Kind::meal, parse_number(cells[2], line_no, 3)});
        if (!cells[3].empty())
            rec.boluses.push_back({ts, ssr::EventRecord::Kind::bolus, parse_number(cells[3], line_no, 4)});
        if (!cells[4].empty()) {
            const double rate = parse_number(cells[4], line_no, 5);
            if (open_basal_rate > 0.0) rec.basal.push_back({open_basal_start, ts, open_basal_rate});
            open_basal_start = ts;
            open_basal_rate = rate;
        }
    }
    if (open_basal_rate > 0.0 && last_ts > open_basal_start)
        rec.basal.push_back({open_basal_start, last_ts, open_basal_rate});
    return rec;
}

void save_csv(const std::string& path, const PatientRecord& record) {
    // one row per distinct timestamp, cells merged across streams
    struct Row {
        double glucose = std::numeric_limits<double>::quiet_NaN();
        double carbs = std::numeric_limits<double>::quiet_NaN();
        double bolus = std::numeric_limits<double>::quiet_NaN();
        double basal = std::numeric_limits<double>::quiet_NaN();
    };
    std::vector<std::pair<Timestamp, Row>> rows;
    auto row_at = [&rows](Timestamp ts) -> Row& {
        auto it = std::lower_bound(rows.begin(), rows.end(), ts,
                                   [](const auto& r, Timestamp t) { return r.first < t; });
        if (it == rows.end() || it->first != ts) it = rows.insert(it, {ts, Row{}});
        return it->second;
    };
    for (const auto& [ts, v] : record.glucose) row_at(ts).glucose = v;
    for (const auto& e : record.meals) {
        Row& r = row_at(e.time);
        r.carbs = std::isnan(r.carbs) ? e.magnitude : r.carbs + e.magnitude;
    }
    for (const auto& e : record.boluses) {
        Row& r = row_at(e.time);
        r.bolus = std::isnan(r.bolus) ? e.magnitude : r.bolus + e.magnitude;
    }
    for (std::size_t i = 0; i < record.basal.size(); ++i) {
        const auto& seg = record.basal[i];
        row_at(seg.start).basal = seg.rate_units_per_hour;
        const bool chained = i + 1 < record.basal.size() && record.basal[i + 1].start == seg.end;
        if (!chained) row_at(seg.end).basal = 0.0;
    }

    std::ofstream os(path);
    if (!os) throw std::runtime_error("csv: cannot open " + path + " for writing");
    os << kCsvHeader << "\n";
    for (const auto& [ts, r] : rows) {
        os << format_timestamp(ts) << ',';
        if (!std::isnan(r.glucose)) os << trim_number(r.glucose);
        os << ',';
        if (!std::isnan(r.carbs)) os << trim_number(r.carbs);
        os << ',';
        if (!std::isnan(r.bolus)) os << trim_number(r.bolus);
        os << ',';
        if (!std::isnan(r.basal)) os << trim_number(r.basal);
        os << '\n';
    }
    if (!os) throw std::runtime_error("csv: write failed for " + path);
}

// --- OhioT1DM XML ------------------------------------------------------------

namespace {

struct XmlTag {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attrs;
    bool closing = false;      // </name>
    bool self_closing = false; // <name ... />
};

const std::string* attr(const XmlTag& tag, const std::string& key) {
    for (const auto& [k, v] : tag.attrs)
        if (k == key) return &v;
    return nullptr;
}

// Minimal scanner over <...> tags; content between tags is ignored.
class XmlScanner {
public:
    explicit XmlScanner(std::string text) : text_(std::move(text)) {}

    bool next(XmlTag& tag) {
        while (true) {
            const auto open = text_.find('<', pos_);
            if (open == std::string::npos) return false;
            if (text_.compare(open, 4, "<!--") == 0) {
                const auto end = text_.find("-->", open);
                if (end == std::string::npos) throw std::runtime_error("xml: unterminated comment");
                pos_ = end + 3;
                continue;
            }
            if (text_.compare(open, 2, "<?") == 0) {
                const auto end = text_.find("?>", open);
                if (end == std::string::npos) throw std::runtime_error("xml: unterminated declaration");
                pos_ = end + 2;
                continue;
            }
            const auto close = text_.find('>', open);
            if (close == std::string::npos) throw std::runtime_error("xml: unterminated tag");
            parse_tag(text_.substr(open + 1, close - open - 1), tag);
            pos_ = close + 1;
            return true;
        }
    }

private:
    static void parse_tag(std::string body, XmlTag& tag) {
        tag = XmlTag{};
        if (!body.empty() && body.front() == '/') {
            tag.closing = true;
            body.erase(0, 1);
        }
        if (!body.empty() && body.back() == '/') {
            tag.self_closing = true;
            body.pop_back();
        }
        std::size_t i = 0;
        auto skip_ws = [&] { while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i; };
        skip_ws();
        const std::size_t name_begin = i;
        while (i < body.size() && !std::isspace(static_cast<unsigned char>(body[i]))) ++i;
        tag.name = body.substr(name_begin, i - name_begin);
        if (tag.name.empty()) throw std::runtime_error("xml: empty tag name");
        while (true) {
            skip_ws();
            if (i >= body.size()) break;
            const std::size_t key_begin = i;
            while (i < body.size() && body[i] != '=' && !std::isspace(static_cast<unsigned char>(body[i]))) ++i;
            std::string key = body.substr(key_begin, i - key_begin);
            skip_ws();
            if (i >= body.size() || body[i] != '=')
                throw std::runtime_error("xml: attribute '" + key + "' missing value");
            ++i;
            skip_ws();
            if (i >= body.size() || (body[i] != '"' && body[i] != '\''))
                throw std::runtime_error("xml: attribute '" + key + "' missing quotes");
            const char quote = body[i++];
            const auto val_end = body.find(quote, i);
            if (val_end == std::string::npos)
                throw std::runtime_error("xml: unterminated attribute value for '" + key + "'");
            tag.attrs.emplace_back(std::move(key), body.substr(i, val_end - i));
            i = val_end + 1;
        }
    }

    std::string text_;
    std::size_t pos_ = 0;
};

double attr_number(const XmlTag& tag, const std::string& key) {
    const std::string* s = attr(tag, key);
    if (!s) throw std::runtime_error("xml: <" + tag.name + "> missing attribute '" + key + "'");
    try {
        return std::stod(*s);
    } catch (const std::exception&) {
        throw std::runtime_error("xml: bad number in attribute '" + key + "'");
    }
}

Timestamp attr_time(const XmlTag& tag, const std::string& key) {
    const std::string* s = attr(tag, key);
    if (!s) throw std::runtime_error("xml: <" + tag.name + "> missing attribute '" + key + "'");
    return parse_timestamp(*s);
}

}  // namespace

PatientRecord load_ohio_xml(const std::string& path, XmlLoadStats* stats) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("xml: cannot open " + path);
    std::stringstream buffer;
    buffer << is.rdbuf();
    XmlScanner scanner(buffer.str());

    PatientRecord rec;
    XmlLoadStats local;
    XmlLoadStats& st = stats ? *stats : local;
    std::vector<ssr::BasalSegment> temp_overrides;
    std::vector<std::pair<Timestamp, double>> basal_changes;
    std::string section;

    XmlTag tag;
    while (scanner.next(tag)) {
        if (tag.name == "patient" && !tag.closing) {
            if (const auto* id = attr(tag, "id")) rec.patient_id = *id;
            continue;
        }
        if (tag.name == "event") {
            if (section == "glucose_level") {
                rec.glucose.emplace_back(attr_time(tag, "ts"), attr_number(tag, "value"));
                ++st.glucose_events;
            } else if (section == "meal") {
                rec.meals.push_back({attr_time(tag, "ts"), ssr::EventRecord::Kind::meal,
                                     attr_number(tag, "carbs")});
                ++st.meal_events;
            } else if (section == "bolus") {
                const Timestamp ts = attr(tag, "ts_begin") ? attr_time(tag, "ts_begin") : attr_time(tag, "ts");
                rec.boluses.push_back({ts, ssr::EventRecord::Kind::bolus, attr_number(tag, "dose")});
                ++st.bolus_events;
            } else if (section == "basal") {
                basal_changes.emplace_back(attr_time(tag, "ts"), attr_number(tag, "value"));
                ++st.basal_events;
            } else if (section == "temp_basal") {
                temp_overrides.push_back({attr_time(tag, "ts_begin"), attr_time(tag, "ts_end"),
                                          attr_number(tag, "value")});
                ++st.temp_basal_events;
            }
            continue;
        }
        if (tag.closing) {
            if (tag.name == section) section.clear();
            continue;
        }
        // a new section opens
        if (tag.name == "glucose_level" || tag.name == "meal" || tag.name == "bolus" ||
            tag.name == "basal" || tag.name == "temp_basal") {
            section = tag.name;
        } else {
            section = tag.name;
            st.unmapped_sections.push_back(tag.name);
        }
    }

    // stable order within each stream
    std::stable_sort(rec.glucose.begin(), rec.glucose.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    auto by_time = [](const ssr::EventRecord& a, const ssr::EventRecord& b) { return a.time < b.time; };
    std::stable_sort(rec.meals.begin(), rec.meals.end(), by_time);
    std::stable_sort(rec.boluses.begin(), rec.boluses.end(), by_time);

    // basal rate changes hold until the next change; the last one runs to the
    // final glucose reading
    if (!basal_changes.empty()) {
        std::stable_sort(basal_changes.begin(), basal_changes.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        const Timestamp end_of_data =
            rec.glucose.empty() ? basal_changes.back().first : rec.glucose.back().first;
        for (std::size_t i = 0; i < basal_changes.size(); ++i) {
            const Timestamp end = i + 1 < basal_changes.size() ? basal_changes[i + 1].first : end_of_data;
            if (end > basal_changes[i].first && basal_changes[i].second > 0.0)
                rec.basal.push_back({basal_changes[i].first, end, basal_changes[i].second});
        }
    }
    // temp_basal overrides the scheduled rate over its interval
    for (const auto& ov : temp_overrides) {
        std::vector<ssr::BasalSegment> next;
        for (const auto& seg : rec.basal) {
            if (seg.end <= ov.start || seg.start >= ov.end) {
                next.push_back(seg);
                continue;
            }
            if (seg.start < ov.start) next.push_back({seg.start, ov.start, seg.rate_units_per_hour});
            if (seg.end > ov.end) next.push_back({ov.end, seg.end, seg.rate_units_per_hour});
        }
        if (ov.rate_units_per_hour > 0.0) next.push_back(ov);
        std::stable_sort(next.begin(), next.end(),
                         [](const auto& a, const auto& b) { return a.start < b.start; });
        rec.basal = std::move(next);
    }
    return rec;
}

TimeAlignedSeries record_to_series(const PatientRecord& record, int step_seconds) {
    if (record.glucose.empty()) throw std::invalid_argument("record_to_series: no glucose readings");
    const Timestamp start = record.glucose.front().first;
    const Timestamp last = record.glucose.back().first;
    const auto n = static_cast<std::size_t>((last - start) / step_seconds) + 1;
    std::vector<double> glucose(n, missing_value());
    for (const auto& [ts, v] : record.glucose) {
        const auto idx = static_cast<std::ptrdiff_t>(
            std::llround(static_cast<double>(ts - start) / step_seconds));
        if (idx >= 0 && static_cast<std::size_t>(idx) < n) glucose[static_cast<std::size_t>(idx)] = v;
    }
    return TimeAlignedSeries(start, step_seconds, {"glucose"}, {std::move(glucose)});
}

// --- synthetic generator ------------------------------------------------------

void SynthConfig::validate() const {
    if (days < 1) throw std::invalid_argument("synth: days must be >= 1");
    if (noise_std < 0.0) throw std::invalid_argument("synth: noise_std must be >= 0");
    if (meals_per_day < 0 || meals_per_day > 4)
        throw std::invalid_argument("synth: meals_per_day must be in [0, 4]");
    if (step_seconds <= 0) throw std::invalid_argument("synth: step must be > 0");
}

PatientRecord generate_synthetic(const SynthConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    auto uniform = [&rng] { return nn::uniform01(rng); };
    auto gauss = [&rng] {
        // Box-Muller on the stable uniform; avoids log(0)
        const double u1 = std::max(nn::uniform01(rng), 1e-12);
        const double u2 = nn::uniform01(rng);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    };

    PatientRecord rec;
    rec.patient_id = "synthetic-" + std::to_string(cfg.seed);
    const Timestamp start = days_from_civil(2024, 1, 1) * 86400;
    const std::size_t n = static_cast<std::size_t>(cfg.days) * 86400u / static_cast<unsigned>(cfg.step_seconds);

    const double meal_hours[4] = {7.5, 12.5, 18.75, 16.0};  // breakfast, lunch, dinner, snack
    const double meal_lo[4] = {35.0, 45.0, 50.0, 15.0};
    const double meal_hi[4] = {65.0, 80.0, 85.0, 30.0};
    for (int day = 0; day < cfg.days; ++day) {
        for (int m = 0; m < cfg.meals_per_day; ++m) {
            const double jitter = (2.0 * uniform() - 1.0) * cfg.meal_jitter_minutes;
            const double grams = meal_lo[m] + uniform() * (meal_hi[m] - meal_lo[m]);
            Timestamp t = start + static_cast<Timestamp>(day) * 86400 +
                          static_cast<Timestamp>((meal_hours[m] * 60.0 + jitter) * 60.0);
            t -= t % cfg.step_seconds;  // events land on the grid
            rec.meals.push_back({t, ssr::EventRecord::Kind::meal, std::round(grams)});
            if (cfg.bolus_per_carb > 0.0)
                rec.boluses.push_back({t, ssr::EventRecord::Kind::bolus,
                                       std::round(grams * cfg.bolus_per_carb * 10.0) / 10.0});
        }
    }
    std::sort(rec.meals.begin(), rec.meals.end(),
              [](const auto& a, const auto& b) { return a.time < b.time; });
    std::sort(rec.boluses.begin(), rec.boluses.end(),
              [](const auto& a, const auto& b) { return a.time < b.time; });

    const auto carbs = ssr::operative_carbs(rec.meals, start, cfg.step_seconds, n, {});
    const auto insulin_params = ssr::InsulinKineticsParams::from_peak_duration(55.0, 300.0);
    const auto insulin =
        ssr::active_insulin_series(rec.boluses, start, cfg.step_seconds, n, insulin_params);

    rec.glucose.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double hours = static_cast<double>(i) * cfg.step_seconds / 3600.0;
        const double circadian =
            cfg.circadian_amp * std::sin(2.0 * 3.14159265358979323846 * (hours - 8.0) / 24.0);
        double g = cfg.baseline_mgdl + circadian + cfg.carb_gain * carbs[i] -
                   cfg.insulin_gain * insulin[i];
        if (cfg.noise_std > 0.0) g += cfg.noise_std * gauss();
        rec.glucose.emplace_back(start + static_cast<Timestamp>(i) * cfg.step_seconds, g);
    }
    return rec;
}

SynthConfig load_synth_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("synth config: cannot open " + path);
    SynthConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
        std::size_t b = 0;
        while (b < line.size() && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
        line.erase(0, b);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("synth config: line " + std::to_string(line_no) + " is not key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto strip = [](std::string& s) {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
            std::size_t i = 0;
            while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
            s.erase(0, i);
        };
        strip(key);
        strip(value);
        try {
            if (key == "days") cfg.days = std::stoi(value);
            else if (key == "baseline_mgdl") cfg.baseline_mgdl = std::stod(value);
            else if (key == "circadian_amp") cfg.circadian_amp = std::stod(value);
            else if (key == "carb_gain") cfg.carb_gain = std::stod(value);
            else if (key == "insulin_gain") cfg.insulin_gain = std::stod(value);
            else if (key == "bolus_per_carb") cfg.bolus_per_carb = std::stod(value);
            else if (key == "meals_per_day") cfg.meals_per_day = std::stoi(value);
            else if (key == "meal_jitter_minutes") cfg.meal_jitter_minutes = std::stod(value);
            else if (key == "noise_std") cfg.noise_std = std::stod(value);
            else if (key == "seed") cfg.seed = static_cast<unsigned>(std::stoul(value));
            else if (key == "step_seconds") cfg.step_seconds = std::stoi(value);
            else throw std::runtime_error("synth config: unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw std::runtime_error("synth config: bad value at line " + std::to_string(line_no));
        }
    }
    cfg.validate();
    return cfg;
}

}  // namespace gluconet::dataio
