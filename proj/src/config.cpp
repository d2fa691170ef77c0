#include "gluconet/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gluconet/version.hpp"

namespace gluconet::config {

namespace {

void strip(std::string& s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    s.erase(0, i);
}

double to_double(const std::string& v, const std::string& what) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("junk");
        return d;
    } catch (const std::exception&) {
        throw std::runtime_error("config: bad number for " + what + ": '" + v + "'");
    }
}

int to_int(const std::string& v, const std::string& what) {
    try {
        std::size_t used = 0;
        const int i = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument("junk");
        return i;
    } catch (const std::exception&) {
        throw std::runtime_error("config: bad integer for " + what + ": '" + v + "'");
    }
}

bool to_bool(const std::string& v, const std::string& what) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::runtime_error("config: bad boolean for " + what + ": '" + v + "'");
}

std::vector<double> parse_double_list(const std::string& v, const std::string& what) {
    std::vector<double> out;
    std::string cur;
    for (char c : std::string(v + ",")) {
        if (c == ',') {
            strip(cur);
            if (!cur.empty()) out.push_back(to_double(cur, what));
            cur.clear();
        } else {
            cur += c;
        }
    }
    return out;
}

std::vector<std::size_t> parse_size_list(const std::string& v, const std::string& what) {
    std::vector<std::size_t> out;
    std::string cur;
    for (char c : std::string(v + ",")) {
        if (c == ',') {
            strip(cur);
            if (!cur.empty()) out.push_back(static_cast<std::size_t>(to_int(cur, what)));
            cur.clear();
        } else {
            cur += c;
        }
    }
    return out;
}

// "128,64" is one layer; stacked layers are ';'-separated: "128,128;128,64".
std::vector<std::pair<std::size_t, std::size_t>> parse_lstm_vec(const std::string& v) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::string layer;
    for (char c : std::string(v + ";")) {
        if (c != ';') {
            layer += c;
            continue;
        }
        strip(layer);
        if (layer.empty()) continue;
        const auto comma = layer.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("config: lstm_vec layer '" + layer + "' is not in,out");
        std::string a = layer.substr(0, comma), b = layer.substr(comma + 1);
        strip(a);
        strip(b);
        out.emplace_back(static_cast<std::size_t>(to_int(a, "lstm_vec")),
                         static_cast<std::size_t>(to_int(b, "lstm_vec")));
        layer.clear();
    }
    if (out.empty()) throw std::runtime_error("config: empty lstm_vec");
    return out;
}

}  // namespace

KvConfig KvConfig::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config: cannot open " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_text(ss.str(), path);
}

KvConfig KvConfig::parse_text(const std::string& text, const std::string& origin) {
    KvConfig kv;
    std::istringstream is(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        strip(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error("config: " + origin + ":" + std::to_string(line_no) +
                                         ": unterminated section header");
            section = line.substr(1, line.size() - 2);
            strip(section);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: " + origin + ":" + std::to_string(line_no) +
                                     ": expected key=value");
        std::string key = line.substr(0, eq), value = line.substr(eq + 1);
        strip(key);
        strip(value);
        kv.values_[section][key] = value;
    }
    return kv;
}

std::optional<std::string> KvConfig::get(const std::string& section, const std::string& key) const {
    const auto sit = values_.find(section);
    if (sit == values_.end()) return std::nullopt;
    const auto kit = sit->second.find(key);
    if (kit == sit->second.end()) return std::nullopt;
    consumed_[section][key] = true;
    return kit->second;
}

void KvConfig::set(const std::string& section, const std::string& key, const std::string& value) {
    values_[section][key] = value;
}

std::string KvConfig::canonical_dump() const {
    std::ostringstream os;
    for (const auto& [section, keys] : values_) {
        os << '[' << section << "]\n";
        for (const auto& [k, v] : keys) os << k << " = " << v << '\n';
    }
    return os.str();
}

std::vector<std::string> KvConfig::unconsumed() const {
    std::vector<std::string> out;
    for (const auto& [section, keys] : values_)
        for (const auto& [k, v] : keys)
            if (!consumed_[section][k]) out.push_back(section + "." + k);
    return out;
}

pipeline::ExperimentConfig experiment_from_kv(const KvConfig& kv) {
    pipeline::ExperimentConfig cfg;
    auto take = [&kv](const char* section, const char* key) { return kv.get(section, key); };

    if (auto v = take("experiment", "horizons")) cfg.horizons = parse_size_list(*v, "horizons");
    if (auto v = take("experiment", "window")) cfg.window = static_cast<std::size_t>(to_int(*v, "window"));
    if (auto v = take("experiment", "train_fraction")) cfg.train_fraction = to_double(*v, "train_fraction");
    if (auto v = take("experiment", "runs")) cfg.runs = to_int(*v, "runs");
    if (auto v = take("experiment", "seed")) cfg.seed = static_cast<unsigned>(to_int(*v, "seed"));
    if (auto v = take("experiment", "batch")) cfg.batch = static_cast<std::size_t>(to_int(*v, "batch"));
    if (auto v = take("experiment", "lr")) cfg.lr = to_double(*v, "lr");
    if (auto v = take("experiment", "jobs")) cfg.jobs = to_int(*v, "jobs");
    if (auto v = take("experiment", "max_gap")) cfg.max_gap = static_cast<std::size_t>(to_int(*v, "max_gap"));
    if (auto v = take("experiment", "baseline_horizons"))
        cfg.baseline_horizons = parse_size_list(*v, "baseline_horizons");

    if (auto v = take("vmd", "modes")) cfg.vmd.modes = to_int(*v, "vmd.modes");
    if (auto v = take("vmd", "alpha")) cfg.vmd.alpha = to_double(*v, "vmd.alpha");
    if (auto v = take("vmd", "tau_dual")) cfg.vmd.tau_dual = to_double(*v, "vmd.tau_dual");
    if (auto v = take("vmd", "tol")) cfg.vmd.tol = to_double(*v, "vmd.tol");
    if (auto v = take("vmd", "max_iters")) cfg.vmd.max_iters = to_int(*v, "vmd.max_iters");
    if (auto v = take("vmd", "seed")) cfg.vmd.seed = static_cast<unsigned>(to_int(*v, "vmd.seed"));
    if (auto v = take("vmd", "init")) {
        if (*v == "uniform") cfg.vmd.init = vmd::OmegaInit::uniform;
        else if (*v == "zero") cfg.vmd.init = vmd::OmegaInit::zero;
        else if (*v == "random") cfg.vmd.init = vmd::OmegaInit::random;
        else throw std::runtime_error("config: vmd.init must be uniform|zero|random");
    }
    if (auto v = take("vmd", "split_index"))
        cfg.split_index = static_cast<std::size_t>(to_int(*v, "vmd.split_index"));
    if (auto v = take("vmd", "residual_to_low")) cfg.residual_to_low = to_bool(*v, "vmd.residual_to_low");

    if (auto v = take("ssr", "carb_alpha_inc")) cfg.carb.alpha_inc = to_double(*v, "ssr.carb_alpha_inc");
    if (auto v = take("ssr", "carb_alpha_dec")) cfg.carb.alpha_dec = to_double(*v, "ssr.carb_alpha_dec");
    if (auto v = take("ssr", "carb_delay")) cfg.carb.delay = to_int(*v, "ssr.carb_delay");
    if (auto v = take("ssr", "carb_peak")) cfg.carb.peak_at = to_int(*v, "ssr.carb_peak");
    if (auto v = take("ssr", "carb_end")) cfg.carb.end_at = to_int(*v, "ssr.carb_end");
    if (auto v = take("ssr", "insulin_t_p")) cfg.insulin_t_p = to_double(*v, "ssr.insulin_t_p");
    if (auto v = take("ssr", "insulin_t_d")) cfg.insulin_t_d = to_double(*v, "ssr.insulin_t_d");

    if (auto v = take("models", "lstm_vec")) cfg.lstm_vec = parse_lstm_vec(*v);
    if (auto v = take("models", "train_teacher_variant"))
        cfg.train_teacher_variant = to_bool(*v, "models.train_teacher_variant");
    if (auto v = take("models", "train_student_supervised"))
        cfg.train_student_supervised = to_bool(*v, "models.train_student_supervised");

    if (auto v = take("kd", "alpha")) cfg.kd.alpha = to_double(*v, "kd.alpha");
    if (auto v = take("kd", "alpha_sweep")) cfg.kd_alpha_sweep = parse_double_list(*v, "kd.alpha_sweep");
    if (auto v = take("kd", "tau")) cfg.kd.tau = to_double(*v, "kd.tau");
    if (auto v = take("kd", "softening")) {
        if (*v == "identity") cfg.kd.softening = nn::KdConfig::Softening::identity;
        else if (*v == "tempered_softmax") cfg.kd.softening = nn::KdConfig::Softening::tempered_softmax;
        else throw std::runtime_error("config: kd.softening must be identity|tempered_softmax");
    }

    if (auto v = take("train", "epochs_low")) cfg.epochs_low = to_int(*v, "train.epochs_low");
    if (auto v = take("train", "epochs_teacher")) cfg.epochs_teacher = to_int(*v, "train.epochs_teacher");
    if (auto v = take("train", "epochs_student")) cfg.epochs_student = to_int(*v, "train.epochs_student");

    const auto leftovers = kv.unconsumed();
    if (!leftovers.empty()) {
        std::string msg = "config: unknown keys:";
        for (const auto& k : leftovers) msg += " " + k;
        throw std::runtime_error(msg);
    }
    return cfg;
}

std::string experiment_to_text(const pipeline::ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "[experiment]\n";
    os << "horizons = ";
    for (std::size_t i = 0; i < cfg.horizons.size(); ++i) os << (i ? "," : "") << cfg.horizons[i];
    os << "\nwindow = " << cfg.window << "\ntrain_fraction = " << cfg.train_fraction
       << "\nruns = " << cfg.runs << "\nseed = " << cfg.seed << "\nbatch = " << cfg.batch
       << "\nlr = " << cfg.lr << "\njobs = " << cfg.jobs << "\nmax_gap = " << cfg.max_gap;
    os << "\nbaseline_horizons = ";
    for (std::size_t i = 0; i < cfg.baseline_horizons.size(); ++i)
        os << (i ? "," : "") << cfg.baseline_horizons[i];
    os << "\n[kd]\nalpha = " << cfg.kd.alpha << "\nalpha_sweep = ";
    for (std::size_t i = 0; i < cfg.kd_alpha_sweep.size(); ++i)
        os << (i ? "," : "") << cfg.kd_alpha_sweep[i];
    os << "\ntau = " << cfg.kd.tau << "\nsoftening = "
       << (cfg.kd.softening == nn::KdConfig::Softening::identity ? "identity" : "tempered_softmax");
    os << "\n[models]\nlstm_vec = ";
    for (std::size_t i = 0; i < cfg.lstm_vec.size(); ++i)
        os << (i ? ";" : "") << cfg.lstm_vec[i].first << "," << cfg.lstm_vec[i].second;
    os << "\ntrain_teacher_variant = " << (cfg.train_teacher_variant ? "true" : "false")
       << "\ntrain_student_supervised = " << (cfg.train_student_supervised ? "true" : "false");
    os << "\n[ssr]\ncarb_alpha_inc = " << cfg.carb.alpha_inc
       << "\ncarb_alpha_dec = " << cfg.carb.alpha_dec << "\ncarb_delay = " << cfg.carb.delay
       << "\ncarb_peak = " << cfg.carb.peak_at << "\ncarb_end = " << cfg.carb.end_at
       << "\ninsulin_t_p = " << cfg.insulin_t_p << "\ninsulin_t_d = " << cfg.insulin_t_d;
    os << "\n[train]\nepochs_low = " << cfg.epochs_low << "\nepochs_teacher = " << cfg.epochs_teacher
       << "\nepochs_student = " << cfg.epochs_student;
    os << "\n[vmd]\nmodes = " << cfg.vmd.modes << "\nalpha = " << cfg.vmd.alpha
       << "\ntau_dual = " << cfg.vmd.tau_dual << "\ntol = " << cfg.vmd.tol
       << "\nmax_iters = " << cfg.vmd.max_iters << "\nseed = " << cfg.vmd.seed << "\ninit = "
       << (cfg.vmd.init == vmd::OmegaInit::uniform
               ? "uniform"
               : (cfg.vmd.init == vmd::OmegaInit::zero ? "zero" : "random"))
       << "\nsplit_index = " << cfg.split_index
       << "\nresidual_to_low = " << (cfg.residual_to_low ? "true" : "false") << "\n";
    return os.str();
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) h = (h ^ c) * 1099511628211ull;
    return h;
}

std::uint64_t hash_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("manifest: cannot hash missing file " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return fnv1a64(ss.str());
}

void write_manifest(const std::string& path, const Manifest& manifest) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("manifest: cannot open " + path);
    char hex[32];
    os << "tool = gluconet " << kVersion << "\n";
    os << "subcommand = " << manifest.subcommand << "\n";
    os << "seed = " << manifest.seed << "\n";
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(manifest.config_text)));
    os << "config_hash = " << hex << "\n";
    for (const auto& [p, h] : manifest.inputs) {
        std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
        os << "input = " << p << " " << hex << "\n";
    }
    os << "[config]\n" << manifest.config_text;
    if (!os) throw std::runtime_error("manifest: write failed for " + path);
}

}  // namespace gluconet::config
