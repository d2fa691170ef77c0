#include "gluconet/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gluconet::report {

namespace {

std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

struct MeanStd {
    double mean = 0.0;
    double stdev = 0.0;
    bool any = false;
};

MeanStd mean_std(const std::vector<double>& v) {
    MeanStd ms;
    if (v.empty()) return ms;
    ms.any = true;
    for (double x : v) ms.mean += x;
    ms.mean /= static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) acc += (x - ms.mean) * (x - ms.mean);
    ms.stdev = std::sqrt(acc / static_cast<double>(v.size()));
    return ms;
}

}  // namespace

void write_runs_csv(const std::string& path, const std::vector<RunRow>& rows) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("report: cannot open " + path);
    os << "patient,model,horizon_min,run,seed,rmse,mae,r2,params,diverged,out_of_range\n";
    for (const auto& r : rows) {
        os << r.patient << ',' << r.model << ',' << horizon_minutes(r.horizon_samples) << ','
           << r.run << ',' << r.seed << ',' << fmt_full(r.metrics.rmse) << ','
           << fmt_full(r.metrics.mae) << ',' << (r.metrics.r2 ? fmt_full(*r.metrics.r2) : "")
           << ',' << r.params << ',' << (r.diverged ? 1 : 0) << ',' << r.out_of_range << '\n';
    }
    if (!os) throw std::runtime_error("report: write failed for " + path);
}

std::vector<RunRow> read_runs_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("report: cannot open " + path);
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("report: empty file " + path);
    std::vector<RunRow> rows;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != 11)
            throw std::runtime_error("report: bad row at line " + std::to_string(line_no));
        RunRow r;
        r.patient = cells[0];
        r.model = cells[1];
        r.horizon_samples = static_cast<std::size_t>(std::stoi(cells[2]) / 5);
        r.run = std::stoi(cells[3]);
        r.seed = static_cast<unsigned>(std::stoul(cells[4]));
        r.metrics.rmse = std::stod(cells[5]);
        r.metrics.mae = std::stod(cells[6]);
        if (!cells[7].empty()) r.metrics.r2 = std::stod(cells[7]);
        r.params = static_cast<std::size_t>(std::stoull(cells[8]));
        r.diverged = cells[9] == "1";
        r.out_of_range = static_cast<std::size_t>(std::stoull(cells[10]));
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_steps_csv(const std::string& path, const std::vector<StepRow>& rows) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("report: cannot open " + path);
    os << "patient,model,horizon_min,run,step,rmse,mae,r2\n";
    for (const auto& r : rows) {
        os << r.patient << ',' << r.model << ',' << horizon_minutes(r.horizon_samples) << ','
           << r.run << ',' << r.step << ',' << fmt_full(r.metrics.rmse) << ','
           << fmt_full(r.metrics.mae) << ',' << (r.metrics.r2 ? fmt_full(*r.metrics.r2) : "") << '\n';
    }
}

void write_summary(const std::string& txt_path, const std::string& csv_path,
                   const std::vector<RunRow>& rows) {
    // model -> horizon -> metric samples across (patients x runs)
    std::map<std::string, std::map<std::size_t, std::vector<double>>> rmse, mae, r2;
    std::set<std::size_t> horizons;
    std::vector<std::string> model_order;
    for (const auto& r : rows) {
        if (r.diverged) continue;
        if (std::find(model_order.begin(), model_order.end(), r.model) == model_order.end())
            model_order.push_back(r.model);
        horizons.insert(r.horizon_samples);
        rmse[r.model][r.horizon_samples].push_back(r.metrics.rmse);
        mae[r.model][r.horizon_samples].push_back(r.metrics.mae);
        if (r.metrics.r2) r2[r.model][r.horizon_samples].push_back(*r.metrics.r2);
    }

    std::ofstream txt(txt_path);
    std::ofstream csv(csv_path);
    if (!txt || !csv) throw std::runtime_error("report: cannot open summary outputs");

    csv << "model,metric,horizon_min,mean,std,n\n";
    const char* metric_names[3] = {"RMSE", "MAE", "R2"};
    const std::map<std::string, std::map<std::size_t, std::vector<double>>>* tables[3] = {&rmse, &mae,
                                                                                          &r2};
    txt << "Average error metrics per model and prediction horizon (mean +/- std across runs)\n\n";
    txt << "              ";
    for (int mi = 0; mi < 3; ++mi)
        for (std::size_t h : horizons) {
            char head[32];
            std::snprintf(head, sizeof(head), " %s@%-3d   ", metric_names[mi], horizon_minutes(h));
            txt << head;
        }
    txt << "\nmodel\n";
    for (const auto& model : model_order) {
        char cell[64];
        std::snprintf(cell, sizeof(cell), "%-14s", model.c_str());
        txt << cell;
        for (int mi = 0; mi < 3; ++mi) {
            for (std::size_t h : horizons) {
                const auto it_model = tables[mi]->find(model);
                std::vector<double> vals;
                if (it_model != tables[mi]->end()) {
                    const auto it_h = it_model->second.find(h);
                    if (it_h != it_model->second.end()) vals = it_h->second;
                }
                const MeanStd ms = mean_std(vals);
                if (ms.any)
                    std::snprintf(cell, sizeof(cell), "%6.2f+-%-5.2f", ms.mean, ms.stdev);
                else
                    std::snprintf(cell, sizeof(cell), "%6s        ", "-");
                txt << cell;
                csv << model << ',' << metric_names[mi] << ',' << horizon_minutes(h) << ','
                    << (ms.any ? fmt_full(ms.mean) : "") << ',' << (ms.any ? fmt_full(ms.stdev) : "")
                    << ',' << vals.size() << '\n';
            }
        }
        txt << '\n';
    }
}

void write_efficiency_csv(const std::string& path, const std::vector<eval::EfficiencyRow>& rows) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("report: cannot open " + path);
    os << "config,params,rmse,pareto\n";
    for (const auto& r : rows)
        os << r.config << ',' << r.params << ',' << fmt_full(r.rmse) << ',' << (r.pareto ? 1 : 0)
           << '\n';
}

std::vector<eval::EfficiencyRow> efficiency_from_runs(const std::vector<RunRow>& rows,
                                                      std::size_t horizon_samples) {
    std::map<std::string, std::pair<std::size_t, std::vector<double>>> by_model;
    for (const auto& r : rows) {
        if (r.diverged || r.horizon_samples != horizon_samples) continue;
        by_model[r.model].first = r.params;
        by_model[r.model].second.push_back(r.metrics.rmse);
    }
    std::vector<eval::EfficiencyEntry> entries;
    for (const auto& [model, pr] : by_model)
        entries.push_back({model, pr.first, mean_std(pr.second).mean});
    return eval::efficiency_table(entries);
}

}  // namespace gluconet::report
