#include <algorithm>
#include <set>
#include <tuple>

#include "visionts/errors.hpp"
#include "visionts/eval.hpp"

namespace visionts {

namespace {

bool row_less(const ReportRow& a, const ReportRow& b) {
    return std::tie(a.dataset, a.horizon, a.method) < std::tie(b.dataset, b.horizon, b.method);
}

}  // namespace

void EvalReport::merge(const EvalReport& other) {
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
    for (const auto& [k, v] : other.config) config[k] = v;
}

std::vector<AverageRow> EvalReport::averages() const {
    std::map<std::pair<std::string, std::string>, AverageRow> acc;
    for (const auto& r : rows) {
        auto& a = acc[{r.dataset, r.method}];
        a.dataset = r.dataset;
        a.method = r.method;
        a.mse += r.mse;
        a.mae += r.mae;
        a.horizons.push_back(r.horizon);
    }
    std::vector<AverageRow> out;
    for (auto& [key, a] : acc) {
        const double n = static_cast<double>(a.horizons.size());
        a.mse /= n;
        a.mae /= n;
        std::sort(a.horizons.begin(), a.horizons.end());
        out.push_back(std::move(a));
    }
    return out;
}

std::map<std::string, double> EvalReport::normalized_maes(const std::string& reference) const {
    std::map<std::string, std::map<std::string, double>> by_method;  // method -> dataset -> mae
    for (const auto& a : averages()) by_method[a.method][a.dataset] = a.mae;
    std::map<std::string, double> out;
    const auto ref = by_method.find(reference);
    if (ref == by_method.end()) return out;
    for (const auto& [method, per_dataset] : by_method) {
        if (per_dataset.size() != ref->second.size()) continue;
        try {
            out[method] = normalized_mae(per_dataset, ref->second);
        } catch (const AggregationError&) {
            // a zero reference MAE leaves the method out of the aggregate
        }
    }
    return out;
}

nlohmann::json EvalReport::to_json() const {
    std::vector<ReportRow> sorted = rows;
    std::sort(sorted.begin(), sorted.end(), row_less);
    nlohmann::json jrows = nlohmann::json::array();
    for (const auto& r : sorted)
        jrows.push_back({{"dataset", r.dataset},
                         {"horizon", r.horizon},
                         {"method", r.method},
                         {"mse", r.mse},
                         {"mae", r.mae},
                         {"window_count", r.window_count}});
    nlohmann::json javg = nlohmann::json::array();
    for (const auto& a : averages())
        javg.push_back({{"dataset", a.dataset},
                        {"method", a.method},
                        {"mse", a.mse},
                        {"mae", a.mae},
                        {"horizons", a.horizons}});
    nlohmann::json doc;
    doc["rows"] = std::move(jrows);
    doc["averages"] = std::move(javg);
    const std::string reference = "seasonal_naive";
    const auto nmae = normalized_maes(reference);
    if (!nmae.empty()) doc["normalized_mae"] = {{"reference", reference}, {"methods", nmae}};
    doc["config"] = nlohmann::json::object();
    for (const auto& [k, v] : config) doc["config"][k] = v;
    return doc;
}

std::string EvalReport::dump() const { return to_json().dump(2) + "\n"; }

EvalReport EvalReport::from_json(const nlohmann::json& doc) {
    EvalReport report;
    try {
        for (const auto& r : doc.at("rows"))
            report.rows.push_back({r.at("dataset").get<std::string>(), r.at("horizon").get<std::size_t>(),
                                   r.at("method").get<std::string>(), r.at("mse").get<double>(),
                                   r.at("mae").get<double>(), r.at("window_count").get<std::size_t>()});
        if (doc.contains("config"))
            for (const auto& [k, v] : doc.at("config").items()) report.config[k] = v;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed report: ") + e.what());
    }
    return report;
}

}  // namespace visionts
