#include "ttv/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace ttv {

namespace {

double mean_of(const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double population_stddev(const std::vector<double>& values) {
    const double mean = mean_of(values);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size()));
}

}  // namespace

double travel_time_variability(const std::vector<TravelTime>& hourly) {
    if (hourly.empty()) {
        throw undefined_metric_error("travel_time_variability: empty hourly vector");
    }
    std::vector<double> values;
    values.reserve(hourly.size());
    for (const auto& entry : hourly) {
        if (!entry) {
            throw undefined_metric_error(
                "travel_time_variability: unreachable entry in hourly vector");
        }
        values.push_back(*entry);
    }
    return population_stddev(values);
}

ZoneMetrics make_zone_metrics(const Zone& zone, FacilityKind kind,
                              const std::vector<TravelTime>& hourly) {
    ZoneMetrics m;
    m.zone_id = zone.zone_id;
    m.kind = kind;
    m.hourly = hourly;
    m.lad_code = zone.lad_code;
    m.settlement = zone.settlement;
    m.n_unreachable_hours = static_cast<int>(
        std::count_if(hourly.begin(), hourly.end(), [](const TravelTime& t) { return !t; }));
    m.reachable = m.n_unreachable_hours == 0 && !hourly.empty();
    if (m.reachable) {
        std::vector<double> values;
        values.reserve(hourly.size());
        for (const auto& t : hourly) values.push_back(*t);
        m.mean_tt = mean_of(values);
        m.ttv = population_stddev(values);
    }
    return m;
}

double gini(std::vector<double> values) {
    if (values.empty()) throw undefined_metric_error("gini: empty input");
    double sum = 0.0;
    for (double v : values) {
        if (v < 0.0 || !std::isfinite(v)) {
            throw undefined_metric_error("gini: values must be non-negative and finite");
        }
        sum += v;
    }
    if (sum == 0.0) return 0.0;
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double weighted = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * values[i];
    }
    return weighted / (n * sum);
}

std::optional<RegionAggregate> aggregate_region(const std::vector<ZoneMetrics>& zones,
                                                const std::string& lad_code) {
    RegionAggregate agg;
    agg.lad_code = lad_code;
    std::vector<double> means;
    std::vector<double> ttvs;
    for (const auto& z : zones) {
        if (z.lad_code != lad_code) continue;
        agg.kind = z.kind;
        ++agg.n_zones;
        if (!z.reachable) continue;
        means.push_back(z.mean_tt);
        ttvs.push_back(z.ttv);
    }
    if (means.empty()) return std::nullopt;
    agg.n_reachable = means.size();
    agg.mean_of_means = mean_of(means);
    agg.mean_ttv = mean_of(ttvs);
    agg.gini_mean_tt = gini(means);
    agg.gini_ttv = gini(ttvs);
    return agg;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw undefined_metric_error("quantile of empty sample");
    if (sorted.size() == 1) return sorted.front();
    const double h = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::vector<SummaryRow> summarize_by_settlement(const std::vector<ZoneMetrics>& zones) {
    std::map<Settlement, std::vector<double>> per_class;
    for (const auto& z : zones) {
        if (z.reachable) per_class[z.settlement].push_back(z.ttv);
    }
    std::vector<SummaryRow> rows;
    for (auto& [settlement, values] : per_class) {
        std::sort(values.begin(), values.end());
        SummaryRow row;
        row.settlement = settlement;
        row.count = values.size();
        row.mean = mean_of(values);
        row.median = quantile_sorted(values, 0.5);
        row.stddev = population_stddev(values);
        row.iqr = quantile_sorted(values, 0.75) - quantile_sorted(values, 0.25);
        row.min = values.front();
        row.max = values.back();
        rows.push_back(row);
    }
    return rows;
}

}  // namespace ttv
