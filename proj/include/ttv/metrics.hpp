#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ttv/common.hpp"
#include "ttv/zones.hpp"

namespace ttv {

struct ZoneMetrics {
    std::string zone_id;
    FacilityKind kind = FacilityKind::hospital;
    std::vector<TravelTime> hourly;  // one entry per analysis hour
    double mean_tt = 0.0;            // defined iff reachable
    double ttv = 0.0;                // defined iff reachable
    bool reachable = false;          // all hours finite
    int n_unreachable_hours = 0;
    std::string lad_code;
    Settlement settlement = Settlement::urban;
};

// Any unreachable hour marks the zone unreachable for metric purposes: a
// standard deviation over a censored vector would understate variability.
ZoneMetrics make_zone_metrics(const Zone& zone, FacilityKind kind,
                              const std::vector<TravelTime>& hourly);

// Population standard deviation (divisor n) of the hourly vector; the
// analysis hours are the whole population of departures, not a sample.
// Throws undefined_metric_error when any entry is unreachable or the
// vector is empty.
double travel_time_variability(const std::vector<TravelTime>& hourly);

// Gini coefficient of non-negative values:
//   G = sum_i (2i - n - 1) x_(i) / (n sum_i x_i),  x sorted ascending.
// All-zero input is perfect equality (0). Throws undefined_metric_error
// on negative values or an empty vector.
double gini(std::vector<double> values);

struct RegionAggregate {
    std::string lad_code;
    FacilityKind kind = FacilityKind::hospital;
    std::size_t n_zones = 0;      // all zones of the LAD
    std::size_t n_reachable = 0;  // zones entering the aggregates
    double mean_of_means = 0.0;
    double mean_ttv = 0.0;
    double gini_mean_tt = 0.0;
    double gini_ttv = 0.0;
};

// Aggregates over the reachable zones of one LAD; empty when none is
// reachable (the region is excluded and reported separately).
std::optional<RegionAggregate> aggregate_region(const std::vector<ZoneMetrics>& zones,
                                                const std::string& lad_code);

struct SummaryRow {
    Settlement settlement = Settlement::urban;
    std::size_t count = 0;
    double mean = 0.0;
    double median = 0.0;
    double stddev = 0.0;
    double iqr = 0.0;
    double min = 0.0;
    double max = 0.0;
};

// Linear-interpolation quantile of a sorted sample, q in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double q);

// TTV order statistics per settlement class over reachable zones;
// classes with no reachable zone are absent.
std::vector<SummaryRow> summarize_by_settlement(const std::vector<ZoneMetrics>& zones);

}  // namespace ttv
