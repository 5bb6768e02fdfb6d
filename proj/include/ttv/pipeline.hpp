#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ttv/common.hpp"
#include "ttv/deprivation.hpp"
#include "ttv/gtfs.hpp"
#include "ttv/metrics.hpp"
#include "ttv/router.hpp"
#include "ttv/spatial_stats.hpp"
#include "ttv/zones.hpp"

namespace ttv {

inline constexpr const char* kToolVersion = "0.1.0";

// A stage failure distinct from input validation; the CLI maps it to
// exit code 3.
class stage_error : public std::runtime_error {
public:
    stage_error(const std::string& stage, const std::string& what)
        : std::runtime_error("stage " + stage + ": " + what) {}
};

struct RunConfig {
    std::filesystem::path gtfs_dir;
    std::filesystem::path zones;
    std::filesystem::path facilities;
    std::filesystem::path walk_nodes;
    std::filesystem::path walk_edges;
    std::filesystem::path deprivation;  // optional; empty skips the quadrant stage
    std::filesystem::path lookup;       // optional
    std::filesystem::path out_dir = "ttv_run";

    gtfs::ServiceDate service_date;
    std::vector<ClockSec> hours;  // strictly increasing; default 09:00..17:00
    int k_facilities = 5;
    QueryConfig query;  // departure field is driven by `hours`
    double transfer_cap_m = TransitNetwork::kDefaultTransferCapMeters;
    std::size_t knn_k = 10;
    std::size_t n_perm = 999;
    double alpha = 0.05;
    double quantile_threshold = 0.30;
    bool row_standardized = false;
    std::uint64_t seed = 0;
    // Worker-pool size; results are byte-identical at any value, so it is
    // excluded from the manifest.
    int threads = 2;

    void validate() const;  // throws input_error
};

RunConfig default_run_config();

// Flat key = value file; values are strings (quoted or bare), numbers, or
// booleans. `hours` accepts "HH:MM-HH:MM" (hourly steps, inclusive) or a
// comma list. Relative paths resolve against the config file directory.
RunConfig parse_run_config(const std::filesystem::path& path);

struct CorrelationRow {
    std::string pair;
    std::optional<double> r;
    std::optional<double> p_raw;
    std::optional<double> p_fdr;
};

struct KindResults {
    FacilityKind kind = FacilityKind::hospital;
    std::vector<ZoneMetrics> zones;  // sorted by zone_id
    std::vector<RegionAggregate> regions;
    std::vector<std::string> excluded_regions;  // LADs with no reachable zone
    std::vector<SummaryRow> settlement_summary;
    std::optional<StatResult> global_ttv;
    std::optional<StatResult> global_mean_tt;
    std::vector<std::string> lisa_zone_ids;  // aligned with `lisa`
    std::vector<LisaRecord> lisa;
    std::vector<QuadrantRecord> quadrants;
};

struct PipelineResult {
    std::filesystem::path out_dir;
    std::map<FacilityKind, KindResults> kinds;
    std::map<std::string, double> imd_by_zone;
    std::vector<CorrelationRow> correlations;
    std::vector<std::pair<std::string, std::string>> exclusions;  // (scope:id, reason)
};

// End-to-end run: ingest, route, metrics, stats, quadrants, export. The
// output directory holds zone_metrics.csv, region_aggregates.csv,
// global_stats.csv, lisa.csv, correlations.csv, quadrants.csv,
// unreachable_report.csv, settlement_summary.csv, exclusions.csv,
// zones.geojson, and manifest.json (written last: a directory without it
// is an incomplete run). Byte-identical outputs for identical
// (inputs, config, seed), at any thread count.
PipelineResult run_pipeline(const RunConfig& cfg);

struct RunComparison {
    std::string kind;
    std::string run_a;
    std::string run_b;
    std::size_t n = 0;  // zones reachable in both runs
    double r = 0.0;     // Pearson correlation of the TTV vectors
};

// Pairwise TTV correlations across completed run directories.
std::vector<RunComparison> compare_runs(const std::vector<std::filesystem::path>& run_dirs);

}  // namespace ttv
