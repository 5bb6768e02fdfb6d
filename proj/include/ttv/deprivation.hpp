#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ttv/common.hpp"

namespace ttv {

struct DeprivationRecord {
    std::string zone_id_old;
    double imd_score = 0.0;  // >= 0
};

enum class BoundaryChange { unchanged, split, merged, redrawn };

BoundaryChange parse_boundary_change(const std::string& text);

struct LookupRow {
    std::string zone_id_old;
    std::string zone_id_new;
    BoundaryChange change_type = BoundaryChange::unchanged;
};

// deprivation.csv: zone_id_old, imd_score (one record per old zone).
std::vector<DeprivationRecord> load_deprivation(const std::filesystem::path& path);

// lookup.csv: zone_id_old, zone_id_new, change_type
// (unchanged|split|merged|redrawn, or the single letters U|S|M|X).
std::vector<LookupRow> load_lookup(const std::filesystem::path& path);

struct DeprivationJoin {
    std::map<std::string, double> score_by_zone;  // new zone id -> imd
    // zone id -> reason, for zones that cannot enter the quadrant
    // analysis (redrawn boundaries, missing lookup or deprivation rows).
    std::map<std::string, std::string> excluded;
};

// Carries old-boundary scores onto the new zones: unchanged and split
// zones inherit the parent score, merged zones take the unweighted mean
// of their parents (the exact-fit lookup carries no population weights),
// redrawn zones are excluded. Missing rows are reported, never fatal.
DeprivationJoin join_deprivation(const std::vector<std::string>& zone_ids,
                                 const std::vector<DeprivationRecord>& deprivation,
                                 const std::vector<LookupRow>& lookup);

enum class Quadrant {
    high_ttv_more_deprived,
    high_ttv_less_deprived,
    low_ttv_more_deprived,
    low_ttv_less_deprived,
};

std::string to_string(Quadrant q);

struct QuadrantRecord {
    std::string zone_id;
    double ttv_rank_pct = 0.0;  // average rank / n, in (0, 1]
    double imd_rank_pct = 0.0;
    Quadrant quadrant = Quadrant::low_ttv_less_deprived;
};

// Rank-percentiles both metrics (ties by average rank); "High"/"More
// Deprived" means rank percentile >= 1 - threshold. Requires at least 10
// zones; throws std::invalid_argument below that.
std::vector<QuadrantRecord> categorize_quadrants(const std::vector<std::string>& zone_ids,
                                                 const std::vector<double>& ttv,
                                                 const std::vector<double>& imd,
                                                 double threshold);

}  // namespace ttv
