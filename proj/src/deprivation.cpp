#include "ttv/deprivation.hpp"

#include <algorithm>
#include <numeric>

#include "ttv/csv.hpp"

namespace ttv {

BoundaryChange parse_boundary_change(const std::string& text) {
    if (text == "unchanged" || text == "U") return BoundaryChange::unchanged;
    if (text == "split" || text == "S") return BoundaryChange::split;
    if (text == "merged" || text == "M") return BoundaryChange::merged;
    if (text == "redrawn" || text == "X") return BoundaryChange::redrawn;
    throw input_error("unknown change_type '" + text + "'");
}

std::vector<DeprivationRecord> load_deprivation(const std::filesystem::path& path) {
    const auto t = csv::Table::read_file(path);
    const std::size_t c_id = t.column("zone_id_old");
    const std::size_t c_score = t.column("imd_score");
    std::vector<DeprivationRecord> records;
    records.reserve(t.rows().size());
    for (const auto& row : t.rows()) {
        DeprivationRecord r;
        r.zone_id_old = t.text(row, c_id);
        r.imd_score = t.number(row, c_score);
        if (r.imd_score < 0.0) {
            throw input_error(t.name() + ":" + std::to_string(row.line) +
                              ": imd_score must be non-negative");
        }
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<LookupRow> load_lookup(const std::filesystem::path& path) {
    const auto t = csv::Table::read_file(path);
    const std::size_t c_old = t.column("zone_id_old");
    const std::size_t c_new = t.column("zone_id_new");
    const std::size_t c_type = t.column("change_type");
    std::vector<LookupRow> rows;
    rows.reserve(t.rows().size());
    for (const auto& row : t.rows()) {
        rows.push_back({t.text(row, c_old), t.text(row, c_new),
                        parse_boundary_change(t.text(row, c_type))});
    }
    return rows;
}

DeprivationJoin join_deprivation(const std::vector<std::string>& zone_ids,
                                 const std::vector<DeprivationRecord>& deprivation,
                                 const std::vector<LookupRow>& lookup) {
    std::map<std::string, double> score_by_old;
    for (const auto& r : deprivation) score_by_old[r.zone_id_old] = r.imd_score;

    struct Parents {
        std::vector<std::string> old_ids;
        bool redrawn = false;
    };
    std::map<std::string, Parents> by_new;
    for (const auto& row : lookup) {
        auto& p = by_new[row.zone_id_new];
        p.old_ids.push_back(row.zone_id_old);
        if (row.change_type == BoundaryChange::redrawn) p.redrawn = true;
    }

    DeprivationJoin join;
    for (const auto& zone_id : zone_ids) {
        auto it = by_new.find(zone_id);
        if (it == by_new.end()) {
            join.excluded.emplace(zone_id, "missing from lookup");
            continue;
        }
        if (it->second.redrawn) {
            join.excluded.emplace(zone_id, "boundary redrawn");
            continue;
        }
        double sum = 0.0;
        bool missing = false;
        for (const auto& old_id : it->second.old_ids) {
            auto score = score_by_old.find(old_id);
            if (score == score_by_old.end()) {
                join.excluded.emplace(zone_id, "no deprivation record for parent '" + old_id + "'");
                missing = true;
                break;
            }
            sum += score->second;
        }
        if (missing) continue;
        join.score_by_zone.emplace(zone_id,
                                   sum / static_cast<double>(it->second.old_ids.size()));
    }
    return join;
}

std::string to_string(Quadrant q) {
    switch (q) {
        case Quadrant::high_ttv_more_deprived: return "HighTTV-MoreDeprived";
        case Quadrant::high_ttv_less_deprived: return "HighTTV-LessDeprived";
        case Quadrant::low_ttv_more_deprived: return "LowTTV-MoreDeprived";
        case Quadrant::low_ttv_less_deprived: return "LowTTV-LessDeprived";
    }
    return "LowTTV-LessDeprived";
}

namespace {

// Average-rank percentiles in (0, 1]: rank 1 is the smallest value, ties
// share the mean of their rank range.
std::vector<double> rank_percentiles(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return values[a] < values[b];
    });
    std::vector<double> pct(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t t = i; t <= j; ++t) {
            pct[order[t]] = avg_rank / static_cast<double>(n);
        }
        i = j + 1;
    }
    return pct;
}

}  // namespace

std::vector<QuadrantRecord> categorize_quadrants(const std::vector<std::string>& zone_ids,
                                                 const std::vector<double>& ttv,
                                                 const std::vector<double>& imd,
                                                 double threshold) {
    if (zone_ids.size() != ttv.size() || zone_ids.size() != imd.size()) {
        throw std::invalid_argument("categorize_quadrants: length mismatch");
    }
    if (!(threshold > 0.0) || !(threshold < 1.0)) {
        throw std::invalid_argument("quadrant threshold must lie in (0, 1)");
    }
    if (zone_ids.size() < 10) {
        throw std::invalid_argument("quadrant analysis needs at least 10 zones");
    }
    const std::vector<double> ttv_pct = rank_percentiles(ttv);
    const std::vector<double> imd_pct = rank_percentiles(imd);
    const double cut = 1.0 - threshold;

    std::vector<QuadrantRecord> records(zone_ids.size());
    for (std::size_t i = 0; i < zone_ids.size(); ++i) {
        QuadrantRecord& r = records[i];
        r.zone_id = zone_ids[i];
        r.ttv_rank_pct = ttv_pct[i];
        r.imd_rank_pct = imd_pct[i];
        const bool high_ttv = ttv_pct[i] >= cut;
        const bool more_deprived = imd_pct[i] >= cut;
        if (high_ttv && more_deprived) r.quadrant = Quadrant::high_ttv_more_deprived;
        else if (high_ttv) r.quadrant = Quadrant::high_ttv_less_deprived;
        else if (more_deprived) r.quadrant = Quadrant::low_ttv_more_deprived;
        else r.quadrant = Quadrant::low_ttv_less_deprived;
    }
    return records;
}

}  // namespace ttv
