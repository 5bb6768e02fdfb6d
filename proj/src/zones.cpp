#include "ttv/zones.hpp"

#include <algorithm>
#include <unordered_set>

#include "ttv/csv.hpp"

namespace ttv {

std::string to_string(Settlement s) { return s == Settlement::urban ? "urban" : "rural"; }

Settlement parse_settlement(const std::string& text) {
    if (text == "urban") return Settlement::urban;
    if (text == "rural") return Settlement::rural;
    throw input_error("unknown settlement_class '" + text + "' (expected urban or rural)");
}

std::string to_string(FacilityKind k) { return k == FacilityKind::hospital ? "hospital" : "GP"; }

FacilityKind parse_facility_kind(const std::string& text) {
    std::string lower;
    lower.reserve(text.size());
    for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "hospital") return FacilityKind::hospital;
    if (lower == "gp") return FacilityKind::gp;
    throw input_error("unknown facility kind '" + text + "' (expected hospital or GP)");
}

std::vector<Zone> load_zones(const std::filesystem::path& path) {
    const auto t = csv::Table::read_file(path);
    const std::size_t c_id = t.column("zone_id");
    const std::size_t c_lat = t.column("lat");
    const std::size_t c_lon = t.column("lon");
    const std::size_t c_lad = t.column("lad_code");
    const std::size_t c_class = t.column("settlement_class");
    std::vector<Zone> zones;
    zones.reserve(t.rows().size());
    std::unordered_set<std::string> seen;
    for (const auto& row : t.rows()) {
        Zone z;
        z.zone_id = t.text(row, c_id);
        if (!seen.insert(z.zone_id).second) {
            throw input_error(t.name() + ":" + std::to_string(row.line) + ": duplicate zone_id '" +
                              z.zone_id + "'");
        }
        z.centroid = {t.number(row, c_lat), t.number(row, c_lon)};
        require_valid_coordinate(z.centroid, t.name() + ":" + std::to_string(row.line));
        z.lad_code = t.text(row, c_lad);
        z.settlement = parse_settlement(t.text(row, c_class));
        zones.push_back(std::move(z));
    }
    return zones;
}

std::vector<Facility> load_facilities(const std::filesystem::path& path) {
    const auto t = csv::Table::read_file(path);
    const std::size_t c_id = t.column("facility_id");
    const std::size_t c_kind = t.column("kind");
    const std::size_t c_lat = t.column("lat");
    const std::size_t c_lon = t.column("lon");
    std::vector<Facility> facilities;
    facilities.reserve(t.rows().size());
    for (const auto& row : t.rows()) {
        Facility f;
        f.facility_id = t.text(row, c_id);
        f.kind = parse_facility_kind(t.text(row, c_kind));
        f.location = {t.number(row, c_lat), t.number(row, c_lon)};
        require_valid_coordinate(f.location, t.name() + ":" + std::to_string(row.line));
        facilities.push_back(std::move(f));
    }
    return facilities;
}

StopIndex snap_to_stop(const Zone& zone, const TransitNetwork& network) {
    const auto& stops = network.stops();
    if (stops.empty()) {
        throw input_error("cannot snap zone '" + zone.zone_id + "': network has no stops");
    }
    StopIndex best = 0;
    double best_d = haversine_meters(zone.centroid, stops[0].location);
    for (StopIndex i = 1; i < stops.size(); ++i) {
        const double d = haversine_meters(zone.centroid, stops[i].location);
        if (d < best_d || (d == best_d && stops[i].stop_id < stops[best].stop_id)) {
            best = i;
            best_d = d;
        }
    }
    return best;
}

std::vector<const Facility*> nearest_facilities(const Zone& zone,
                                                const std::vector<Facility>& facilities,
                                                FacilityKind kind, std::size_t k) {
    std::vector<std::pair<double, const Facility*>> candidates;
    for (const auto& f : facilities) {
        if (f.kind != kind) continue;
        candidates.emplace_back(haversine_meters(zone.centroid, f.location), &f);
    }
    if (candidates.empty()) {
        throw input_error("no facility of kind '" + to_string(kind) + "' available");
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const auto& a, const auto& b) {
                  if (a.first != b.first) return a.first < b.first;
                  return a.second->facility_id < b.second->facility_id;
              });
    if (candidates.size() > k) candidates.resize(k);
    std::vector<const Facility*> result;
    result.reserve(candidates.size());
    for (const auto& [d, f] : candidates) result.push_back(f);
    return result;
}

}  // namespace ttv
