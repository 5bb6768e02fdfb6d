#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ttv/common.hpp"
#include "ttv/geo.hpp"
#include "ttv/transit_network.hpp"

namespace ttv {

// Ordered most-urban to most-rural; the paper's binary settlement split.
enum class Settlement { urban, rural };

std::string to_string(Settlement s);
Settlement parse_settlement(const std::string& text);

enum class FacilityKind { hospital, gp };

std::string to_string(FacilityKind k);
FacilityKind parse_facility_kind(const std::string& text);
inline constexpr FacilityKind kFacilityKinds[] = {FacilityKind::hospital, FacilityKind::gp};

struct Zone {
    std::string zone_id;
    Coordinate centroid;  // population-weighted
    std::string lad_code;
    Settlement settlement = Settlement::urban;
    std::optional<StopIndex> snapped_stop;
};

struct Facility {
    std::string facility_id;
    FacilityKind kind = FacilityKind::hospital;
    Coordinate location;
};

// zones.csv: zone_id, lat, lon, lad_code, settlement_class.
std::vector<Zone> load_zones(const std::filesystem::path& path);

// facilities.csv: facility_id, kind, lat, lon.
std::vector<Facility> load_facilities(const std::filesystem::path& path);

// Nearest stop by great-circle distance; ties broken by the
// lexicographically smallest stop_id. No distance cap: far snaps are
// resolved by routing reachability downstream.
StopIndex snap_to_stop(const Zone& zone, const TransitNetwork& network);

// The min(k, available) facilities of `kind` closest to the zone
// centroid, ascending by distance, ties by facility_id. Throws
// input_error when no facility of the kind exists.
std::vector<const Facility*> nearest_facilities(const Zone& zone,
                                                const std::vector<Facility>& facilities,
                                                FacilityKind kind, std::size_t k);

}  // namespace ttv
