#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ttv/common.hpp"
#include "ttv/geo.hpp"
#include "ttv/gtfs.hpp"

namespace ttv {

using StopIndex = std::uint32_t;

struct PatternTrip {
    std::string trip_id;
    std::string route_id;
    std::string service_id;
    std::vector<ClockSec> arrivals;    // one per pattern stop
    std::vector<ClockSec> departures;  // one per pattern stop
    std::vector<std::int32_t> stop_sequences;  // original GTFS ordinals
};

// Trips sharing one ordered stop sequence, sorted by departure at the
// first stop and guaranteed not to overtake each other at any stop.
struct RoutePattern {
    std::vector<StopIndex> stops;
    std::vector<PatternTrip> trips;
};

struct TransferLink {
    StopIndex to;
    double meters;
};

// Immutable daily timetable: all feed stops, the trips active on the
// service date grouped into non-overtaking patterns, and straight-line
// stop-to-stop transfer links within the cap. Safe for concurrent reads.
class TransitNetwork {
public:
    static constexpr double kDefaultTransferCapMeters = 1000.0;

    // Restricts the feed to services active on `date`. Throws input_error
    // when no service is active.
    static TransitNetwork build(const gtfs::RawFeed& feed, const gtfs::ServiceDate& date,
                                double transfer_cap_meters = kDefaultTransferCapMeters);

    const std::vector<gtfs::Stop>& stops() const { return stops_; }
    const std::vector<RoutePattern>& patterns() const { return patterns_; }
    const gtfs::ServiceDate& service_date() const { return service_date_; }
    double transfer_cap_meters() const { return transfer_cap_meters_; }

    std::size_t trip_count() const;

    // (pattern, position) pairs for every pattern serving the stop.
    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& patterns_at(StopIndex stop) const {
        return stop_patterns_[stop];
    }
    const std::vector<TransferLink>& transfers_from(StopIndex stop) const {
        return transfers_[stop];
    }

    StopIndex stop_index(const std::string& stop_id) const;

    // Flattens the retained trips back to stop-time rows (round-trip with
    // the feed subset, order-normalized).
    std::vector<gtfs::StopTime> to_stop_time_rows() const;

private:
    std::vector<gtfs::Stop> stops_;
    std::unordered_map<std::string, StopIndex> stop_index_by_id_;
    std::vector<RoutePattern> patterns_;
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> stop_patterns_;
    std::vector<std::vector<TransferLink>> transfers_;
    gtfs::ServiceDate service_date_;
    double transfer_cap_meters_ = kDefaultTransferCapMeters;
};

}  // namespace ttv
