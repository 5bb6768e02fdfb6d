#pragma once

#include <cstdint>
#include <vector>

#include "ttv/common.hpp"
#include "ttv/transit_network.hpp"
#include "ttv/walk_graph.hpp"
#include "ttv/zones.hpp"

namespace ttv {

struct QueryConfig {
    ClockSec departure = 9 * 3600;
    std::int32_t window_s = 600;
    int percentile = 50;                    // nearest-rank over minute samples
    double max_duration_s = 7200.0;         // total elapsed cap
    int max_rides = 8;                      // boarding events
    double walk_speed_kmh = 3.6;
    double max_walk_duration_s = 7200.0;    // per walking leg

    // Throws std::invalid_argument on violated invariants.
    void validate() const;
};

struct TravelTimeResult {
    TravelTime seconds;              // elapsed; empty = unreachable
    int rides_used = 0;
    ClockSec provenance_minute = 0;  // departure minute achieving the percentile
};

// Precomputed walking meters from every stop to one destination point,
// through the walk graph (virtual attachment edges included). Infinite
// where the walk graph does not connect them.
struct Destination {
    Coordinate point;
    std::vector<double> egress_meters;  // indexed by StopIndex
};

// Timetable earliest-arrival search (round-based, one round per ride).
// A journey is an optional transfer walk from the origin stop, then
// board/ride/alight legs with transfer walks in between, then one egress
// walk from the last alighting stop to the destination; a pure
// origin-to-destination walk is also admitted. Walking legs are capped
// individually by max_walk_duration_s, the whole journey by
// max_duration_s and max_rides.
//
// Holds per-query scratch; use one Router per worker thread. The network
// and walk graph are shared read-only.
class Router {
public:
    Router(const TransitNetwork& network, const WalkGraph& walk_graph);

    Destination make_destination(const Coordinate& point) const;

    struct Arrival {
        TravelTime clock;  // seconds-since-midnight of arrival; empty = unreachable
        int rides = 0;
    };

    // Minimal arrival over journeys departing the origin stop at or after
    // depart_at. Never throws; unreachable comes back as an empty clock.
    Arrival earliest_arrival(StopIndex origin, const Destination& dest, ClockSec depart_at,
                             const QueryConfig& cfg);

    // Travel times for whole-minute departures m in
    // [cfg.departure, cfg.departure + cfg.window_s), reduced to the
    // nearest-rank percentile. Unreachable when the ranked sample is
    // unreachable or above the duration cap.
    TravelTimeResult travel_time_percentile(StopIndex origin, const Destination& dest,
                                            const QueryConfig& cfg);

    // Per analysis hour: the minimum percentile travel time across the
    // candidate destinations (unreachable only if every candidate is).
    std::vector<TravelTime> hourly_travel_times(StopIndex origin,
                                                const std::vector<const Destination*>& candidates,
                                                const std::vector<ClockSec>& hours,
                                                const QueryConfig& cfg);

private:
    void run_profile(StopIndex origin, ClockSec depart_at, const QueryConfig& cfg);
    Arrival evaluate_destination(const Destination& dest, StopIndex origin, ClockSec depart_at,
                                 const QueryConfig& cfg) const;
    // Percentile travel times for each destination at one departure hour.
    std::vector<TravelTimeResult> window_percentiles(StopIndex origin,
                                                     const std::vector<const Destination*>& dests,
                                                     const QueryConfig& cfg);

    const TransitNetwork& network_;
    const WalkGraph& walk_graph_;
    std::vector<WalkGraph::Attachment> stop_attachment_;

    // Scratch reused across queries.
    std::vector<double> board_prev_;
    std::vector<double> board_curr_;
    std::vector<double> ride_best_;
    std::vector<std::int32_t> ride_rounds_;
    std::vector<StopIndex> marked_;
    std::vector<StopIndex> ride_improved_;
    std::vector<std::uint8_t> is_marked_;
};

}  // namespace ttv
