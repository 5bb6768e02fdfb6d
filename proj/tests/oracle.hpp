#pragma once

#include <vector>

#include "ttv/gtfs.hpp"
#include "ttv/router.hpp"
#include "ttv/transit_network.hpp"
#include "ttv/walk_graph.hpp"

namespace ttv::testing {

// Reference earliest-arrival search over an explicit time-expanded event
// graph: one departure and one arrival node per stop-time row, wait edges
// chaining departures at a stop, ride and stay-aboard edges along each
// trip, transfer-walk edges from arrival nodes into other stops'
// departure chains, and egress edges from arrival nodes only. Solved by
// Dijkstra; journeys therefore alternate walks and rides exactly like
// the production router, but nothing of the round-based search is shared.
// The ride-count cap is not modelled; compare with a non-binding
// max_rides.
class TimeExpandedOracle {
public:
    TimeExpandedOracle(const TransitNetwork& network, const WalkGraph& walk_graph);

    TravelTime earliest_arrival(StopIndex origin, const Destination& dest, ClockSec depart_at,
                                const QueryConfig& cfg) const;

private:
    struct Event {
        std::uint32_t pattern;
        std::uint32_t trip;
        std::uint32_t pos;
        ClockSec time;
        StopIndex stop;
    };

    const TransitNetwork& network_;
    std::vector<Event> departures_;  // grouped by stop, sorted by time
    std::vector<Event> arrivals_;
    // departures_ index ranges per stop plus the per-trip event ids.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> stop_dep_range_;
    std::vector<std::vector<std::vector<std::uint32_t>>> dep_event_of_;  // [pattern][trip][pos]
    std::vector<std::vector<std::vector<std::uint32_t>>> arr_event_of_;
};

// Small random city for oracle-equivalence checks: stops in a ~10 km
// box, a grid-ish walk network, and random trips over random distinct
// stop sequences.
struct RandomInstance {
    gtfs::RawFeed feed;
    TransitNetwork network;
    WalkGraph walk;
};

RandomInstance make_random_instance(std::uint64_t seed, int max_stops = 50, int max_trips = 200);

}  // namespace ttv::testing
