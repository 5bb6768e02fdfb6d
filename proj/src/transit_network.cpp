#include "ttv/transit_network.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

namespace ttv {

namespace {

struct TripTimes {
    const gtfs::Trip* trip = nullptr;
    std::vector<const gtfs::StopTime*> rows;  // sorted by stop_sequence
};

// b may follow a in a pattern iff b never runs ahead of a at any stop.
bool follows(const TripTimes& a, const TripTimes& b) {
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        if (b.rows[i]->arrival < a.rows[i]->arrival) return false;
        if (b.rows[i]->departure < a.rows[i]->departure) return false;
    }
    return true;
}

}  // namespace

TransitNetwork TransitNetwork::build(const gtfs::RawFeed& feed, const gtfs::ServiceDate& date,
                                     double transfer_cap_meters) {
    TransitNetwork net;
    net.service_date_ = date;
    net.transfer_cap_meters_ = transfer_cap_meters;
    net.stops_ = feed.stops;
    net.stop_index_by_id_.reserve(net.stops_.size());
    for (StopIndex i = 0; i < net.stops_.size(); ++i) {
        net.stop_index_by_id_.emplace(net.stops_[i].stop_id, i);
    }

    const auto services = gtfs::active_services(feed, date);
    const std::unordered_set<std::string> active(services.begin(), services.end());

    std::unordered_map<std::string, const gtfs::Trip*> retained;
    for (const auto& trip : feed.trips) {
        if (active.count(trip.service_id)) retained.emplace(trip.trip_id, &trip);
    }
    if (retained.empty()) {
        throw input_error("no service active on " + date.to_string());
    }

    // stop_times arrive sorted by (trip_id, stop_sequence) from the parser.
    std::unordered_map<std::string, TripTimes> by_trip;
    by_trip.reserve(retained.size());
    for (const auto& st : feed.stop_times) {
        auto it = retained.find(st.trip_id);
        if (it == retained.end()) continue;
        auto& tt = by_trip[st.trip_id];
        tt.trip = it->second;
        tt.rows.push_back(&st);
    }

    // Group by ordered stop sequence; a std::map keys the grouping
    // deterministically.
    std::map<std::vector<StopIndex>, std::vector<const TripTimes*>> groups;
    for (const auto& [trip_id, tt] : by_trip) {
        std::vector<StopIndex> seq;
        seq.reserve(tt.rows.size());
        for (const auto* row : tt.rows) seq.push_back(net.stop_index_by_id_.at(row->stop_id));
        groups[std::move(seq)].push_back(&tt);
    }

    for (auto& [stop_seq, trips] : groups) {
        std::sort(trips.begin(), trips.end(), [](const TripTimes* a, const TripTimes* b) {
            if (a->rows.front()->departure != b->rows.front()->departure) {
                return a->rows.front()->departure < b->rows.front()->departure;
            }
            return a->trip->trip_id < b->trip->trip_id;
        });
        // Greedy split into non-overtaking patterns: each trip joins the
        // first pattern whose last trip it follows at every stop.
        std::vector<std::vector<const TripTimes*>> buckets;
        for (const TripTimes* tt : trips) {
            bool placed = false;
            for (auto& bucket : buckets) {
                if (follows(*bucket.back(), *tt)) {
                    bucket.push_back(tt);
                    placed = true;
                    break;
                }
            }
            if (!placed) buckets.push_back({tt});
        }
        for (const auto& bucket : buckets) {
            RoutePattern pattern;
            pattern.stops = stop_seq;
            pattern.trips.reserve(bucket.size());
            for (const TripTimes* tt : bucket) {
                PatternTrip pt;
                pt.trip_id = tt->trip->trip_id;
                pt.route_id = tt->trip->route_id;
                pt.service_id = tt->trip->service_id;
                pt.arrivals.reserve(tt->rows.size());
                for (const auto* row : tt->rows) {
                    pt.arrivals.push_back(row->arrival);
                    pt.departures.push_back(row->departure);
                    pt.stop_sequences.push_back(row->stop_sequence);
                }
                pattern.trips.push_back(std::move(pt));
            }
            net.patterns_.push_back(std::move(pattern));
        }
    }

    net.stop_patterns_.resize(net.stops_.size());
    for (std::uint32_t p = 0; p < net.patterns_.size(); ++p) {
        const auto& stops = net.patterns_[p].stops;
        for (std::uint32_t pos = 0; pos < stops.size(); ++pos) {
            net.stop_patterns_[stops[pos]].emplace_back(p, pos);
        }
    }

    // Straight-line transfer links; the cap keeps this quadratic pass and
    // the per-query relaxation tractable.
    net.transfers_.resize(net.stops_.size());
    for (StopIndex a = 0; a < net.stops_.size(); ++a) {
        for (StopIndex b = a + 1; b < net.stops_.size(); ++b) {
            const double d = haversine_meters(net.stops_[a].location, net.stops_[b].location);
            if (d <= transfer_cap_meters) {
                net.transfers_[a].push_back({b, d});
                net.transfers_[b].push_back({a, d});
            }
        }
    }

    return net;
}

std::size_t TransitNetwork::trip_count() const {
    std::size_t n = 0;
    for (const auto& p : patterns_) n += p.trips.size();
    return n;
}

StopIndex TransitNetwork::stop_index(const std::string& stop_id) const {
    auto it = stop_index_by_id_.find(stop_id);
    if (it == stop_index_by_id_.end()) {
        throw input_error("unknown stop_id '" + stop_id + "'");
    }
    return it->second;
}

std::vector<gtfs::StopTime> TransitNetwork::to_stop_time_rows() const {
    std::vector<gtfs::StopTime> rows;
    for (const auto& pattern : patterns_) {
        for (const auto& trip : pattern.trips) {
            for (std::size_t i = 0; i < pattern.stops.size(); ++i) {
                rows.push_back({trip.trip_id, trip.stop_sequences[i], trip.arrivals[i],
                                trip.departures[i], stops_[pattern.stops[i]].stop_id});
            }
        }
    }
    return rows;
}

}  // namespace ttv
