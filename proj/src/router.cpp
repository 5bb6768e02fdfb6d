#include "ttv/router.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ttv {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void QueryConfig::validate() const {
    if (window_s < 60) throw std::invalid_argument("window must be at least 60 s");
    if (percentile < 1 || percentile > 100) {
        throw std::invalid_argument("percentile must be in [1, 100]");
    }
    if (!(max_duration_s > 0.0)) throw std::invalid_argument("max_duration must be positive");
    if (max_rides <= 0) throw std::invalid_argument("max_rides must be positive");
    if (!(walk_speed_kmh > 0.0)) throw std::invalid_argument("walk_speed must be positive");
    if (!(max_walk_duration_s > 0.0)) {
        throw std::invalid_argument("max_walk_duration must be positive");
    }
    if (departure < 0) throw std::invalid_argument("departure must be non-negative");
}

Router::Router(const TransitNetwork& network, const WalkGraph& walk_graph)
    : network_(network), walk_graph_(walk_graph) {
    const std::size_t n = network_.stops().size();
    stop_attachment_.reserve(n);
    for (const auto& stop : network_.stops()) {
        stop_attachment_.push_back(walk_graph_.attach(stop.location));
    }
    board_prev_.assign(n, kInf);
    board_curr_.assign(n, kInf);
    ride_best_.assign(n, kInf);
    ride_rounds_.assign(n, 0);
    is_marked_.assign(n, 0);
}

Destination Router::make_destination(const Coordinate& point) const {
    Destination dest;
    dest.point = point;
    const auto attachment = walk_graph_.attach(point);
    const auto node_meters = walk_graph_.distances_from(attachment.node);
    dest.egress_meters.resize(network_.stops().size());
    for (StopIndex s = 0; s < stop_attachment_.size(); ++s) {
        const double through_graph = node_meters[stop_attachment_[s].node];
        dest.egress_meters[s] =
            through_graph == kUnreachableMeters
                ? kUnreachableMeters
                : stop_attachment_[s].meters + through_graph + attachment.meters;
    }
    return dest;
}

void Router::run_profile(StopIndex origin, ClockSec depart_at, const QueryConfig& cfg) {
    std::fill(board_prev_.begin(), board_prev_.end(), kInf);
    std::fill(board_curr_.begin(), board_curr_.end(), kInf);
    std::fill(ride_best_.begin(), ride_best_.end(), kInf);
    std::fill(is_marked_.begin(), is_marked_.end(), 0);
    marked_.clear();

    const double horizon = static_cast<double>(depart_at) + cfg.max_duration_s;
    auto mark = [&](StopIndex s) {
        if (!is_marked_[s]) {
            is_marked_[s] = 1;
            marked_.push_back(s);
        }
    };

    board_curr_[origin] = depart_at;
    mark(origin);
    for (const auto& link : network_.transfers_from(origin)) {
        const double walk = walk_seconds(link.meters, cfg.walk_speed_kmh);
        if (walk > cfg.max_walk_duration_s) continue;
        const double t = depart_at + walk;
        if (t > horizon) continue;
        if (t < board_curr_[link.to]) {
            board_curr_[link.to] = t;
            mark(link.to);
        }
    }

    for (int round = 1; round <= cfg.max_rides && !marked_.empty(); ++round) {
        board_prev_ = board_curr_;
        std::vector<StopIndex> frontier;
        frontier.swap(marked_);
        for (StopIndex s : frontier) is_marked_[s] = 0;

        // Collect patterns touched by the frontier with the earliest
        // touched position each.
        std::vector<std::pair<std::uint32_t, std::uint32_t>> todo;
        for (StopIndex s : frontier) {
            for (const auto& [pattern, pos] : network_.patterns_at(s)) {
                todo.emplace_back(pattern, pos);
            }
        }
        std::sort(todo.begin(), todo.end());
        todo.erase(std::unique(todo.begin(), todo.end()), todo.end());

        ride_improved_.clear();
        std::size_t i = 0;
        while (i < todo.size()) {
            const std::uint32_t pattern_idx = todo[i].first;
            const std::uint32_t first_pos = todo[i].second;
            while (i < todo.size() && todo[i].first == pattern_idx) ++i;

            const RoutePattern& pattern = network_.patterns()[pattern_idx];
            const auto& trips = pattern.trips;
            std::size_t trip = trips.size();  // none boarded
            for (std::uint32_t pos = first_pos; pos < pattern.stops.size(); ++pos) {
                const StopIndex stop = pattern.stops[pos];
                if (trip < trips.size()) {
                    // No pruning against board labels here: egress is only
                    // admitted after alighting, so a ride arrival matters
                    // even when a walk reached the stop earlier.
                    const double arrival = trips[trip].arrivals[pos];
                    if (arrival <= horizon && arrival < ride_best_[stop]) {
                        ride_best_[stop] = arrival;
                        ride_rounds_[stop] = round;
                        ride_improved_.push_back(stop);
                    }
                }
                // Board the earliest trip departing at or after the label
                // carried into this round; non-overtaking patterns keep
                // departures at a fixed position sorted across trips.
                const double label = board_prev_[stop];
                if (label <= horizon && label < kInf) {
                    std::size_t lo = 0;
                    std::size_t hi = trip < trips.size() ? trip : trips.size();
                    while (lo < hi) {
                        const std::size_t mid = (lo + hi) / 2;
                        if (trips[mid].departures[pos] >= label) {
                            hi = mid;
                        } else {
                            lo = mid + 1;
                        }
                    }
                    if (lo < trips.size() && trips[lo].departures[pos] >= label &&
                        (trip == trips.size() || lo < trip)) {
                        trip = lo;
                    }
                }
            }
        }

        // Alighting makes a stop board-capable; transfer walks extend that
        // to nearby stops. Walking twice in a row is not admitted, so only
        // ride-improved stops relax their links.
        std::sort(ride_improved_.begin(), ride_improved_.end());
        ride_improved_.erase(std::unique(ride_improved_.begin(), ride_improved_.end()),
                             ride_improved_.end());
        for (StopIndex s : ride_improved_) {
            if (ride_best_[s] < board_curr_[s]) {
                board_curr_[s] = ride_best_[s];
                mark(s);
            }
            for (const auto& link : network_.transfers_from(s)) {
                const double walk = walk_seconds(link.meters, cfg.walk_speed_kmh);
                if (walk > cfg.max_walk_duration_s) continue;
                const double t = ride_best_[s] + walk;
                if (t > horizon) continue;
                if (t < board_curr_[link.to]) {
                    board_curr_[link.to] = t;
                    mark(link.to);
                }
            }
        }
    }
}

Router::Arrival Router::evaluate_destination(const Destination& dest, StopIndex origin,
                                             ClockSec depart_at, const QueryConfig& cfg) const {
    const double horizon = static_cast<double>(depart_at) + cfg.max_duration_s;
    double best = kInf;
    int rides = 0;

    const double direct_walk = walk_seconds(dest.egress_meters[origin], cfg.walk_speed_kmh);
    if (direct_walk <= cfg.max_walk_duration_s) {
        const double t = depart_at + direct_walk;
        if (t <= horizon) {
            best = t;
            rides = 0;
        }
    }

    for (StopIndex s = 0; s < ride_best_.size(); ++s) {
        if (ride_best_[s] == kInf) continue;
        const double egress = walk_seconds(dest.egress_meters[s], cfg.walk_speed_kmh);
        if (egress > cfg.max_walk_duration_s) continue;
        const double t = ride_best_[s] + egress;
        if (t <= horizon && t < best) {
            best = t;
            rides = ride_rounds_[s];
        }
    }

    if (best == kInf) return {std::nullopt, 0};
    return {best, rides};
}

Router::Arrival Router::earliest_arrival(StopIndex origin, const Destination& dest,
                                         ClockSec depart_at, const QueryConfig& cfg) {
    cfg.validate();
    run_profile(origin, depart_at, cfg);
    return evaluate_destination(dest, origin, depart_at, cfg);
}

std::vector<TravelTimeResult> Router::window_percentiles(
    StopIndex origin, const std::vector<const Destination*>& dests, const QueryConfig& cfg) {
    const int n_samples = (cfg.window_s + 59) / 60;  // whole minutes in [departure, departure+window)
    struct Sample {
        double elapsed;
        ClockSec minute;
        int rides;
    };
    std::vector<std::vector<Sample>> samples(dests.size());

    for (int j = 0; j < n_samples; ++j) {
        const ClockSec minute = cfg.departure + j * 60;
        run_profile(origin, minute, cfg);
        for (std::size_t d = 0; d < dests.size(); ++d) {
            const Arrival arrival = evaluate_destination(*dests[d], origin, minute, cfg);
            const double elapsed = arrival.clock ? *arrival.clock - minute : kInf;
            samples[d].push_back({elapsed, minute, arrival.clock ? arrival.rides : 0});
        }
    }

    std::vector<TravelTimeResult> results(dests.size());
    for (std::size_t d = 0; d < dests.size(); ++d) {
        auto& window = samples[d];
        std::stable_sort(window.begin(), window.end(), [](const Sample& a, const Sample& b) {
            return a.elapsed < b.elapsed;
        });
        const int rank = (cfg.percentile * n_samples + 99) / 100;  // ceil, 1-based
        const Sample& chosen = window[rank - 1];
        TravelTimeResult& r = results[d];
        r.provenance_minute = chosen.minute;
        r.rides_used = chosen.rides;
        if (std::isinf(chosen.elapsed) || chosen.elapsed > cfg.max_duration_s) {
            r.seconds = std::nullopt;
        } else {
            r.seconds = chosen.elapsed;
        }
    }
    return results;
}

TravelTimeResult Router::travel_time_percentile(StopIndex origin, const Destination& dest,
                                                const QueryConfig& cfg) {
    cfg.validate();
    return window_percentiles(origin, {&dest}, cfg).front();
}

std::vector<TravelTime> Router::hourly_travel_times(StopIndex origin,
                                                    const std::vector<const Destination*>& candidates,
                                                    const std::vector<ClockSec>& hours,
                                                    const QueryConfig& cfg) {
    cfg.validate();
    if (candidates.empty()) {
        throw std::invalid_argument("hourly_travel_times requires at least one candidate");
    }

    std::vector<TravelTime> result;
    result.reserve(hours.size());
    for (const ClockSec hour : hours) {
        QueryConfig hour_cfg = cfg;
        hour_cfg.departure = hour;
        const auto per_dest = window_percentiles(origin, candidates, hour_cfg);
        TravelTime best;
        for (const auto& r : per_dest) {
            if (!r.seconds) continue;
            if (!best || *r.seconds < *best) best = r.seconds;
        }
        result.push_back(best);
    }
    return result;
}

}  // namespace ttv
