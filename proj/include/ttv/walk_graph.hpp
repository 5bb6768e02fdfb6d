#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "ttv/common.hpp"
#include "ttv/geo.hpp"

namespace ttv {

using WalkNodeIndex = std::uint32_t;

inline constexpr double kUnreachableMeters = std::numeric_limits<double>::infinity();

// Seconds for a walking leg of `meters` at `speed_kmh`; infinity passes
// through.
inline double walk_seconds(double meters, double speed_kmh) {
    return meters / (speed_kmh / 3.6);
}

// Undirected weighted footpath graph. May be disconnected; unreachable
// pairs yield infinite distances.
class WalkGraph {
public:
    static WalkGraph from_csv(const std::filesystem::path& nodes_csv,
                              const std::filesystem::path& edges_csv);

    void add_node(const std::string& node_id, Coordinate location);
    // Throws input_error on unknown endpoints, self-loops, or
    // non-positive lengths.
    void add_edge(const std::string& from_id, const std::string& to_id, double meters);

    std::size_t node_count() const { return coordinates_.size(); }
    const Coordinate& coordinate(WalkNodeIndex node) const { return coordinates_[node]; }
    WalkNodeIndex node_index(const std::string& node_id) const;

    // Nearest node to an off-graph point plus the straight-line virtual
    // edge length used to attach it. Requires a non-empty graph.
    struct Attachment {
        WalkNodeIndex node;
        double meters;
    };
    Attachment attach(const Coordinate& point) const;

    // Shortest-path meters from `source` to every node (Dijkstra).
    std::vector<double> distances_from(WalkNodeIndex source) const;

    double shortest_meters(WalkNodeIndex from, WalkNodeIndex to) const;

    // Shortest walking time between nodes; empty when disconnected.
    TravelTime walk_time(WalkNodeIndex from, WalkNodeIndex to, double speed_kmh) const;

private:
    struct Arc {
        WalkNodeIndex to;
        double meters;
    };
    std::vector<Coordinate> coordinates_;
    std::vector<std::string> node_ids_;
    std::vector<std::vector<Arc>> adjacency_;
    std::unordered_map<std::string, WalkNodeIndex> index_by_id_;
};

}  // namespace ttv
