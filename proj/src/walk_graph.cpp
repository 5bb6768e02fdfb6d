#include "ttv/walk_graph.hpp"

#include <queue>

#include "ttv/csv.hpp"

namespace ttv {

WalkGraph WalkGraph::from_csv(const std::filesystem::path& nodes_csv,
                              const std::filesystem::path& edges_csv) {
    WalkGraph graph;
    {
        const auto t = csv::Table::read_file(nodes_csv);
        const std::size_t c_id = t.column("node_id");
        const std::size_t c_lat = t.column("lat");
        const std::size_t c_lon = t.column("lon");
        for (const auto& row : t.rows()) {
            Coordinate c{t.number(row, c_lat), t.number(row, c_lon)};
            require_valid_coordinate(c, t.name() + ":" + std::to_string(row.line));
            graph.add_node(t.text(row, c_id), c);
        }
    }
    {
        const auto t = csv::Table::read_file(edges_csv);
        const std::size_t c_from = t.column("from_node");
        const std::size_t c_to = t.column("to_node");
        const std::size_t c_len = t.column("length_m");
        for (const auto& row : t.rows()) {
            graph.add_edge(t.text(row, c_from), t.text(row, c_to), t.number(row, c_len));
        }
    }
    return graph;
}

void WalkGraph::add_node(const std::string& node_id, Coordinate location) {
    if (index_by_id_.count(node_id)) {
        throw input_error("duplicate walk node '" + node_id + "'");
    }
    index_by_id_.emplace(node_id, static_cast<WalkNodeIndex>(coordinates_.size()));
    coordinates_.push_back(location);
    node_ids_.push_back(node_id);
    adjacency_.emplace_back();
}

void WalkGraph::add_edge(const std::string& from_id, const std::string& to_id, double meters) {
    const WalkNodeIndex a = node_index(from_id);
    const WalkNodeIndex b = node_index(to_id);
    if (a == b) {
        throw input_error("walk edge self-loop at node '" + from_id + "'");
    }
    if (!(meters > 0.0)) {
        throw input_error("walk edge " + from_id + " -> " + to_id + " has non-positive length");
    }
    adjacency_[a].push_back({b, meters});
    adjacency_[b].push_back({a, meters});
}

WalkNodeIndex WalkGraph::node_index(const std::string& node_id) const {
    auto it = index_by_id_.find(node_id);
    if (it == index_by_id_.end()) {
        throw input_error("unknown walk node '" + node_id + "'");
    }
    return it->second;
}

WalkGraph::Attachment WalkGraph::attach(const Coordinate& point) const {
    if (coordinates_.empty()) {
        throw input_error("cannot attach point to an empty walk graph");
    }
    WalkNodeIndex best = 0;
    double best_meters = haversine_meters(point, coordinates_[0]);
    for (WalkNodeIndex i = 1; i < coordinates_.size(); ++i) {
        const double d = haversine_meters(point, coordinates_[i]);
        if (d < best_meters) {
            best = i;
            best_meters = d;
        }
    }
    return {best, best_meters};
}

std::vector<double> WalkGraph::distances_from(WalkNodeIndex source) const {
    std::vector<double> dist(coordinates_.size(), kUnreachableMeters);
    using Entry = std::pair<double, WalkNodeIndex>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    dist[source] = 0.0;
    queue.push({0.0, source});
    while (!queue.empty()) {
        const auto [d, u] = queue.top();
        queue.pop();
        if (d > dist[u]) continue;
        for (const Arc& arc : adjacency_[u]) {
            const double nd = d + arc.meters;
            if (nd < dist[arc.to]) {
                dist[arc.to] = nd;
                queue.push({nd, arc.to});
            }
        }
    }
    return dist;
}

double WalkGraph::shortest_meters(WalkNodeIndex from, WalkNodeIndex to) const {
    if (from == to) return 0.0;
    return distances_from(from)[to];
}

TravelTime WalkGraph::walk_time(WalkNodeIndex from, WalkNodeIndex to, double speed_kmh) const {
    const double meters = shortest_meters(from, to);
    if (meters == kUnreachableMeters) return std::nullopt;
    return walk_seconds(meters, speed_kmh);
}

}  // namespace ttv
