#include "ttv/synth.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "ttv/csv.hpp"
#include "ttv/geo.hpp"
#include "ttv/rng.hpp"

namespace ttv {

namespace {

constexpr double kBaseLat = 52.5;
constexpr double kBaseLon = -1.9;
constexpr double kLatStep = 0.012;  // ~1.33 km
constexpr double kLonStep = 0.020;  // ~1.35 km at 52.5 N
constexpr ClockSec kFirstTrip = 6 * 3600;
constexpr ClockSec kLastTrip = 22 * 3600;
constexpr ClockSec kInterStopRun = 120;

std::string pad2(int v) { return (v < 10 ? "0" : "") + std::to_string(v); }

std::string zone_id(int x, int y) { return "Z" + pad2(x) + pad2(y); }

std::string clock_text(ClockSec t) {
    return pad2(t / 3600) + ":" + pad2((t % 3600) / 60) + ":" + pad2(t % 60);
}

struct GtfsWriter {
    std::ofstream trips;
    std::ofstream stop_times;

    void add_trip(const std::string& route_id, const std::string& trip_id,
                  const std::vector<std::string>& stop_ids, ClockSec start) {
        trips << trip_id << "," << route_id << ",WK\n";
        ClockSec t = start;
        for (std::size_t i = 0; i < stop_ids.size(); ++i) {
            stop_times << trip_id << "," << i + 1 << "," << clock_text(t) << "," << clock_text(t)
                       << "," << stop_ids[i] << "\n";
            t += kInterStopRun;
        }
    }
};

}  // namespace

void generate_synthetic_city(const SynthSpec& spec, const std::filesystem::path& out_dir) {
    if (spec.downtown_headway_s <= 0 || spec.rural_headway_s <= 0) {
        throw std::invalid_argument("headways must be positive");
    }
    if (spec.grid_x * spec.grid_y < 11) {
        throw std::invalid_argument(
            "grid too small: need at least 11 zones for the default k-NN weights (k=10)");
    }

    const auto gtfs_dir = out_dir / "gtfs";
    std::filesystem::create_directories(gtfs_dir);

    const int gx = spec.grid_x;
    const int gy = spec.grid_y;
    const double cx = (gx - 1) / 2.0;
    const double cy = (gy - 1) / 2.0;
    const double downtown_radius = std::max(1.0, std::min(gx, gy) / 4.0);
    auto is_downtown = [&](int x, int y) {
        return std::abs(x - cx) <= downtown_radius && std::abs(y - cy) <= downtown_radius;
    };
    auto cell_lat = [&](int y) { return kBaseLat + y * kLatStep; };
    auto cell_lon = [&](int x) { return kBaseLon + x * kLonStep; };

    Rng jitter_rng(substream_seed(spec.seed, 1));

    // Zones, deprivation, and the identity boundary lookup.
    {
        csv::Writer zones(out_dir / "zones.csv");
        zones.write_row({"zone_id", "lat", "lon", "lad_code", "settlement_class"});
        csv::Writer deprivation(out_dir / "deprivation.csv");
        deprivation.write_row({"zone_id_old", "imd_score"});
        csv::Writer lookup(out_dir / "lookup.csv");
        lookup.write_row({"zone_id_old", "zone_id_new", "change_type"});
        for (int y = 0; y < gy; ++y) {
            for (int x = 0; x < gx; ++x) {
                const double lat = cell_lat(y) + (jitter_rng.uniform() - 0.5) * 0.002;
                const double lon = cell_lon(x) + (jitter_rng.uniform() - 0.5) * 0.002;
                const std::string id = zone_id(x, y);
                const std::string lad = "LAD" + pad2(x / 3) + pad2(y / 3);
                const bool downtown = is_downtown(x, y);
                zones.write_row({id, csv::format_double(lat), csv::format_double(lon), lad,
                                 downtown ? "urban" : "rural"});
                // Inner-city deprivation bias, as in most UK cities.
                const double imd = jitter_rng.uniform() * 60.0 + (downtown ? 30.0 : 0.0);
                deprivation.write_row({id, csv::format_double(imd)});
                lookup.write_row({id, id, "unchanged"});
            }
        }
        zones.close();
        deprivation.close();
        lookup.close();
    }

    // One stop per cell, offset slightly from the centroid.
    {
        csv::Writer stops(gtfs_dir / "stops.txt");
        stops.write_row({"stop_id", "stop_name", "stop_lat", "stop_lon"});
        for (int y = 0; y < gy; ++y) {
            for (int x = 0; x < gx; ++x) {
                stops.write_row({"S" + pad2(x) + pad2(y), "Stop " + pad2(x) + pad2(y),
                                 csv::format_double(cell_lat(y) + 0.0006),
                                 csv::format_double(cell_lon(x) + 0.0006)});
            }
        }
        stops.close();
    }

    // Two service layers. A short-turn downtown mesh runs every band row
    // and band column at the downtown headway, confined to the band.
    // Radial lines feed every cell into the hub cell at the rural
    // headway with a seeded per-trip offset; the offset is kept past the
    // departure window so every sampled minute catches the hour's bus
    // and waiting varies smoothly hour to hour.
    const int hub_x = static_cast<int>(cx);
    const int hub_y = static_cast<int>(cy);
    {
        std::ofstream routes(gtfs_dir / "routes.txt");
        routes << "route_id,route_type\n";
        GtfsWriter writer;
        writer.trips.open(gtfs_dir / "trips.txt");
        writer.trips << "trip_id,route_id,service_id\n";
        writer.stop_times.open(gtfs_dir / "stop_times.txt");
        writer.stop_times << "trip_id,stop_sequence,arrival_time,departure_time,stop_id\n";

        auto stop_at = [](int x, int y) { return "S" + pad2(x) + pad2(y); };

        auto emit_line = [&](const std::string& route_id, const std::vector<std::string>& stops,
                             ClockSec headway, bool jittered, std::uint64_t stream) {
            if (stops.size() < 2) return;
            routes << route_id << ",3\n";
            Rng rng(substream_seed(spec.seed, 2, stream));
            const ClockSec offset_floor = jittered ? std::min<ClockSec>(600, headway / 3) : 0;
            const std::uint64_t offset_span =
                jittered ? std::max<std::uint64_t>(1, std::min<std::uint64_t>(900, headway / 2))
                         : 1;
            std::vector<std::string> reversed(stops.rbegin(), stops.rend());
            int k = 0;
            for (ClockSec base = kFirstTrip; base <= kLastTrip; base += headway, ++k) {
                const ClockSec out = offset_floor + static_cast<ClockSec>(rng.below(offset_span));
                writer.add_trip(route_id, route_id + "_A_" + std::to_string(k), stops, base + out);
                const ClockSec back = offset_floor + static_cast<ClockSec>(rng.below(offset_span));
                writer.add_trip(route_id, route_id + "_B_" + std::to_string(k), reversed,
                                base + back);
            }
        };

        const int band_x_lo = static_cast<int>(std::ceil(cx - downtown_radius));
        const int band_x_hi = static_cast<int>(std::floor(cx + downtown_radius));
        const int band_y_lo = static_cast<int>(std::ceil(cy - downtown_radius));
        const int band_y_hi = static_cast<int>(std::floor(cy + downtown_radius));

        for (int y = band_y_lo; y <= band_y_hi; ++y) {
            std::vector<std::string> line;
            for (int x = band_x_lo; x <= band_x_hi; ++x) line.push_back(stop_at(x, y));
            emit_line("MESHROW" + pad2(y), line, spec.downtown_headway_s, false,
                      static_cast<std::uint64_t>(y));
        }
        for (int x = band_x_lo; x <= band_x_hi; ++x) {
            std::vector<std::string> line;
            for (int y = band_y_lo; y <= band_y_hi; ++y) line.push_back(stop_at(x, y));
            emit_line("MESHCOL" + pad2(x), line, spec.downtown_headway_s, false,
                      static_cast<std::uint64_t>(100 + x));
        }

        // One-seat radials: along the row-half to the hub column, then
        // along it to the hub.
        auto radial = [&](int y, int x_from) {
            std::vector<std::string> line;
            const int step_x = x_from <= hub_x ? 1 : -1;
            for (int x = x_from; x != hub_x + step_x; x += step_x) line.push_back(stop_at(x, y));
            const int step_y = y <= hub_y ? 1 : -1;
            for (int yy = y + step_y; yy != hub_y + step_y && y != hub_y; yy += step_y) {
                line.push_back(stop_at(hub_x, yy));
            }
            return line;
        };
        for (int y = 0; y < gy; ++y) {
            emit_line("RAD" + pad2(y) + "W", radial(y, 0), spec.rural_headway_s, true,
                      static_cast<std::uint64_t>(200 + y));
            if (gx - 1 > hub_x) {
                emit_line("RAD" + pad2(y) + "E", radial(y, gx - 1), spec.rural_headway_s, true,
                          static_cast<std::uint64_t>(300 + y));
            }
        }
        routes.close();
        writer.trips.close();
        writer.stop_times.close();
    }

    {
        std::ofstream calendar(gtfs_dir / "calendar.txt");
        calendar << "service_id,monday,tuesday,wednesday,thursday,friday,saturday,sunday,"
                    "start_date,end_date\n";
        calendar << "WK,1,1,1,1,1,1,1,20240101,20261231\n";
    }

    // Walk grid: a node per cell, 4-neighbour edges.
    {
        csv::Writer nodes(out_dir / "walk_nodes.csv");
        nodes.write_row({"node_id", "lat", "lon"});
        for (int y = 0; y < gy; ++y) {
            for (int x = 0; x < gx; ++x) {
                nodes.write_row({"N" + pad2(x) + pad2(y), csv::format_double(cell_lat(y)),
                                 csv::format_double(cell_lon(x))});
            }
        }
        nodes.close();
        csv::Writer edges(out_dir / "walk_edges.csv");
        edges.write_row({"from_node", "to_node", "length_m"});
        for (int y = 0; y < gy; ++y) {
            for (int x = 0; x < gx; ++x) {
                const Coordinate here{cell_lat(y), cell_lon(x)};
                if (x + 1 < gx) {
                    const Coordinate there{cell_lat(y), cell_lon(x + 1)};
                    edges.write_row({"N" + pad2(x) + pad2(y), "N" + pad2(x + 1) + pad2(y),
                                     csv::format_double(haversine_meters(here, there))});
                }
                if (y + 1 < gy) {
                    const Coordinate there{cell_lat(y + 1), cell_lon(x)};
                    edges.write_row({"N" + pad2(x) + pad2(y), "N" + pad2(x) + pad2(y + 1),
                                     csv::format_double(haversine_meters(here, there))});
                }
            }
        }
        edges.close();
    }

    // One hospital at the hub; GPs scattered over distinct downtown
    // cells, one of them central.
    {
        csv::Writer facilities(out_dir / "facilities.csv");
        facilities.write_row({"facility_id", "kind", "lat", "lon"});
        facilities.write_row({"HOSP1", "hospital", csv::format_double(cell_lat(hub_y) + 0.0003),
                              csv::format_double(cell_lon(hub_x) + 0.0003)});
        facilities.write_row({"GP1", "GP", csv::format_double(cell_lat(hub_y) - 0.0003),
                              csv::format_double(cell_lon(hub_x) - 0.0003)});
        Rng rng(substream_seed(spec.seed, 3));
        std::vector<std::pair<int, int>> band_cells;
        for (int y = 0; y < gy; ++y) {
            for (int x = 0; x < gx; ++x) {
                if (is_downtown(x, y) && !(x == hub_x && y == hub_y)) band_cells.emplace_back(x, y);
            }
        }
        const int n_gps = std::min({8, gx * gy / 8 + 1, static_cast<int>(band_cells.size()) + 1});
        for (int g = 2; g <= n_gps; ++g) {
            const std::size_t pick = rng.below(band_cells.size());
            const auto [x, y] = band_cells[pick];
            band_cells.erase(band_cells.begin() + static_cast<std::ptrdiff_t>(pick));
            facilities.write_row({"GP" + std::to_string(g), "GP",
                                  csv::format_double(cell_lat(y) + 0.0004),
                                  csv::format_double(cell_lon(x) - 0.0004)});
        }
        facilities.close();
    }

    {
        std::ofstream config(out_dir / "run.toml");
        config << "gtfs_dir = \"gtfs\"\n"
               << "zones = \"zones.csv\"\n"
               << "facilities = \"facilities.csv\"\n"
               << "walk_nodes = \"walk_nodes.csv\"\n"
               << "walk_edges = \"walk_edges.csv\"\n"
               << "deprivation = \"deprivation.csv\"\n"
               << "lookup = \"lookup.csv\"\n"
               << "service_date = \"2024-05-30\"\n"
               << "hours = \"09:00-17:00\"\n"
               << "seed = " << spec.seed << "\n";
    }
}

}  // namespace ttv
