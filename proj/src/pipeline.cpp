#include "ttv/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ttv/csv.hpp"
#include "ttv/rng.hpp"
#include "ttv/walk_graph.hpp"

namespace ttv {

namespace {

using ordered_json = nlohmann::ordered_json;

template <typename F>
auto run_stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const input_error& e) {
        throw input_error(std::string("stage ") + name + ": " + e.what());
    } catch (const std::exception& e) {
        throw stage_error(name, e.what());
    }
}

ClockSec parse_hhmm(const std::string& text) {
    unsigned h = 0, m = 0;
    char colon = 0;
    std::istringstream in(text);
    if (!(in >> h >> colon >> m) || colon != ':' || m > 59) {
        throw input_error("malformed time of day '" + text + "': expected HH:MM");
    }
    return static_cast<ClockSec>(h * 3600 + m * 60);
}

std::vector<ClockSec> parse_hours(const std::string& text) {
    std::vector<ClockSec> hours;
    const auto dash = text.find('-');
    if (dash != std::string::npos && text.find(',') == std::string::npos) {
        const ClockSec from = parse_hhmm(text.substr(0, dash));
        const ClockSec to = parse_hhmm(text.substr(dash + 1));
        for (ClockSec t = from; t <= to; t += 3600) hours.push_back(t);
    } else {
        std::istringstream in(text);
        std::string item;
        while (std::getline(in, item, ',')) hours.push_back(parse_hhmm(item));
    }
    return hours;
}

std::string hour_label(ClockSec t) {
    char buf[16];
    if (t % 3600 == 0) {
        std::snprintf(buf, sizeof(buf), "h%02d", t / 3600);
    } else {
        std::snprintf(buf, sizeof(buf), "h%02d%02d", t / 3600, (t % 3600) / 60);
    }
    return buf;
}

std::string hhmm_text(ClockSec t) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%02d:%02d", t / 3600, (t % 3600) / 60);
    return buf;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot read " + path.string());
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buffer[1 << 14];
    while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buffer[i]);
            hash *= 0x100000001b3ULL;
        }
        if (got < static_cast<std::streamsize>(sizeof(buffer))) break;
    }
    return hash;
}

std::uint64_t fnv1a64_dir(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const auto& file : files) {
        const std::uint64_t h = fnv1a64_file(file);
        hash = splitmix64(hash ^ h ^ splitmix64(std::hash<std::string>{}(file.filename().string())));
    }
    return hash;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

std::string opt_text(const std::optional<double>& v) {
    return v ? csv::format_double(*v) : std::string();
}

}  // namespace

void RunConfig::validate() const {
    if (gtfs_dir.empty() || zones.empty() || facilities.empty() || walk_nodes.empty() ||
        walk_edges.empty()) {
        throw input_error(
            "config must set gtfs_dir, zones, facilities, walk_nodes, and walk_edges");
    }
    if (deprivation.empty() != lookup.empty()) {
        throw input_error("deprivation and lookup must be configured together");
    }
    if (hours.empty()) throw input_error("hours must be non-empty");
    for (std::size_t i = 1; i < hours.size(); ++i) {
        if (hours[i] <= hours[i - 1]) throw input_error("hours must be strictly increasing");
    }
    if (k_facilities < 1) throw input_error("k_facilities must be at least 1");
    if (!(quantile_threshold > 0.0) || !(quantile_threshold < 1.0)) {
        throw input_error("quantile_threshold must lie in (0, 1)");
    }
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw input_error("alpha must lie in (0, 1)");
    if (knn_k < 1) throw input_error("knn_k must be at least 1");
    if (n_perm < 99) throw input_error("n_perm must be at least 99");
    if (!(transfer_cap_m > 0.0)) throw input_error("transfer_cap_m must be positive");
    if (threads < 1) throw input_error("threads must be at least 1");
    try {
        query.validate();
    } catch (const std::exception& e) {
        throw input_error(std::string("query config: ") + e.what());
    }
}

RunConfig default_run_config() {
    RunConfig cfg;
    for (ClockSec h = 9 * 3600; h <= 17 * 3600; h += 3600) cfg.hours.push_back(h);
    return cfg;
}

RunConfig parse_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open config file: " + path.string());
    RunConfig cfg = default_run_config();
    const auto base = path.parent_path();
    auto resolve = [&](const std::string& value) {
        std::filesystem::path p(value);
        return p.is_absolute() ? p : base / p;
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto where = path.filename().string() + ":" + std::to_string(line_no);
        // Strip comments outside quotes.
        bool quoted = false;
        std::string stripped;
        for (char c : line) {
            if (c == '"') quoted = !quoted;
            if (c == '#' && !quoted) break;
            stripped.push_back(c);
        }
        const auto eq = stripped.find('=');
        auto trim = [](std::string s) {
            const auto begin = s.find_first_not_of(" \t\r");
            if (begin == std::string::npos) return std::string();
            const auto end = s.find_last_not_of(" \t\r");
            return s.substr(begin, end - begin + 1);
        };
        const std::string all = trim(stripped);
        if (all.empty()) continue;
        if (eq == std::string::npos) {
            throw input_error(where + ": expected key = value");
        }
        const std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        if (key.empty() || value.empty()) {
            throw input_error(where + ": expected key = value");
        }

        auto as_int = [&](const std::string& v) {
            try {
                return std::stoll(v);
            } catch (...) {
                throw input_error(where + ": '" + key + "' must be an integer");
            }
        };
        auto as_double = [&](const std::string& v) {
            try {
                return std::stod(v);
            } catch (...) {
                throw input_error(where + ": '" + key + "' must be a number");
            }
        };

        if (key == "gtfs_dir") cfg.gtfs_dir = resolve(value);
        else if (key == "zones") cfg.zones = resolve(value);
        else if (key == "facilities") cfg.facilities = resolve(value);
        else if (key == "walk_nodes") cfg.walk_nodes = resolve(value);
        else if (key == "walk_edges") cfg.walk_edges = resolve(value);
        else if (key == "deprivation") cfg.deprivation = resolve(value);
        else if (key == "lookup") cfg.lookup = resolve(value);
        else if (key == "out_dir") cfg.out_dir = resolve(value);
        else if (key == "service_date") cfg.service_date = gtfs::ServiceDate::parse(value);
        else if (key == "hours") cfg.hours = parse_hours(value);
        else if (key == "k_facilities") cfg.k_facilities = static_cast<int>(as_int(value));
        else if (key == "window") cfg.query.window_s = static_cast<std::int32_t>(as_int(value));
        else if (key == "percentile") cfg.query.percentile = static_cast<int>(as_int(value));
        else if (key == "max_duration") cfg.query.max_duration_s = as_double(value);
        else if (key == "max_rides") cfg.query.max_rides = static_cast<int>(as_int(value));
        else if (key == "walk_speed") cfg.query.walk_speed_kmh = as_double(value);
        else if (key == "max_walk_duration") cfg.query.max_walk_duration_s = as_double(value);
        else if (key == "transfer_cap_m") cfg.transfer_cap_m = as_double(value);
        else if (key == "knn_k") cfg.knn_k = static_cast<std::size_t>(as_int(value));
        else if (key == "n_perm") cfg.n_perm = static_cast<std::size_t>(as_int(value));
        else if (key == "alpha") cfg.alpha = as_double(value);
        else if (key == "quantile_threshold") cfg.quantile_threshold = as_double(value);
        else if (key == "row_standardized") cfg.row_standardized = value == "true";
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(as_int(value));
        else if (key == "threads") cfg.threads = static_cast<int>(as_int(value));
        else throw input_error(where + ": unknown config key '" + key + "'");
    }
    if (cfg.service_date.year == 0) {
        throw input_error(path.filename().string() + ": service_date is required");
    }
    return cfg;
}

namespace {

struct KindPlan {
    // Per zone (input order): candidate facility indices.
    std::vector<std::vector<std::uint32_t>> candidates;
};

struct StageData {
    gtfs::RawFeed feed;
    std::vector<Zone> zones;
    std::vector<Facility> facilities;
    WalkGraph walk;
    std::vector<DeprivationRecord> deprivation;
    std::vector<LookupRow> lookup;
    bool has_deprivation = false;
};

int kind_index(FacilityKind k) { return k == FacilityKind::hospital ? 0 : 1; }

}  // namespace

PipelineResult run_pipeline(const RunConfig& cfg) {
    cfg.validate();
    PipelineResult result;
    result.out_dir = cfg.out_dir;

    StageData data;
    run_stage("ingest", [&] {
        data.feed = gtfs::parse_feed(cfg.gtfs_dir);
        data.zones = load_zones(cfg.zones);
        data.facilities = load_facilities(cfg.facilities);
        data.walk = WalkGraph::from_csv(cfg.walk_nodes, cfg.walk_edges);
        if (!cfg.deprivation.empty()) {
            data.deprivation = load_deprivation(cfg.deprivation);
            data.lookup = load_lookup(cfg.lookup);
            data.has_deprivation = true;
        }
        if (data.zones.empty()) throw input_error("no zones loaded");
    });

    const TransitNetwork network = run_stage("network", [&] {
        return TransitNetwork::build(data.feed, cfg.service_date, cfg.transfer_cap_m);
    });

    // Snap origins, attach facilities, pick straight-line candidates.
    std::vector<Destination> destinations;
    KindPlan plans[2];
    run_stage("geometry", [&] {
        Router router(network, data.walk);
        destinations.reserve(data.facilities.size());
        for (const auto& f : data.facilities) {
            destinations.push_back(router.make_destination(f.location));
        }
        for (auto& zone : data.zones) {
            zone.snapped_stop = snap_to_stop(zone, network);
        }
        for (FacilityKind kind : kFacilityKinds) {
            auto& plan = plans[kind_index(kind)];
            plan.candidates.resize(data.zones.size());
            for (std::size_t i = 0; i < data.zones.size(); ++i) {
                const auto picked =
                    nearest_facilities(data.zones[i], data.facilities, kind,
                                       static_cast<std::size_t>(cfg.k_facilities));
                for (const Facility* f : picked) {
                    plan.candidates[i].push_back(
                        static_cast<std::uint32_t>(f - data.facilities.data()));
                }
            }
        }
    });

    // (zone, kind) travel-time matrix; zones fan out to the worker pool,
    // results land in preallocated slots so the schedule cannot reorder
    // them.
    std::vector<std::array<std::vector<TravelTime>, 2>> matrix(data.zones.size());
    run_stage("routing", [&] {
        std::atomic<std::size_t> cursor{0};
        std::vector<std::thread> pool;
        std::atomic<bool> failed{false};
        std::string failure;
        std::mutex failure_mutex;
        auto work = [&] {
            try {
                Router router(network, data.walk);
                for (;;) {
                    const std::size_t i = cursor.fetch_add(1);
                    if (i >= data.zones.size() || failed.load()) break;
                    for (FacilityKind kind : kFacilityKinds) {
                        const auto& candidate_ids = plans[kind_index(kind)].candidates[i];
                        std::vector<const Destination*> candidates;
                        candidates.reserve(candidate_ids.size());
                        for (auto id : candidate_ids) candidates.push_back(&destinations[id]);
                        auto hourly = router.hourly_travel_times(*data.zones[i].snapped_stop,
                                                                 candidates, cfg.hours, cfg.query);
                        // Durations surface as whole seconds.
                        for (auto& t : hourly) {
                            if (t) t = static_cast<double>(std::llround(*t));
                        }
                        matrix[i][kind_index(kind)] = std::move(hourly);
                    }
                }
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failed = true;
                if (failure.empty()) failure = e.what();
            }
        };
        const int n_threads = std::max(1, cfg.threads);
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
        if (failed) throw std::runtime_error(failure);
    });

    run_stage("metrics", [&] {
        for (FacilityKind kind : kFacilityKinds) {
            KindResults& kr = result.kinds[kind];
            kr.kind = kind;
            kr.zones.reserve(data.zones.size());
            for (std::size_t i = 0; i < data.zones.size(); ++i) {
                kr.zones.push_back(
                    make_zone_metrics(data.zones[i], kind, matrix[i][kind_index(kind)]));
            }
            std::sort(kr.zones.begin(), kr.zones.end(),
                      [](const ZoneMetrics& a, const ZoneMetrics& b) {
                          return a.zone_id < b.zone_id;
                      });

            std::set<std::string> lads;
            for (const auto& z : kr.zones) lads.insert(z.lad_code);
            for (const auto& lad : lads) {
                if (auto agg = aggregate_region(kr.zones, lad)) {
                    kr.regions.push_back(*agg);
                } else {
                    kr.excluded_regions.push_back(lad);
                    result.exclusions.emplace_back("region:" + to_string(kind) + ":" + lad,
                                                   "no reachable zones");
                }
            }
            kr.settlement_summary = summarize_by_settlement(kr.zones);
        }
    });

    // Old-boundary deprivation scores joined onto the analysis zones.
    if (data.has_deprivation) {
        run_stage("deprivation", [&] {
            std::vector<std::string> zone_ids;
            zone_ids.reserve(data.zones.size());
            for (const auto& z : data.zones) zone_ids.push_back(z.zone_id);
            std::sort(zone_ids.begin(), zone_ids.end());
            auto join = join_deprivation(zone_ids, data.deprivation, data.lookup);
            result.imd_by_zone = std::move(join.score_by_zone);
            for (const auto& [zone, reason] : join.excluded) {
                result.exclusions.emplace_back("deprivation:" + zone, reason);
            }
        });
    }

    run_stage("stats", [&] {
        std::map<std::string, const Zone*> zone_by_id;
        for (const auto& z : data.zones) zone_by_id.emplace(z.zone_id, &z);

        for (FacilityKind kind : kFacilityKinds) {
            KindResults& kr = result.kinds[kind];
            std::vector<const ZoneMetrics*> reachable;
            for (const auto& z : kr.zones) {
                if (z.reachable) reachable.push_back(&z);
            }
            if (reachable.size() <= cfg.knn_k) {
                result.exclusions.emplace_back(
                    "stats:" + to_string(kind),
                    "needs more than knn_k reachable zones (have " +
                        std::to_string(reachable.size()) + ")");
            } else {
                std::vector<Coordinate> centroids;
                std::vector<double> ttv_values, mean_values;
                centroids.reserve(reachable.size());
                for (const auto* z : reachable) {
                    centroids.push_back(zone_by_id.at(z->zone_id)->centroid);
                    ttv_values.push_back(z->ttv);
                    mean_values.push_back(z->mean_tt);
                    kr.lisa_zone_ids.push_back(z->zone_id);
                }
                const SpatialWeights weights =
                    knn_weights(centroids, cfg.knn_k, cfg.row_standardized);
                const int k = kind_index(kind);
                auto global = [&](const std::vector<double>& values, std::uint64_t stream)
                    -> std::optional<StatResult> {
                    try {
                        return permutation_test_global(MetricVector::from(values), weights,
                                                       cfg.n_perm,
                                                       substream_seed(cfg.seed, 100, stream));
                    } catch (const undefined_metric_error&) {
                        return std::nullopt;
                    }
                };
                kr.global_ttv = global(ttv_values, k * 2);
                kr.global_mean_tt = global(mean_values, k * 2 + 1);
                if (!kr.global_ttv) {
                    result.exclusions.emplace_back("stats:" + to_string(kind) + ":ttv",
                                                   "zero variance");
                }
                if (!kr.global_mean_tt) {
                    result.exclusions.emplace_back("stats:" + to_string(kind) + ":mean_tt",
                                                   "zero variance");
                }
                try {
                    kr.lisa = permutation_test_local(MetricVector::from(ttv_values), weights,
                                                     cfg.n_perm, substream_seed(cfg.seed, 200, k),
                                                     cfg.alpha);
                } catch (const undefined_metric_error&) {
                    kr.lisa_zone_ids.clear();
                    result.exclusions.emplace_back("lisa:" + to_string(kind), "zero variance");
                }
            }

            // LAD-level correlation battery (the four aggregate metrics),
            // plus the zone-level TTV~IMD relation when a join exists.
            auto add_pair = [&](const std::string& name, const std::vector<double>& x,
                                const std::vector<double>& y) {
                CorrelationRow row;
                row.pair = to_string(kind) + ":" + name;
                try {
                    row.r = pearson(x, y);
                    row.p_raw = pearson_p_value(*row.r, x.size());
                } catch (const undefined_metric_error& e) {
                    result.exclusions.emplace_back("correlation:" + row.pair, e.what());
                }
                result.correlations.push_back(std::move(row));
            };
            std::vector<double> lad_mean, lad_ttv, lad_gini_mean, lad_gini_ttv;
            for (const auto& region : kr.regions) {
                lad_mean.push_back(region.mean_of_means);
                lad_ttv.push_back(region.mean_ttv);
                lad_gini_mean.push_back(region.gini_mean_tt);
                lad_gini_ttv.push_back(region.gini_ttv);
            }
            add_pair("lad_mean_tt~lad_mean_ttv", lad_mean, lad_ttv);
            add_pair("lad_mean_tt~lad_gini_mean_tt", lad_mean, lad_gini_mean);
            add_pair("lad_mean_tt~lad_gini_ttv", lad_mean, lad_gini_ttv);
            add_pair("lad_mean_ttv~lad_gini_mean_tt", lad_ttv, lad_gini_mean);
            add_pair("lad_mean_ttv~lad_gini_ttv", lad_ttv, lad_gini_ttv);
            add_pair("lad_gini_mean_tt~lad_gini_ttv", lad_gini_mean, lad_gini_ttv);
            if (data.has_deprivation) {
                std::vector<double> zone_ttv, zone_imd;
                for (const auto& z : kr.zones) {
                    if (!z.reachable) continue;
                    auto it = result.imd_by_zone.find(z.zone_id);
                    if (it == result.imd_by_zone.end()) continue;
                    zone_ttv.push_back(z.ttv);
                    zone_imd.push_back(it->second);
                }
                add_pair("zone_ttv~imd", zone_ttv, zone_imd);
            }
        }

        // One FDR family across the whole battery.
        std::vector<double> raw;
        for (const auto& row : result.correlations) {
            if (row.p_raw) raw.push_back(*row.p_raw);
        }
        if (!raw.empty()) {
            const auto adjusted = fdr_adjust(raw);
            std::size_t next = 0;
            for (auto& row : result.correlations) {
                if (row.p_raw) row.p_fdr = adjusted[next++];
            }
        }
    });

    if (data.has_deprivation) {
        run_stage("quadrants", [&] {
            for (FacilityKind kind : kFacilityKinds) {
                KindResults& kr = result.kinds[kind];
                std::vector<std::string> ids;
                std::vector<double> ttv_values, imd_values;
                for (const auto& z : kr.zones) {
                    if (!z.reachable) continue;
                    auto it = result.imd_by_zone.find(z.zone_id);
                    if (it == result.imd_by_zone.end()) continue;
                    ids.push_back(z.zone_id);
                    ttv_values.push_back(z.ttv);
                    imd_values.push_back(it->second);
                }
                if (ids.size() < 10) {
                    result.exclusions.emplace_back(
                        "quadrants:" + to_string(kind),
                        "fewer than 10 eligible zones (" + std::to_string(ids.size()) + ")");
                    continue;
                }
                kr.quadrants =
                    categorize_quadrants(ids, ttv_values, imd_values, cfg.quantile_threshold);
            }
        });
    }

    run_stage("export", [&] {
        namespace fs = std::filesystem;
        fs::create_directories(cfg.out_dir);
        const auto& hours = cfg.hours;

        {
            csv::Writer w(cfg.out_dir / "zone_metrics.csv");
            std::vector<std::string> header{"zone_id", "kind"};
            for (ClockSec h : hours) header.push_back("tt_" + hour_label(h));
            header.insert(header.end(),
                          {"mean_tt_s", "ttv_s", "reachable", "n_unreachable_hours"});
            w.write_row(header);
            for (FacilityKind kind : kFacilityKinds) {
                for (const auto& z : result.kinds[kind].zones) {
                    std::vector<std::string> row{z.zone_id, to_string(kind)};
                    for (const auto& t : z.hourly) {
                        row.push_back(t ? std::to_string(static_cast<long long>(*t))
                                        : std::string());
                    }
                    row.push_back(z.reachable ? csv::format_double(z.mean_tt) : std::string());
                    row.push_back(z.reachable ? csv::format_double(z.ttv) : std::string());
                    row.push_back(bool_text(z.reachable));
                    row.push_back(std::to_string(z.n_unreachable_hours));
                    w.write_row(row);
                }
            }
            w.close();
        }

        {
            csv::Writer w(cfg.out_dir / "region_aggregates.csv");
            w.write_row({"kind", "lad_code", "n_zones", "n_reachable", "mean_tt_s", "mean_ttv_s",
                         "gini_mean_tt", "gini_ttv"});
            for (FacilityKind kind : kFacilityKinds) {
                const KindResults& kr = result.kinds.at(kind);
                std::map<std::string, std::size_t> zone_counts;
                for (const auto& z : kr.zones) ++zone_counts[z.lad_code];
                std::size_t next_region = 0;
                for (const auto& [lad, count] : zone_counts) {
                    if (next_region < kr.regions.size() &&
                        kr.regions[next_region].lad_code == lad) {
                        const auto& r = kr.regions[next_region++];
                        w.write_row({to_string(kind), lad, std::to_string(r.n_zones),
                                     std::to_string(r.n_reachable),
                                     csv::format_double(r.mean_of_means),
                                     csv::format_double(r.mean_ttv),
                                     csv::format_double(r.gini_mean_tt),
                                     csv::format_double(r.gini_ttv)});
                    } else {
                        // Excluded region: no reachable zone to aggregate.
                        w.write_row({to_string(kind), lad, std::to_string(count), "0", "", "",
                                     "", ""});
                    }
                }
            }
            w.close();
        }

        {
            csv::Writer w(cfg.out_dir / "global_stats.csv");
            w.write_row({"metric", "morans_i", "p_value", "z_score"});
            for (FacilityKind kind : kFacilityKinds) {
                const KindResults& kr = result.kinds.at(kind);
                auto write_stat = [&](const std::string& metric,
                                      const std::optional<StatResult>& s) {
                    w.write_row({to_string(kind) + ":" + metric,
                                 s ? csv::format_double(s->statistic) : "",
                                 s ? csv::format_double(s->p_value) : "",
                                 s ? csv::format_double(s->z_score) : ""});
                };
                write_stat("ttv", kr.global_ttv);
                write_stat("mean_tt", kr.global_mean_tt);
            }
            w.close();
        }

        {
            csv::Writer w(cfg.out_dir / "lisa.csv");
            w.write_row({"metric", "unit_id", "local_i", "p_value", "category"});
            for (FacilityKind kind : kFacilityKinds) {
                const KindResults& kr = result.kinds.at(kind);
                for (std::size_t i = 0; i < kr.lisa.size(); ++i) {
                    w.write_row({to_string(kind) + ":ttv", kr.lisa_zone_ids[i],
                                 csv::format_double(kr.lisa[i].local_i),
                                 csv::format_double(kr.lisa[i].p_value),
                                 to_string(kr.lisa[i].category)});
                }
            }
            w.close();
        }

        {
            csv::Writer w(cfg.out_dir / "correlations.csv");
            w.write_row({"pair", "r", "p_raw", "p_fdr"});
            for (const auto& row : result.correlations) {
                w.write_row({row.pair, opt_text(row.r), opt_text(row.p_raw), opt_text(row.p_fdr)});
            }
            w.close();
        }

        {
            csv::Writer w(cfg.out_dir / "quadrants.csv");
            w.write_row({"kind", "zone_id", "ttv_rank_pct", "imd_rank_pct", "quadrant"});
            for (FacilityKind kind : kFacilityKinds) {
                for (const auto& q : result.kinds.at(kind).quadrants) {
                    w.write_row({to_string(kind), q.zone_id, csv::format_double(q.ttv_rank_pct),
                                 csv::format_double(q.imd_rank_pct), to_string(q.quadrant)});
                }
            }
            w.close();
        }

        {
            csv::Writer w(cfg.out_dir / "unreachable_report.csv");
            w.write_row({"kind", "zone_id", "n_unreachable_hours"});
            for (FacilityKind kind : kFacilityKinds) {
                for (const auto& z : result.kinds.at(kind).zones) {
                    if (z.reachable) continue;
                    w.write_row({to_string(kind), z.zone_id,
                                 std::to_string(z.n_unreachable_hours)});
                }
            }
            w.close();
        }

        {
            csv::Writer w(cfg.out_dir / "settlement_summary.csv");
            w.write_row({"kind", "settlement_class", "count", "mean", "median", "std", "iqr",
                         "min", "max"});
            for (FacilityKind kind : kFacilityKinds) {
                for (const auto& row : result.kinds.at(kind).settlement_summary) {
                    w.write_row({to_string(kind), to_string(row.settlement),
                                 std::to_string(row.count), csv::format_double(row.mean),
                                 csv::format_double(row.median), csv::format_double(row.stddev),
                                 csv::format_double(row.iqr), csv::format_double(row.min),
                                 csv::format_double(row.max)});
                }
            }
            w.close();
        }

        {
            csv::Writer w(cfg.out_dir / "exclusions.csv");
            w.write_row({"scope", "reason"});
            for (const auto& [scope, reason] : result.exclusions) {
                w.write_row({scope, reason});
            }
            w.close();
        }

        // GeoJSON carries every per-zone attribute the CSVs report.
        {
            std::map<std::string, const Zone*> zone_by_id;
            for (const auto& z : data.zones) zone_by_id.emplace(z.zone_id, &z);
            ordered_json features = ordered_json::array();
            std::map<FacilityKind, std::map<std::string, const ZoneMetrics*>> metrics_by_zone;
            std::map<FacilityKind, std::map<std::string, const LisaRecord*>> lisa_by_zone;
            std::map<FacilityKind, std::map<std::string, const QuadrantRecord*>> quad_by_zone;
            for (FacilityKind kind : kFacilityKinds) {
                const KindResults& kr = result.kinds.at(kind);
                for (const auto& z : kr.zones) metrics_by_zone[kind].emplace(z.zone_id, &z);
                for (std::size_t i = 0; i < kr.lisa.size(); ++i) {
                    lisa_by_zone[kind].emplace(kr.lisa_zone_ids[i], &kr.lisa[i]);
                }
                for (const auto& q : kr.quadrants) quad_by_zone[kind].emplace(q.zone_id, &q);
            }
            for (const auto& [zone_id, zone] : zone_by_id) {
                ordered_json properties;
                properties["zone_id"] = zone_id;
                properties["lad_code"] = zone->lad_code;
                properties["settlement_class"] = to_string(zone->settlement);
                auto imd = result.imd_by_zone.find(zone_id);
                if (imd != result.imd_by_zone.end()) properties["imd_score"] = imd->second;
                else properties["imd_score"] = nullptr;
                for (FacilityKind kind : kFacilityKinds) {
                    const std::string prefix = to_string(kind) + "_";
                    const ZoneMetrics* m = metrics_by_zone[kind].at(zone_id);
                    for (std::size_t h = 0; h < hours.size(); ++h) {
                        const auto key = prefix + "tt_" + hour_label(hours[h]);
                        if (m->hourly[h]) {
                            properties[key] = static_cast<long long>(*m->hourly[h]);
                        } else {
                            properties[key] = nullptr;
                        }
                    }
                    if (m->reachable) {
                        properties[prefix + "mean_tt_s"] = m->mean_tt;
                        properties[prefix + "ttv_s"] = m->ttv;
                    } else {
                        properties[prefix + "mean_tt_s"] = nullptr;
                        properties[prefix + "ttv_s"] = nullptr;
                    }
                    properties[prefix + "reachable"] = m->reachable;
                    properties[prefix + "n_unreachable_hours"] = m->n_unreachable_hours;
                    auto lisa = lisa_by_zone[kind].find(zone_id);
                    if (lisa != lisa_by_zone[kind].end()) {
                        properties[prefix + "lisa_local_i"] = lisa->second->local_i;
                        properties[prefix + "lisa_p"] = lisa->second->p_value;
                        properties[prefix + "lisa_category"] = to_string(lisa->second->category);
                    } else {
                        properties[prefix + "lisa_local_i"] = nullptr;
                        properties[prefix + "lisa_p"] = nullptr;
                        properties[prefix + "lisa_category"] = nullptr;
                    }
                    auto quad = quad_by_zone[kind].find(zone_id);
                    if (quad != quad_by_zone[kind].end()) {
                        properties[prefix + "quadrant"] = to_string(quad->second->quadrant);
                        properties[prefix + "ttv_rank_pct"] = quad->second->ttv_rank_pct;
                        properties[prefix + "imd_rank_pct"] = quad->second->imd_rank_pct;
                    } else {
                        properties[prefix + "quadrant"] = nullptr;
                        properties[prefix + "ttv_rank_pct"] = nullptr;
                        properties[prefix + "imd_rank_pct"] = nullptr;
                    }
                }
                ordered_json feature;
                feature["type"] = "Feature";
                feature["geometry"] = {{"type", "Point"},
                                       {"coordinates",
                                        {zone->centroid.lon, zone->centroid.lat}}};
                feature["properties"] = std::move(properties);
                features.push_back(std::move(feature));
            }
            ordered_json collection;
            collection["type"] = "FeatureCollection";
            collection["features"] = std::move(features);
            std::ofstream out(cfg.out_dir / "zones.geojson", std::ios::binary);
            out << collection.dump(2) << "\n";
            if (!out) throw std::runtime_error("failed writing zones.geojson");
        }

        // Manifest last: a run directory without one is incomplete. The
        // worker-pool size is deliberately not recorded; outputs do not
        // depend on it.
        {
            ordered_json manifest;
            manifest["tool"] = "ttv";
            manifest["version"] = kToolVersion;
            ordered_json config;
            config["service_date"] = cfg.service_date.to_string();
            ordered_json hours_json = ordered_json::array();
            for (ClockSec h : hours) hours_json.push_back(hhmm_text(h));
            config["hours"] = std::move(hours_json);
            config["k_facilities"] = cfg.k_facilities;
            config["window"] = cfg.query.window_s;
            config["percentile"] = cfg.query.percentile;
            config["max_duration"] = cfg.query.max_duration_s;
            config["max_rides"] = cfg.query.max_rides;
            config["walk_speed"] = cfg.query.walk_speed_kmh;
            config["max_walk_duration"] = cfg.query.max_walk_duration_s;
            config["transfer_cap_m"] = cfg.transfer_cap_m;
            config["knn_k"] = cfg.knn_k;
            config["n_perm"] = cfg.n_perm;
            config["alpha"] = cfg.alpha;
            config["quantile_threshold"] = cfg.quantile_threshold;
            config["row_standardized"] = cfg.row_standardized;
            config["seed"] = cfg.seed;
            manifest["config"] = std::move(config);
            ordered_json inputs;
            inputs["gtfs_dir"] = "fnv1a64:" + hex64(fnv1a64_dir(cfg.gtfs_dir));
            inputs["zones"] = "fnv1a64:" + hex64(fnv1a64_file(cfg.zones));
            inputs["facilities"] = "fnv1a64:" + hex64(fnv1a64_file(cfg.facilities));
            inputs["walk_nodes"] = "fnv1a64:" + hex64(fnv1a64_file(cfg.walk_nodes));
            inputs["walk_edges"] = "fnv1a64:" + hex64(fnv1a64_file(cfg.walk_edges));
            if (data.has_deprivation) {
                inputs["deprivation"] = "fnv1a64:" + hex64(fnv1a64_file(cfg.deprivation));
                inputs["lookup"] = "fnv1a64:" + hex64(fnv1a64_file(cfg.lookup));
            }
            manifest["inputs"] = std::move(inputs);
            std::ofstream out(cfg.out_dir / "manifest.json", std::ios::binary);
            out << manifest.dump(2) << "\n";
            if (!out) throw std::runtime_error("failed writing manifest.json");
        }
    });

    return result;
}

std::vector<RunComparison> compare_runs(const std::vector<std::filesystem::path>& run_dirs) {
    if (run_dirs.size() < 2) {
        throw input_error("compare-runs needs at least two run directories");
    }
    struct RunData {
        std::string name;
        std::map<std::pair<std::string, std::string>, double> ttv;  // (kind, zone) -> ttv
    };
    std::vector<RunData> runs;
    for (const auto& dir : run_dirs) {
        if (!std::filesystem::exists(dir / "manifest.json")) {
            throw input_error(dir.string() + " is not a completed run (missing manifest.json)");
        }
        RunData run;
        run.name = dir.string();
        const auto t = csv::Table::read_file(dir / "zone_metrics.csv");
        const std::size_t c_zone = t.column("zone_id");
        const std::size_t c_kind = t.column("kind");
        const std::size_t c_ttv = t.column("ttv_s");
        const std::size_t c_reach = t.column("reachable");
        for (const auto& row : t.rows()) {
            if (t.text(row, c_reach) != "true") continue;
            run.ttv[{t.text(row, c_kind), t.text(row, c_zone)}] = t.number(row, c_ttv);
        }
        runs.push_back(std::move(run));
    }

    std::vector<RunComparison> comparisons;
    for (const char* kind : {"hospital", "GP"}) {
        for (std::size_t a = 0; a < runs.size(); ++a) {
            for (std::size_t b = a + 1; b < runs.size(); ++b) {
                std::vector<double> xs, ys;
                for (const auto& [key, value] : runs[a].ttv) {
                    if (key.first != kind) continue;
                    auto it = runs[b].ttv.find(key);
                    if (it == runs[b].ttv.end()) continue;
                    xs.push_back(value);
                    ys.push_back(it->second);
                }
                RunComparison cmp;
                cmp.kind = kind;
                cmp.run_a = runs[a].name;
                cmp.run_b = runs[b].name;
                cmp.n = xs.size();
                if (xs == ys) {
                    cmp.r = 1.0;  // identical vectors, constant or not
                } else {
                    cmp.r = pearson(xs, ys);
                }
                comparisons.push_back(std::move(cmp));
            }
        }
    }
    return comparisons;
}

}  // namespace ttv
