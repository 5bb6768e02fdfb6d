#include "ttv/gtfs.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "ttv/csv.hpp"

namespace ttv::gtfs {

namespace {

int parse_int_field(const std::string& s, const std::string& context) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw input_error(context + ": not an integer: '" + s + "'");
    }
    return v;
}

std::vector<Stop> parse_stops(const csv::Table& t) {
    std::vector<Stop> stops;
    const std::size_t c_id = t.column("stop_id");
    const std::size_t c_lat = t.column("stop_lat");
    const std::size_t c_lon = t.column("stop_lon");
    const bool has_name = t.has_column("stop_name");
    const std::size_t c_name = has_name ? t.column("stop_name") : 0;
    stops.reserve(t.rows().size());
    for (const auto& row : t.rows()) {
        Stop s;
        s.stop_id = t.text(row, c_id);
        if (s.stop_id.empty()) {
            throw input_error("stops.txt:" + std::to_string(row.line) + ": column 'stop_id': empty");
        }
        if (has_name) s.name = t.text(row, c_name);
        s.location = {t.number(row, c_lat), t.number(row, c_lon)};
        require_valid_coordinate(s.location, "stops.txt:" + std::to_string(row.line));
        stops.push_back(std::move(s));
    }
    return stops;
}

std::vector<Route> parse_routes(const csv::Table& t) {
    std::vector<Route> routes;
    const std::size_t c_id = t.column("route_id");
    const bool has_type = t.has_column("route_type");
    const std::size_t c_type = has_type ? t.column("route_type") : 0;
    routes.reserve(t.rows().size());
    for (const auto& row : t.rows()) {
        Route r;
        r.route_id = t.text(row, c_id);
        if (has_type) r.mode = static_cast<int>(t.integer(row, c_type));
        routes.push_back(std::move(r));
    }
    return routes;
}

std::vector<Trip> parse_trips(const csv::Table& t) {
    std::vector<Trip> trips;
    const std::size_t c_trip = t.column("trip_id");
    const std::size_t c_route = t.column("route_id");
    const std::size_t c_service = t.column("service_id");
    trips.reserve(t.rows().size());
    for (const auto& row : t.rows()) {
        trips.push_back({t.text(row, c_trip), t.text(row, c_route), t.text(row, c_service)});
    }
    return trips;
}

std::vector<StopTime> parse_stop_times(const csv::Table& t) {
    std::vector<StopTime> stop_times;
    const std::size_t c_trip = t.column("trip_id");
    const std::size_t c_seq = t.column("stop_sequence");
    const std::size_t c_arr = t.column("arrival_time");
    const std::size_t c_dep = t.column("departure_time");
    const std::size_t c_stop = t.column("stop_id");
    stop_times.reserve(t.rows().size());
    for (const auto& row : t.rows()) {
        StopTime st;
        st.trip_id = t.text(row, c_trip);
        st.stop_sequence = static_cast<std::int32_t>(t.integer(row, c_seq));
        const std::string where = "stop_times.txt:" + std::to_string(row.line);
        st.arrival = parse_time(t.text(row, c_arr), where + ": column 'arrival_time'");
        st.departure = parse_time(t.text(row, c_dep), where + ": column 'departure_time'");
        if (st.departure < st.arrival) {
            throw input_error(where + ": column 'departure_time': departure before arrival");
        }
        st.stop_id = t.text(row, c_stop);
        stop_times.push_back(std::move(st));
    }
    return stop_times;
}

std::vector<CalendarEntry> parse_calendar(const csv::Table& t) {
    std::vector<CalendarEntry> entries;
    static const char* kDays[7] = {"monday", "tuesday",  "wednesday", "thursday",
                                   "friday", "saturday", "sunday"};
    const std::size_t c_service = t.column("service_id");
    std::size_t c_days[7];
    for (int d = 0; d < 7; ++d) c_days[d] = t.column(kDays[d]);
    const std::size_t c_start = t.column("start_date");
    const std::size_t c_end = t.column("end_date");
    for (const auto& row : t.rows()) {
        CalendarEntry e;
        e.service_id = t.text(row, c_service);
        for (int d = 0; d < 7; ++d) {
            const std::int64_t v = t.integer(row, c_days[d]);
            if (v != 0 && v != 1) {
                throw input_error("calendar.txt:" + std::to_string(row.line) + ": column '" +
                                  kDays[d] + "': expected 0 or 1");
            }
            e.weekday[d] = v == 1;
        }
        e.start_date = static_cast<std::int32_t>(t.integer(row, c_start));
        e.end_date = static_cast<std::int32_t>(t.integer(row, c_end));
        entries.push_back(std::move(e));
    }
    return entries;
}

std::vector<CalendarDate> parse_calendar_dates(const csv::Table& t) {
    std::vector<CalendarDate> entries;
    const std::size_t c_service = t.column("service_id");
    const std::size_t c_date = t.column("date");
    const std::size_t c_type = t.column("exception_type");
    for (const auto& row : t.rows()) {
        CalendarDate e;
        e.service_id = t.text(row, c_service);
        e.date = static_cast<std::int32_t>(t.integer(row, c_date));
        const std::int64_t type = t.integer(row, c_type);
        if (type != 1 && type != 2) {
            throw input_error("calendar_dates.txt:" + std::to_string(row.line) +
                              ": column 'exception_type': expected 1 or 2");
        }
        e.added = type == 1;
        entries.push_back(std::move(e));
    }
    return entries;
}

void validate_feed(RawFeed& feed) {
    std::unordered_set<std::string> stop_ids;
    stop_ids.reserve(feed.stops.size());
    for (const auto& s : feed.stops) {
        if (!stop_ids.insert(s.stop_id).second) {
            throw input_error("stops.txt: duplicate stop_id '" + s.stop_id + "'");
        }
    }
    std::unordered_set<std::string> route_ids;
    for (const auto& r : feed.routes) route_ids.insert(r.route_id);
    std::unordered_set<std::string> service_ids;
    for (const auto& c : feed.calendar) service_ids.insert(c.service_id);
    for (const auto& c : feed.calendar_dates) service_ids.insert(c.service_id);

    std::unordered_set<std::string> trip_ids;
    trip_ids.reserve(feed.trips.size());
    for (const auto& tr : feed.trips) {
        if (!trip_ids.insert(tr.trip_id).second) {
            throw input_error("trips.txt: duplicate trip_id '" + tr.trip_id + "'");
        }
        if (!route_ids.count(tr.route_id)) {
            throw input_error("trips.txt: trip '" + tr.trip_id + "' references unknown route '" +
                              tr.route_id + "'");
        }
        if (!service_ids.count(tr.service_id)) {
            throw input_error("trips.txt: trip '" + tr.trip_id + "' references unknown service '" +
                              tr.service_id + "'");
        }
    }

    for (const auto& st : feed.stop_times) {
        if (!trip_ids.count(st.trip_id)) {
            throw input_error("stop_times.txt: row references unknown trip '" + st.trip_id + "'");
        }
        if (!stop_ids.count(st.stop_id)) {
            throw input_error("stop_times.txt: row references unknown stop '" + st.stop_id + "'");
        }
    }

    std::stable_sort(feed.stop_times.begin(), feed.stop_times.end(),
                     [](const StopTime& a, const StopTime& b) {
                         if (a.trip_id != b.trip_id) return a.trip_id < b.trip_id;
                         return a.stop_sequence < b.stop_sequence;
                     });
    for (std::size_t i = 1; i < feed.stop_times.size(); ++i) {
        const StopTime& prev = feed.stop_times[i - 1];
        const StopTime& cur = feed.stop_times[i];
        if (prev.trip_id != cur.trip_id) continue;
        if (cur.stop_sequence <= prev.stop_sequence) {
            throw input_error("stop_times.txt: trip '" + cur.trip_id +
                              "': stop_sequence not strictly increasing at sequence " +
                              std::to_string(cur.stop_sequence));
        }
        if (cur.arrival < prev.departure) {
            throw input_error("stop_times.txt: trip '" + cur.trip_id + "': arrival at sequence " +
                              std::to_string(cur.stop_sequence) +
                              " is before the previous departure");
        }
    }
}

}  // namespace

ClockSec parse_time(const std::string& text, const std::string& context) {
    // H:MM:SS or HH:MM:SS; hours may exceed 24 for after-midnight trips.
    const std::size_t p1 = text.find(':');
    const std::size_t p2 = p1 == std::string::npos ? std::string::npos : text.find(':', p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos || p2 + 1 >= text.size() + 1) {
        throw input_error(context + ": malformed time '" + text + "'");
    }
    const int hours = parse_int_field(text.substr(0, p1), context);
    const int minutes = parse_int_field(text.substr(p1 + 1, p2 - p1 - 1), context);
    const int seconds = parse_int_field(text.substr(p2 + 1), context);
    if (hours < 0 || minutes < 0 || minutes > 59 || seconds < 0 || seconds > 59) {
        throw input_error(context + ": time out of range '" + text + "'");
    }
    return hours * 3600 + minutes * 60 + seconds;
}

RawFeed parse_feed(const std::filesystem::path& directory) {
    if (!std::filesystem::is_directory(directory)) {
        throw input_error("GTFS directory not found: " + directory.string());
    }
    auto require = [&](const char* file) {
        const auto path = directory / file;
        if (!std::filesystem::exists(path)) {
            throw input_error("missing required GTFS file: " + path.string());
        }
        return csv::Table::read_file(path);
    };
    if (std::filesystem::exists(directory / "frequencies.txt")) {
        throw input_error(
            "frequencies.txt present: headway-based trips are not supported; provide explicit "
            "stop_times");
    }

    RawFeed feed;
    feed.stops = parse_stops(require("stops.txt"));
    feed.routes = parse_routes(require("routes.txt"));
    feed.trips = parse_trips(require("trips.txt"));
    feed.stop_times = parse_stop_times(require("stop_times.txt"));

    const bool has_calendar = std::filesystem::exists(directory / "calendar.txt");
    const bool has_dates = std::filesystem::exists(directory / "calendar_dates.txt");
    if (!has_calendar && !has_dates) {
        throw input_error("missing required GTFS file: " + (directory / "calendar.txt").string() +
                          " (or calendar_dates.txt)");
    }
    if (has_calendar) feed.calendar = parse_calendar(csv::Table::read_file(directory / "calendar.txt"));
    if (has_dates) {
        feed.calendar_dates = parse_calendar_dates(csv::Table::read_file(directory / "calendar_dates.txt"));
    }

    validate_feed(feed);
    return feed;
}

int ServiceDate::weekday_index() const {
    const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                          std::chrono::day{day}};
    const std::chrono::weekday wd{std::chrono::sys_days{ymd}};
    return static_cast<int>(wd.iso_encoding()) - 1;  // Monday = 0
}

std::string ServiceDate::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year, month, day);
    return buf;
}

ServiceDate ServiceDate::parse(const std::string& text) {
    ServiceDate d;
    unsigned y = 0, m = 0, dd = 0;
    if (std::sscanf(text.c_str(), "%4u-%2u-%2u", &y, &m, &dd) != 3) {
        throw input_error("malformed date '" + text + "': expected YYYY-MM-DD");
    }
    d.year = static_cast<int>(y);
    d.month = m;
    d.day = dd;
    const std::chrono::year_month_day ymd{std::chrono::year{d.year}, std::chrono::month{m},
                                          std::chrono::day{dd}};
    if (!ymd.ok()) {
        throw input_error("invalid calendar date '" + text + "'");
    }
    return d;
}

std::vector<std::string> active_services(const RawFeed& feed, const ServiceDate& date) {
    const std::int32_t ymd = date.yyyymmdd();
    const int weekday = date.weekday_index();
    std::set<std::string> active;
    for (const auto& entry : feed.calendar) {
        if (entry.weekday[weekday] && entry.start_date <= ymd && ymd <= entry.end_date) {
            active.insert(entry.service_id);
        }
    }
    for (const auto& exception : feed.calendar_dates) {
        if (exception.date != ymd) continue;
        if (exception.added) {
            active.insert(exception.service_id);
        } else {
            active.erase(exception.service_id);
        }
    }
    return {active.begin(), active.end()};
}

}  // namespace ttv::gtfs
