#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ttv/common.hpp"
#include "ttv/geo.hpp"

namespace ttv::gtfs {

struct Stop {
    std::string stop_id;
    std::string name;
    Coordinate location;
};

struct Route {
    std::string route_id;
    int mode = 3;  // GTFS route_type; buses are 3
};

struct Trip {
    std::string trip_id;
    std::string route_id;
    std::string service_id;
};

struct StopTime {
    std::string trip_id;
    std::int32_t stop_sequence = 0;
    ClockSec arrival = 0;
    ClockSec departure = 0;
    std::string stop_id;
};

struct CalendarEntry {
    std::string service_id;
    bool weekday[7] = {};  // Monday..Sunday
    std::int32_t start_date = 0;  // YYYYMMDD
    std::int32_t end_date = 0;
};

struct CalendarDate {
    std::string service_id;
    std::int32_t date = 0;  // YYYYMMDD
    bool added = false;     // exception_type 1 adds, 2 removes
};

// Validated feed contents; stop_times are sorted by (trip_id,
// stop_sequence) and respect the within-trip time ordering.
struct RawFeed {
    std::vector<Stop> stops;
    std::vector<Route> routes;
    std::vector<Trip> trips;
    std::vector<StopTime> stop_times;
    std::vector<CalendarEntry> calendar;
    std::vector<CalendarDate> calendar_dates;
};

// "HH:MM:SS" with hours possibly above 24; throws input_error with
// `context` on malformed input.
ClockSec parse_time(const std::string& text, const std::string& context);

// Reads and validates a GTFS directory. Throws input_error on missing
// required files, malformed rows (naming file, line, column), dangling
// references, or a frequencies.txt file (headway-based trips are not
// supported; explicit stop_times are required).
RawFeed parse_feed(const std::filesystem::path& directory);

struct ServiceDate {
    int year = 0;
    unsigned month = 0;
    unsigned day = 0;

    std::int32_t yyyymmdd() const {
        return year * 10000 + static_cast<int>(month) * 100 + static_cast<int>(day);
    }
    // 0 = Monday .. 6 = Sunday.
    int weekday_index() const;
    std::string to_string() const;

    static ServiceDate parse(const std::string& text);  // "YYYY-MM-DD"
};

// service_ids active on the date (calendar ranges plus calendar_dates
// exceptions).
std::vector<std::string> active_services(const RawFeed& feed, const ServiceDate& date);

}  // namespace ttv::gtfs
