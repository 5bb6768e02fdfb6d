#include "ttv/gtfs.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "ttv/transit_network.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

using namespace ttv;
using ttv::testing::TempDir;
using ttv::testing::write_file;

namespace {

// Smallest valid feed: two stops, one trip between them.
void write_minimal_feed(const std::filesystem::path& dir) {
    write_file(dir / "stops.txt",
               "stop_id,stop_name,stop_lat,stop_lon\n"
               "A,Stop A,51.0,-1.0\n"
               "B,Stop B,51.01,-1.0\n");
    write_file(dir / "routes.txt", "route_id,route_type\nR1,3\n");
    write_file(dir / "trips.txt", "trip_id,route_id,service_id\nT1,R1,WK\n");
    write_file(dir / "stop_times.txt",
               "trip_id,stop_sequence,arrival_time,departure_time,stop_id\n"
               "T1,1,09:00:00,09:00:30,A\n"
               "T1,2,09:10:00,09:10:00,B\n");
    write_file(dir / "calendar.txt",
               "service_id,monday,tuesday,wednesday,thursday,friday,saturday,sunday,"
               "start_date,end_date\n"
               "WK,1,1,1,1,1,0,0,20240101,20241231\n");
}

}  // namespace

TEST(ParseTime, ConvertsToSecondsSinceMidnight) {
    EXPECT_EQ(gtfs::parse_time("00:00:00", "t"), 0);
    EXPECT_EQ(gtfs::parse_time("09:10:30", "t"), 9 * 3600 + 10 * 60 + 30);
    EXPECT_EQ(gtfs::parse_time("24:30:00", "t"), 88200);
    EXPECT_EQ(gtfs::parse_time("25:10:00", "t"), 90600);
    EXPECT_EQ(gtfs::parse_time("8:05:00", "t"), 8 * 3600 + 5 * 60);
}

TEST(ParseTime, RejectsMalformedTimes) {
    EXPECT_THROW(gtfs::parse_time("9:00", "t"), input_error);
    EXPECT_THROW(gtfs::parse_time("09:61:00", "t"), input_error);
    EXPECT_THROW(gtfs::parse_time("abc", "t"), input_error);
    EXPECT_THROW(gtfs::parse_time("09:00:-1", "t"), input_error);
}

TEST(ParseFeed, MinimalFeed) {
    TempDir dir("gtfs_min");
    write_minimal_feed(dir.path());
    const auto feed = gtfs::parse_feed(dir.path());
    EXPECT_EQ(feed.stops.size(), 2u);
    EXPECT_EQ(feed.trips.size(), 1u);
    EXPECT_EQ(feed.stop_times.size(), 2u);
    EXPECT_EQ(feed.stop_times[0].departure, 9 * 3600 + 30);
}

TEST(ParseFeed, MissingRequiredFile) {
    TempDir dir("gtfs_missing");
    write_minimal_feed(dir.path());
    std::filesystem::remove(dir.path() / "stop_times.txt");
    try {
        gtfs::parse_feed(dir.path());
        FAIL() << "expected input_error";
    } catch (const input_error& e) {
        EXPECT_NE(std::string(e.what()).find("stop_times.txt"), std::string::npos);
    }
}

TEST(ParseFeed, MissingCalendarEntirely) {
    TempDir dir("gtfs_nocal");
    write_minimal_feed(dir.path());
    std::filesystem::remove(dir.path() / "calendar.txt");
    EXPECT_THROW(gtfs::parse_feed(dir.path()), input_error);
}

TEST(ParseFeed, CalendarDatesOnlyIsAccepted) {
    TempDir dir("gtfs_dates");
    write_minimal_feed(dir.path());
    std::filesystem::remove(dir.path() / "calendar.txt");
    write_file(dir.path() / "calendar_dates.txt",
               "service_id,date,exception_type\nWK,20240530,1\n");
    const auto feed = gtfs::parse_feed(dir.path());
    EXPECT_EQ(feed.calendar_dates.size(), 1u);
}

TEST(ParseFeed, DanglingTripReferenceNamesTheTrip) {
    TempDir dir("gtfs_dangle");
    write_minimal_feed(dir.path());
    write_file(dir.path() / "stop_times.txt",
               "trip_id,stop_sequence,arrival_time,departure_time,stop_id\n"
               "T9,1,09:00:00,09:00:00,A\n");
    try {
        gtfs::parse_feed(dir.path());
        FAIL() << "expected input_error";
    } catch (const input_error& e) {
        EXPECT_NE(std::string(e.what()).find("T9"), std::string::npos);
    }
}

TEST(ParseFeed, MalformedRowReportsFileLineColumn) {
    TempDir dir("gtfs_badrow");
    write_minimal_feed(dir.path());
    write_file(dir.path() / "stop_times.txt",
               "trip_id,stop_sequence,arrival_time,departure_time,stop_id\n"
               "T1,1,09:00:00,09:00:00,A\n"
               "T1,2,bogus,09:10:00,B\n");
    try {
        gtfs::parse_feed(dir.path());
        FAIL() << "expected input_error";
    } catch (const input_error& e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("stop_times.txt"), std::string::npos);
        EXPECT_NE(what.find(":3"), std::string::npos);
        EXPECT_NE(what.find("arrival_time"), std::string::npos);
    }
}

TEST(ParseFeed, RejectsFrequenciesFile) {
    TempDir dir("gtfs_freq");
    write_minimal_feed(dir.path());
    write_file(dir.path() / "frequencies.txt",
               "trip_id,start_time,end_time,headway_secs\nT1,06:00:00,10:00:00,600\n");
    EXPECT_THROW(gtfs::parse_feed(dir.path()), input_error);
}

TEST(ParseFeed, RejectsOutOfRangeCoordinates) {
    TempDir dir("gtfs_coord");
    write_minimal_feed(dir.path());
    write_file(dir.path() / "stops.txt",
               "stop_id,stop_name,stop_lat,stop_lon\nA,Stop A,91.0,-1.0\nB,Stop B,51.01,-1.0\n");
    EXPECT_THROW(gtfs::parse_feed(dir.path()), input_error);
}

TEST(ParseFeed, RejectsNonIncreasingStopSequence) {
    TempDir dir("gtfs_seq");
    write_minimal_feed(dir.path());
    write_file(dir.path() / "stop_times.txt",
               "trip_id,stop_sequence,arrival_time,departure_time,stop_id\n"
               "T1,2,09:00:00,09:00:00,A\n"
               "T1,2,09:10:00,09:10:00,B\n");
    EXPECT_THROW(gtfs::parse_feed(dir.path()), input_error);
}

TEST(ParseFeed, RejectsTimeTravelBetweenStops) {
    TempDir dir("gtfs_order");
    write_minimal_feed(dir.path());
    write_file(dir.path() / "stop_times.txt",
               "trip_id,stop_sequence,arrival_time,departure_time,stop_id\n"
               "T1,1,09:00:00,09:00:00,A\n"
               "T1,2,08:50:00,08:55:00,B\n");
    EXPECT_THROW(gtfs::parse_feed(dir.path()), input_error);
}

TEST(ServiceDate, WeekdayIndex) {
    EXPECT_EQ(gtfs::ServiceDate::parse("2024-05-30").weekday_index(), 3);  // Thursday
    EXPECT_EQ(gtfs::ServiceDate::parse("2024-06-01").weekday_index(), 5);  // Saturday
    EXPECT_THROW(gtfs::ServiceDate::parse("2024-02-30"), input_error);
    EXPECT_THROW(gtfs::ServiceDate::parse("yesterday"), input_error);
}

TEST(BuildNetwork, WeekdayCalendarFilter) {
    TempDir dir("net_filter");
    write_minimal_feed(dir.path());
    const auto feed = gtfs::parse_feed(dir.path());
    const auto thursday = gtfs::ServiceDate::parse("2024-05-30");
    const auto net = TransitNetwork::build(feed, thursday);
    EXPECT_EQ(net.trip_count(), 1u);
    // Weekend: the Mon-Fri service is inactive.
    EXPECT_THROW(TransitNetwork::build(feed, gtfs::ServiceDate::parse("2024-06-01")), input_error);
}

TEST(BuildNetwork, CalendarDateExceptionsAddAndRemove) {
    TempDir dir("net_exception");
    write_minimal_feed(dir.path());
    write_file(dir.path() / "calendar_dates.txt",
               "service_id,date,exception_type\n"
               "WK,20240601,1\n"
               "WK,20240530,2\n");
    const auto feed = gtfs::parse_feed(dir.path());
    EXPECT_NO_THROW(TransitNetwork::build(feed, gtfs::ServiceDate::parse("2024-06-01")));
    EXPECT_THROW(TransitNetwork::build(feed, gtfs::ServiceDate::parse("2024-05-30")), input_error);
}

TEST(BuildNetwork, OvertakingTripsSplitIntoTwoPatterns) {
    TempDir dir("net_overtake");
    write_minimal_feed(dir.path());
    // T2 departs later but arrives earlier at the last stop.
    write_file(dir.path() / "trips.txt",
               "trip_id,route_id,service_id\nT1,R1,WK\nT2,R1,WK\n");
    write_file(dir.path() / "stop_times.txt",
               "trip_id,stop_sequence,arrival_time,departure_time,stop_id\n"
               "T1,1,09:00:00,09:00:00,A\n"
               "T1,2,09:30:00,09:30:00,B\n"
               "T2,1,09:05:00,09:05:00,A\n"
               "T2,2,09:20:00,09:20:00,B\n");
    const auto feed = gtfs::parse_feed(dir.path());
    const auto net = TransitNetwork::build(feed, gtfs::ServiceDate::parse("2024-05-30"));
    EXPECT_EQ(net.patterns().size(), 2u);
    EXPECT_EQ(net.trip_count(), 2u);
}

TEST(BuildNetwork, NonOvertakingTripsShareOnePattern) {
    TempDir dir("net_share");
    write_minimal_feed(dir.path());
    write_file(dir.path() / "trips.txt",
               "trip_id,route_id,service_id\nT1,R1,WK\nT2,R1,WK\n");
    write_file(dir.path() / "stop_times.txt",
               "trip_id,stop_sequence,arrival_time,departure_time,stop_id\n"
               "T1,1,09:00:00,09:00:00,A\n"
               "T1,2,09:30:00,09:30:00,B\n"
               "T2,1,09:05:00,09:05:00,A\n"
               "T2,2,09:35:00,09:35:00,B\n");
    const auto feed = gtfs::parse_feed(dir.path());
    const auto net = TransitNetwork::build(feed, gtfs::ServiceDate::parse("2024-05-30"));
    ASSERT_EQ(net.patterns().size(), 1u);
    ASSERT_EQ(net.patterns()[0].trips.size(), 2u);
    EXPECT_EQ(net.patterns()[0].trips[0].trip_id, "T1");
}

TEST(BuildNetwork, RoundTripReproducesRetainedStopTimes) {
    TempDir dir("net_roundtrip");
    write_minimal_feed(dir.path());
    write_file(dir.path() / "trips.txt",
               "trip_id,route_id,service_id\nT1,R1,WK\nT2,R1,WK\nT3,R1,WK\n");
    // T3 uses non-contiguous sequence ordinals; they must survive.
    write_file(dir.path() / "stop_times.txt",
               "trip_id,stop_sequence,arrival_time,departure_time,stop_id\n"
               "T1,1,09:00:00,09:00:00,A\n"
               "T1,2,09:30:00,09:30:00,B\n"
               "T2,1,09:05:00,09:05:00,A\n"
               "T2,2,09:20:00,09:20:00,B\n"
               "T3,10,10:00:00,10:00:30,B\n"
               "T3,20,10:15:00,10:15:00,A\n");
    const auto feed = gtfs::parse_feed(dir.path());
    const auto net = TransitNetwork::build(feed, gtfs::ServiceDate::parse("2024-05-30"));

    auto key = [](const gtfs::StopTime& st) {
        return std::tuple(st.trip_id, st.stop_sequence, st.arrival, st.departure, st.stop_id);
    };
    std::vector<std::tuple<std::string, std::int32_t, ClockSec, ClockSec, std::string>> expected,
        actual;
    for (const auto& st : feed.stop_times) expected.push_back(key(st));
    for (const auto& st : net.to_stop_time_rows()) actual.push_back(key(st));
    std::sort(expected.begin(), expected.end());
    std::sort(actual.begin(), actual.end());
    EXPECT_EQ(expected, actual);
}

TEST(BuildNetwork, PatternPartitionAndMonotonicity) {
    // Randomized: every retained trip in exactly one pattern; arrival
    // vectors non-decreasing across trips at every position.
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto instance = ttv::testing::make_random_instance(seed, 30, 120);
        const auto& net = instance.network;
        std::map<std::string, int> seen;
        for (const auto& pattern : net.patterns()) {
            for (const auto& trip : pattern.trips) ++seen[trip.trip_id];
            for (std::size_t pos = 0; pos < pattern.stops.size(); ++pos) {
                for (std::size_t t = 1; t < pattern.trips.size(); ++t) {
                    EXPECT_GE(pattern.trips[t].arrivals[pos], pattern.trips[t - 1].arrivals[pos]);
                    EXPECT_GE(pattern.trips[t].departures[pos],
                              pattern.trips[t - 1].departures[pos]);
                }
            }
        }
        EXPECT_EQ(seen.size(), instance.feed.trips.size());
        for (const auto& [trip_id, count] : seen) EXPECT_EQ(count, 1) << trip_id;
    }
}
