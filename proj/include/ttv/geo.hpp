#pragma once

#include <string>

#include "ttv/common.hpp"

namespace ttv {

inline constexpr double kEarthRadiusMeters = 6'371'000.0;

struct Coordinate {
    double lat = 0.0;  // degrees WGS84, [-90, 90]
    double lon = 0.0;  // degrees WGS84, [-180, 180]

    bool operator==(const Coordinate&) const = default;
};

bool valid_coordinate(const Coordinate& c);

// Throws input_error naming `context` when the coordinate is out of range.
void require_valid_coordinate(const Coordinate& c, const std::string& context);

// Great-circle distance in meters on a spherical earth.
double haversine_meters(const Coordinate& a, const Coordinate& b);

}  // namespace ttv
