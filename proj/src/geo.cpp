#include "ttv/geo.hpp"

#include <cmath>

namespace ttv {

bool valid_coordinate(const Coordinate& c) {
    return std::isfinite(c.lat) && std::isfinite(c.lon) && c.lat >= -90.0 && c.lat <= 90.0 &&
           c.lon >= -180.0 && c.lon <= 180.0;
}

void require_valid_coordinate(const Coordinate& c, const std::string& context) {
    if (!valid_coordinate(c)) {
        throw input_error(context + ": coordinate out of range (lat=" + std::to_string(c.lat) +
                          ", lon=" + std::to_string(c.lon) + ")");
    }
}

double haversine_meters(const Coordinate& a, const Coordinate& b) {
    constexpr double deg = 3.14159265358979323846 / 180.0;
    const double phi1 = a.lat * deg;
    const double phi2 = b.lat * deg;
    const double dphi = (b.lat - a.lat) * deg;
    const double dlam = (b.lon - a.lon) * deg;
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlam / 2.0);
    const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    return 2.0 * kEarthRadiusMeters * std::asin(std::sqrt(std::min(1.0, h)));
}

}  // namespace ttv
