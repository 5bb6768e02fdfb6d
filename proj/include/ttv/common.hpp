#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace ttv {

// Timetable clock values are seconds since midnight of the service date.
// Values above 86400 denote after-midnight continuations of the same
// service day.
using ClockSec = std::int32_t;

// Elapsed durations in seconds. Walking legs make these fractional.
using DurationSec = double;

// An absent optional is the unreachable marker. Never encode
// unreachability as a sentinel duration.
using TravelTime = std::optional<DurationSec>;

// Problems with user-supplied inputs (files, config). The CLI maps these
// to exit code 2; everything else raised mid-run maps to exit code 3.
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// Statistic requested on inputs where it is undefined (zero variance,
// unreachable entries, negative values where non-negative required).
class undefined_metric_error : public std::invalid_argument {
public:
    explicit undefined_metric_error(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace ttv
