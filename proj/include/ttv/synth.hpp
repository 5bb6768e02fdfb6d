#pragma once

#include <cstdint>
#include <filesystem>

namespace ttv {

// Test-city blueprint: a grid of zones with one bus stop per cell, row
// and column bus lines, a walk grid, one downtown hospital, scattered
// GPs, and deprivation/lookup tables. Rows through the downtown band run
// at the downtown headway; peripheral rows run at the rural headway with
// a seeded per-trip offset so waiting times differ hour to hour. Column
// lines always run at the downtown headway and act as trunk connectors.
struct SynthSpec {
    int grid_x = 10;
    int grid_y = 10;
    std::int32_t downtown_headway_s = 600;
    std::int32_t rural_headway_s = 3600;
    std::uint64_t seed = 7;
};

// Writes the GTFS directory plus zones/facilities/walk network,
// deprivation and lookup CSVs, and a ready-to-run run.toml into out_dir.
// Deterministic given the spec. Throws std::invalid_argument for
// non-positive headways or a grid too small for the default k-NN weights
// (needs at least 11 zones).
void generate_synthetic_city(const SynthSpec& spec, const std::filesystem::path& out_dir);

}  // namespace ttv
