#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ttv/common.hpp"
#include "ttv/geo.hpp"

namespace ttv {

// Sparse k-nearest-neighbour weights. Binary by default: equations for
// Moran's I are evaluated literally on w_ij = 1. Row standardization
// (w_ij = 1/k) is available for sensitivity analysis.
struct SpatialWeights {
    std::size_t n = 0;
    std::size_t k = 0;
    std::vector<std::vector<std::uint32_t>> neighbors;  // exactly k per unit, never self
    bool row_standardized = false;

    double link_weight() const { return row_standardized ? 1.0 / static_cast<double>(k) : 1.0; }
    double s0() const;  // sum of all weights
};

// k nearest units by great-circle distance, ties broken by unit index.
// Neighbourhood may be asymmetric. Throws std::invalid_argument unless
// n > k >= 1.
SpatialWeights knn_weights(const std::vector<Coordinate>& centroids, std::size_t k,
                           bool row_standardized = false);

// Values with their permutation-invariant moments.
struct MetricVector {
    std::vector<double> values;
    double mean = 0.0;
    double variance_pop = 0.0;  // S^2 = sum (x - mean)^2 / n

    static MetricVector from(std::vector<double> values);
};

struct StatResult {
    double statistic = 0.0;
    double p_value = 1.0;
    double z_score = 0.0;
    std::size_t n_permutations = 0;
};

enum class LisaCategory { high_high, low_low, high_low, low_high, not_significant };

std::string to_string(LisaCategory c);

struct LisaRecord {
    std::uint32_t unit = 0;
    double local_i = 0.0;
    double p_value = 1.0;
    LisaCategory category = LisaCategory::not_significant;
};

// Global Moran's I:
//   I = n sum_ij w_ij (x_i - mean)(x_j - mean)
//       / (sum_i (x_i - mean)^2 * S0).
// Throws undefined_metric_error on zero variance.
double morans_i(const MetricVector& x, const SpatialWeights& w);

// Local Moran's I per unit: I_i = (x_i - mean)/S^2 * sum_j w_ij (x_j - mean).
std::vector<double> local_morans_i(const MetricVector& x, const SpatialWeights& w);

// Significance under full random relabeling. Two-sided pseudo p-value
//   p = (1 + #{ |I_perm - E[I]| >= |I_obs - E[I]| }) / (n_perm + 1)
// with E[I] = -1/(n-1); z-score against the permutation distribution.
// Bit-reproducible given (seed, n_perm) at any parallelism level.
StatResult permutation_test_global(const MetricVector& x, const SpatialWeights& w,
                                   std::size_t n_perm, std::uint64_t seed);

// Conditional permutation per unit (x_i held, neighbours drawn from the
// remaining n-1 values); categories assigned only below `alpha`.
std::vector<LisaRecord> permutation_test_local(const MetricVector& x, const SpatialWeights& w,
                                               std::size_t n_perm, std::uint64_t seed,
                                               double alpha = 0.05);

// Product-moment correlation; throws undefined_metric_error for constant
// input or length < 3.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

// Two-sided p-value for an observed correlation of a sample of size n
// (Student's t with n-2 degrees of freedom).
double pearson_p_value(double r, std::size_t n);

// Benjamini-Hochberg step-up adjustment; entries must lie in (0, 1].
std::vector<double> fdr_adjust(const std::vector<double>& p_values);

}  // namespace ttv
