#include "ttv/spatial_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "ttv/rng.hpp"

namespace ttv {

double SpatialWeights::s0() const {
    return static_cast<double>(n) * static_cast<double>(k) * link_weight();
}

SpatialWeights knn_weights(const std::vector<Coordinate>& centroids, std::size_t k,
                           bool row_standardized) {
    const std::size_t n = centroids.size();
    if (k < 1 || n <= k) {
        throw std::invalid_argument("knn_weights requires n > k >= 1 (n=" + std::to_string(n) +
                                    ", k=" + std::to_string(k) + ")");
    }
    SpatialWeights w;
    w.n = n;
    w.k = k;
    w.row_standardized = row_standardized;
    w.neighbors.resize(n);
    std::vector<std::pair<double, std::uint32_t>> dist;
    dist.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        dist.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            dist.emplace_back(haversine_meters(centroids[i], centroids[j]),
                              static_cast<std::uint32_t>(j));
        }
        std::sort(dist.begin(), dist.end());
        auto& nbrs = w.neighbors[i];
        nbrs.reserve(k);
        for (std::size_t j = 0; j < k; ++j) nbrs.push_back(dist[j].second);
    }
    return w;
}

MetricVector MetricVector::from(std::vector<double> values) {
    MetricVector m;
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw undefined_metric_error("MetricVector requires finite entries");
        }
    }
    m.values = std::move(values);
    const double n = static_cast<double>(m.values.size());
    double sum = 0.0;
    for (double v : m.values) sum += v;
    m.mean = sum / n;
    double ss = 0.0;
    for (double v : m.values) ss += (v - m.mean) * (v - m.mean);
    m.variance_pop = ss / n;
    return m;
}

namespace {

void require_variance(const MetricVector& x) {
    if (!(x.variance_pop > 0.0)) {
        throw undefined_metric_error("statistic undefined: input has zero variance");
    }
}

void require_shape(const MetricVector& x, const SpatialWeights& w) {
    if (x.values.size() != w.n) {
        throw std::invalid_argument("metric vector length does not match weights");
    }
}

// I computed from an arbitrary assignment of values to units.
double morans_i_of(const std::vector<double>& values, double mean, double sum_sq_dev,
                   const SpatialWeights& w) {
    const double lw = w.link_weight();
    double cross = 0.0;
    for (std::size_t i = 0; i < w.n; ++i) {
        const double zi = values[i] - mean;
        double lag = 0.0;
        for (std::uint32_t j : w.neighbors[i]) lag += values[j] - mean;
        cross += zi * lag * lw;
    }
    return static_cast<double>(w.n) * cross / (sum_sq_dev * w.s0());
}

}  // namespace

double morans_i(const MetricVector& x, const SpatialWeights& w) {
    require_shape(x, w);
    require_variance(x);
    const double sum_sq_dev = x.variance_pop * static_cast<double>(x.values.size());
    return morans_i_of(x.values, x.mean, sum_sq_dev, w);
}

std::vector<double> local_morans_i(const MetricVector& x, const SpatialWeights& w) {
    require_shape(x, w);
    require_variance(x);
    const double lw = w.link_weight();
    std::vector<double> local(w.n);
    for (std::size_t i = 0; i < w.n; ++i) {
        double lag = 0.0;
        for (std::uint32_t j : w.neighbors[i]) lag += x.values[j] - x.mean;
        local[i] = (x.values[i] - x.mean) / x.variance_pop * lag * lw;
    }
    return local;
}

StatResult permutation_test_global(const MetricVector& x, const SpatialWeights& w,
                                   std::size_t n_perm, std::uint64_t seed) {
    if (n_perm < 99) throw std::invalid_argument("permutation test needs n_perm >= 99");
    const double observed = morans_i(x, w);
    const double expectation = -1.0 / (static_cast<double>(w.n) - 1.0);
    const double sum_sq_dev = x.variance_pop * static_cast<double>(w.n);

    std::vector<double> permuted_stats(n_perm);
    std::vector<double> shuffled = x.values;
    for (std::size_t r = 0; r < n_perm; ++r) {
        // Substream per replicate keeps results identical under any
        // parallel schedule.
        Rng rng(substream_seed(seed, r));
        shuffled = x.values;
        rng.shuffle(shuffled);
        permuted_stats[r] = morans_i_of(shuffled, x.mean, sum_sq_dev, w);
    }

    const double threshold = std::abs(observed - expectation);
    std::size_t at_least_as_extreme = 0;
    double sum = 0.0;
    for (double stat : permuted_stats) {
        if (std::abs(stat - expectation) >= threshold) ++at_least_as_extreme;
        sum += stat;
    }
    const double mean_perm = sum / static_cast<double>(n_perm);
    double ss = 0.0;
    for (double stat : permuted_stats) ss += (stat - mean_perm) * (stat - mean_perm);
    const double std_perm = std::sqrt(ss / static_cast<double>(n_perm));

    StatResult result;
    result.statistic = observed;
    result.n_permutations = n_perm;
    result.p_value = (1.0 + static_cast<double>(at_least_as_extreme)) /
                     (static_cast<double>(n_perm) + 1.0);
    result.z_score = std_perm > 0.0 ? (observed - mean_perm) / std_perm : 0.0;
    return result;
}

std::vector<LisaRecord> permutation_test_local(const MetricVector& x, const SpatialWeights& w,
                                               std::size_t n_perm, std::uint64_t seed,
                                               double alpha) {
    if (n_perm < 99) throw std::invalid_argument("permutation test needs n_perm >= 99");
    const std::vector<double> observed = local_morans_i(x, w);
    const double lw = w.link_weight();
    const std::size_t n = w.n;

    std::vector<LisaRecord> records(n);
    std::vector<std::uint32_t> draw(w.k);
    for (std::uint32_t i = 0; i < n; ++i) {
        const double zi = x.values[i] - x.mean;
        // Expected I_i with x_i held: remaining deviations sum to -z_i, so
        // a random neighbour averages -z_i/(n-1).
        const double w_i = static_cast<double>(w.k) * lw;
        const double expectation =
            -(zi * zi) * w_i / (x.variance_pop * (static_cast<double>(n) - 1.0));
        const double threshold = std::abs(observed[i] - expectation);

        Rng rng(substream_seed(seed, i));
        std::size_t at_least_as_extreme = 0;
        for (std::size_t r = 0; r < n_perm; ++r) {
            // k distinct draws from the n-1 other units, by rejection.
            double lag = 0.0;
            for (std::size_t d = 0; d < w.k; ++d) {
                std::uint32_t v;
                bool fresh;
                do {
                    v = static_cast<std::uint32_t>(rng.below(n - 1));
                    if (v >= i) ++v;
                    fresh = true;
                    for (std::size_t e = 0; e < d; ++e) {
                        if (draw[e] == v) {
                            fresh = false;
                            break;
                        }
                    }
                } while (!fresh);
                draw[d] = v;
                lag += x.values[v] - x.mean;
            }
            const double stat = zi / x.variance_pop * lag * lw;
            if (std::abs(stat - expectation) >= threshold) ++at_least_as_extreme;
        }

        LisaRecord& record = records[i];
        record.unit = i;
        record.local_i = observed[i];
        record.p_value = (1.0 + static_cast<double>(at_least_as_extreme)) /
                         (static_cast<double>(n_perm) + 1.0);
        if (record.p_value < alpha) {
            double lag = 0.0;
            for (std::uint32_t j : w.neighbors[i]) lag += x.values[j];
            const double neighbor_mean = lag / static_cast<double>(w.k);
            const bool self_high = x.values[i] > x.mean;
            const bool nbrs_high = neighbor_mean > x.mean;
            const bool self_low = x.values[i] < x.mean;
            const bool nbrs_low = neighbor_mean < x.mean;
            if (self_high && nbrs_high) record.category = LisaCategory::high_high;
            else if (self_low && nbrs_low) record.category = LisaCategory::low_low;
            else if (self_high && nbrs_low) record.category = LisaCategory::high_low;
            else record.category = LisaCategory::low_high;
        }
    }
    return records;
}

std::string to_string(LisaCategory c) {
    switch (c) {
        case LisaCategory::high_high: return "HH";
        case LisaCategory::low_low: return "LL";
        case LisaCategory::high_low: return "HL";
        case LisaCategory::low_high: return "LH";
        case LisaCategory::not_significant: return "not-significant";
    }
    return "not-significant";
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
    if (x.size() < 3) throw undefined_metric_error("pearson: need at least 3 observations");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) {
        throw undefined_metric_error("pearson: constant input");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double pearson_p_value(double r, std::size_t n) {
    if (n < 3) throw undefined_metric_error("pearson_p_value: need n >= 3");
    const double df = static_cast<double>(n - 2);
    if (std::abs(r) >= 1.0) return 0.0;
    const double t = std::abs(r) * std::sqrt(df / (1.0 - r * r));
    const boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, t));
}

std::vector<double> fdr_adjust(const std::vector<double>& p_values) {
    const std::size_t m = p_values.size();
    for (double p : p_values) {
        if (!(p > 0.0) || p > 1.0) {
            throw std::invalid_argument("fdr_adjust: p-values must lie in (0, 1]");
        }
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (p_values[a] != p_values[b]) return p_values[a] < p_values[b];
        return a < b;
    });
    std::vector<double> adjusted(m);
    double running_min = 1.0;
    for (std::size_t rank = m; rank >= 1; --rank) {
        const std::size_t idx = order[rank - 1];
        const double scaled =
            std::min(1.0, p_values[idx] * static_cast<double>(m) / static_cast<double>(rank));
        running_min = std::min(running_min, scaled);
        adjusted[idx] = running_min;
    }
    return adjusted;
}

}  // namespace ttv
