#include "ttv/spatial_stats.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ttv/rng.hpp"

using namespace ttv;

namespace {

std::vector<Coordinate> random_coordinates(Rng& rng, std::size_t n) {
    std::vector<Coordinate> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        pts.push_back({50.0 + rng.uniform() * 2.0, -2.0 + rng.uniform() * 3.0});
    }
    return pts;
}

std::vector<double> random_values(Rng& rng, std::size_t n) {
    std::vector<double> values;
    values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) values.push_back(rng.uniform() * 10.0);
    return values;
}

// Dense double-loop reference for Moran's I.
double morans_oracle(const std::vector<double>& x, const SpatialWeights& w) {
    const std::size_t n = x.size();
    std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (auto j : w.neighbors[i]) dense[i][j] = w.link_weight();
    }
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double numerator = 0.0, s0 = 0.0, denominator = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        denominator += (x[i] - mean) * (x[i] - mean);
        for (std::size_t j = 0; j < n; ++j) {
            numerator += dense[i][j] * (x[i] - mean) * (x[j] - mean);
            s0 += dense[i][j];
        }
    }
    return static_cast<double>(n) * numerator / (denominator * s0);
}

// 4-node ring with both ring neighbours per node, binary weights.
SpatialWeights ring4() {
    SpatialWeights w;
    w.n = 4;
    w.k = 2;
    w.neighbors = {{1, 3}, {2, 0}, {3, 1}, {0, 2}};
    return w;
}

// Unit grid as coordinates (spacing approximately uniform at small scale).
std::vector<Coordinate> grid_coordinates(int side) {
    std::vector<Coordinate> pts;
    for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
            pts.push_back({50.0 + y * 0.01, -1.0 + x * 0.016});
        }
    }
    return pts;
}

}  // namespace

TEST(KnnWeights, CollinearPointsTieByIndex) {
    const std::vector<Coordinate> pts{{0, 0}, {0, 1}, {0, 2}, {0, 3}};
    const auto w = knn_weights(pts, 1);
    EXPECT_EQ(w.neighbors[0], std::vector<std::uint32_t>{1});
    EXPECT_EQ(w.neighbors[1], std::vector<std::uint32_t>{0});  // tie 0 vs 2 -> 0
    EXPECT_EQ(w.neighbors[2], std::vector<std::uint32_t>{1});  // tie 1 vs 3 -> 1
    EXPECT_EQ(w.neighbors[3], std::vector<std::uint32_t>{2});
}

TEST(KnnWeights, CompleteGraphWhenKIsNMinusOne) {
    Rng rng(3);
    const auto pts = random_coordinates(rng, 6);
    const auto w = knn_weights(pts, 5);
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_EQ(w.neighbors[i].size(), 5u);
        for (auto j : w.neighbors[i]) EXPECT_NE(j, i);
    }
    EXPECT_DOUBLE_EQ(w.s0(), 30.0);
}

TEST(KnnWeights, MatchesExhaustiveSortOracle) {
    Rng rng(9);
    const auto pts = random_coordinates(rng, 100);
    const auto w = knn_weights(pts, 10);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        std::vector<std::pair<double, std::uint32_t>> all;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (j == i) continue;
            all.emplace_back(haversine_meters(pts[i], pts[j]), static_cast<std::uint32_t>(j));
        }
        std::sort(all.begin(), all.end());
        for (std::size_t k = 0; k < 10; ++k) {
            EXPECT_EQ(w.neighbors[i][k], all[k].second) << "unit " << i << " rank " << k;
        }
    }
}

TEST(KnnWeights, RejectsDegenerateSizes) {
    Rng rng(4);
    const auto pts = random_coordinates(rng, 5);
    EXPECT_THROW(knn_weights(pts, 5), std::invalid_argument);
    EXPECT_THROW(knn_weights(pts, 0), std::invalid_argument);
}

TEST(MoransI, RingCheckerboardIsExactlyMinusOne) {
    const auto x = MetricVector::from({1.0, -1.0, 1.0, -1.0});
    EXPECT_DOUBLE_EQ(morans_i(x, ring4()), -1.0);
}

TEST(MoransI, ConstantFieldIsUndefined) {
    const auto x = MetricVector::from({2.0, 2.0, 2.0, 2.0});
    EXPECT_THROW(morans_i(x, ring4()), undefined_metric_error);
}

TEST(MoransI, MatchesDenseOracle) {
    Rng rng(21);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 10 + rng.below(80);
        const std::size_t k = 1 + rng.below(std::min<std::uint64_t>(n - 1, 12));
        const auto pts = random_coordinates(rng, n);
        const auto w = knn_weights(pts, k);
        const auto values = random_values(rng, n);
        EXPECT_NEAR(morans_i(MetricVector::from(values), w), morans_oracle(values, w), 1e-12);
    }
}

TEST(LocalMoransI, UnitAtTheMeanHasZeroLocalI) {
    // x0 equals the mean of {3, 1, 5, 3}.
    const auto x = MetricVector::from({3.0, 1.0, 5.0, 3.0});
    const auto local = local_morans_i(x, ring4());
    EXPECT_DOUBLE_EQ(local[0], 0.0);
    EXPECT_DOUBLE_EQ(local[3], 0.0);
}

TEST(LocalMoransI, SumIdentityLinksLocalAndGlobal) {
    Rng rng(33);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 12 + rng.below(60);
        const std::size_t k = 1 + rng.below(8);
        const auto pts = random_coordinates(rng, n);
        const auto w = knn_weights(pts, k);
        const auto x = MetricVector::from(random_values(rng, n));
        const auto local = local_morans_i(x, w);
        double sum = 0.0;
        for (double v : local) sum += v;
        const double expected = morans_i(x, w) * w.s0();
        EXPECT_NEAR(sum, expected, 1e-9 * std::max(1.0, std::abs(expected)));
    }
}

TEST(LocalMoransI, IsolatedHighValueHasNegativeLocalI) {
    // 3x3 grid, centre high, k = 8: the centre is a high-low outlier.
    const auto pts = grid_coordinates(3);
    const auto w = knn_weights(pts, 8);
    std::vector<double> values(9, 0.0);
    values[4] = 10.0;
    const auto local = local_morans_i(MetricVector::from(values), w);
    EXPECT_LT(local[4], 0.0);
}

TEST(PermutationGlobal, MaximallyClusteredFieldHitsTheFloor) {
    // Two tight value blocks far apart: as clustered as it gets.
    std::vector<Coordinate> pts;
    std::vector<double> values;
    for (int i = 0; i < 30; ++i) {
        pts.push_back({50.0 + (i % 5) * 0.001, -1.0 + (i / 5) * 0.001});
        values.push_back(1.0 + 0.001 * i);
    }
    for (int i = 0; i < 30; ++i) {
        pts.push_back({55.0 + (i % 5) * 0.001, 1.0 + (i / 5) * 0.001});
        values.push_back(100.0 + 0.001 * i);
    }
    const auto w = knn_weights(pts, 10);
    const auto result = permutation_test_global(MetricVector::from(values), w, 999, 42);
    EXPECT_DOUBLE_EQ(result.p_value, 0.001);
    EXPECT_GT(result.statistic, 0.5);
    EXPECT_GT(result.z_score, 3.0);
}

TEST(PermutationGlobal, SameSeedSameResult) {
    Rng rng(55);
    const auto pts = random_coordinates(rng, 40);
    const auto w = knn_weights(pts, 6);
    const auto x = MetricVector::from(random_values(rng, 40));
    const auto a = permutation_test_global(x, w, 199, 1234);
    const auto b = permutation_test_global(x, w, 199, 1234);
    EXPECT_EQ(a.statistic, b.statistic);
    EXPECT_EQ(a.p_value, b.p_value);
    EXPECT_EQ(a.z_score, b.z_score);
    const auto c = permutation_test_global(x, w, 199, 999);
    EXPECT_NE(a.z_score, c.z_score);
}

TEST(PermutationGlobal, PValueFloorIsOneOverRPlusOne) {
    Rng rng(60);
    const auto pts = random_coordinates(rng, 30);
    const auto w = knn_weights(pts, 5);
    const auto x = MetricVector::from(random_values(rng, 30));
    const auto result = permutation_test_global(x, w, 99, 7);
    EXPECT_GE(result.p_value, 1.0 / 100.0);
    EXPECT_THROW(permutation_test_global(x, w, 50, 7), std::invalid_argument);
}

TEST(PermutationGlobal, FalsePositiveRateNearAlpha) {
    // i.i.d. fields: rejecting at 0.05 should happen about 5% of the time.
    Rng rng(70);
    const auto pts = random_coordinates(rng, 50);
    const auto w = knn_weights(pts, 6);
    int rejections = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        const auto x = MetricVector::from(random_values(rng, 50));
        const auto result = permutation_test_global(x, w, 999, 1000 + t);
        if (result.p_value < 0.05) ++rejections;
    }
    const double rate = static_cast<double>(rejections) / trials;
    EXPECT_GE(rate, 0.03);
    EXPECT_LE(rate, 0.07);
}

TEST(PermutationGlobal, PermutationMeanMatchesMinusOneOverNMinusOne) {
    // The permutation distribution of I has mean -1/(n-1).
    Rng rng(81);
    const std::size_t n = 40;
    const auto pts = random_coordinates(rng, n);
    const auto w = knn_weights(pts, 8);
    const auto x = MetricVector::from(random_values(rng, n));
    const double sum_sq_dev = x.variance_pop * static_cast<double>(n);

    const int shuffles = 2000;
    std::vector<double> stats;
    stats.reserve(shuffles);
    for (int r = 0; r < shuffles; ++r) {
        Rng perm_rng(substream_seed(4242, r));
        auto shuffled = x.values;
        perm_rng.shuffle(shuffled);
        const auto vec = MetricVector::from(shuffled);
        (void)sum_sq_dev;
        stats.push_back(morans_i(vec, w));
    }
    double mean = 0.0;
    for (double s : stats) mean += s;
    mean /= shuffles;
    double var = 0.0;
    for (double s : stats) var += (s - mean) * (s - mean);
    var /= shuffles;
    const double se = std::sqrt(var / shuffles);
    const double expectation = -1.0 / (static_cast<double>(n) - 1.0);
    EXPECT_NEAR(mean, expectation, 3.0 * se);
}

TEST(PermutationLocal, HighBlockOnGridIsHighHigh) {
    const auto pts = grid_coordinates(10);
    const auto w = knn_weights(pts, 8);
    Rng rng(91);
    std::vector<double> values(100);
    for (auto& v : values) v = rng.uniform();
    for (int y = 3; y <= 5; ++y) {
        for (int x = 3; x <= 5; ++x) values[y * 10 + x] = 10.0 + rng.uniform();
    }
    const auto records = permutation_test_local(MetricVector::from(values), w, 999, 17);
    for (int y = 3; y <= 5; ++y) {
        for (int x = 3; x <= 5; ++x) {
            const auto& r = records[y * 10 + x];
            EXPECT_EQ(r.category, LisaCategory::high_high) << "cell " << x << "," << y;
            EXPECT_LT(r.p_value, 0.05);
            EXPECT_GT(r.local_i, 0.0);
        }
    }
}

TEST(PermutationLocal, PlantedOutlierIsHighLow) {
    // Right half high, left half low, one high cell deep in the low half:
    // its neighbourhood is much lower than a random draw.
    const auto pts = grid_coordinates(10);
    const auto w = knn_weights(pts, 8);
    Rng rng(92);
    std::vector<double> values(100);
    for (int y = 0; y < 10; ++y) {
        for (int x = 0; x < 10; ++x) {
            values[y * 10 + x] = (x >= 5 ? 10.0 : 0.0) + rng.uniform() * 0.01;
        }
    }
    values[2 * 10 + 2] = 10.0;
    const auto records = permutation_test_local(MetricVector::from(values), w, 999, 18);
    EXPECT_EQ(records[22].category, LisaCategory::high_low);
    EXPECT_LT(records[22].local_i, 0.0);
}

TEST(PermutationLocal, CategorySignsAndPartition) {
    Rng rng(93);
    const auto pts = grid_coordinates(8);
    const auto w = knn_weights(pts, 8);
    std::vector<double> values(64);
    for (int i = 0; i < 64; ++i) values[i] = rng.uniform() + (i % 8 >= 4 ? 2.0 : 0.0);
    const auto records = permutation_test_local(MetricVector::from(values), w, 999, 5);
    for (const auto& r : records) {
        switch (r.category) {
            case LisaCategory::high_high:
            case LisaCategory::low_low:
                EXPECT_GT(r.local_i, 0.0);
                EXPECT_LT(r.p_value, 0.05);
                break;
            case LisaCategory::high_low:
            case LisaCategory::low_high:
                EXPECT_LT(r.local_i, 0.0);
                EXPECT_LT(r.p_value, 0.05);
                break;
            case LisaCategory::not_significant:
                EXPECT_GE(r.p_value, 0.05);
                break;
        }
    }
}

TEST(PermutationLocal, FalsePositiveRateNearAlpha) {
    const auto pts = grid_coordinates(10);
    const auto w = knn_weights(pts, 10);
    std::size_t significant = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(500 + seed);
        std::vector<double> values(100);
        for (auto& v : values) v = rng.uniform();
        const auto records = permutation_test_local(MetricVector::from(values), w, 999, seed);
        for (const auto& r : records) {
            ++total;
            if (r.category != LisaCategory::not_significant) ++significant;
        }
    }
    const double rate = static_cast<double>(significant) / static_cast<double>(total);
    EXPECT_GE(rate, 0.02);
    EXPECT_LE(rate, 0.09);
}

TEST(Pearson, PerfectLinearRelations) {
    const std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> y;
    for (double v : x) y.push_back(2.0 * v + 1.0);
    EXPECT_DOUBLE_EQ(pearson(x, y), 1.0);
    for (auto& v : y) v = -v;
    EXPECT_DOUBLE_EQ(pearson(x, y), -1.0);
}

TEST(Pearson, MatchesDirectFormulaOracle) {
    Rng rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 3 + rng.below(40);
        const auto x = random_values(rng, n);
        const auto y = random_values(rng, n);
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < n; ++i) {
            mx += x[i];
            my += y[i];
        }
        mx /= n;
        my /= n;
        double sxy = 0, sxx = 0, syy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            sxy += (x[i] - mx) * (y[i] - my);
            sxx += (x[i] - mx) * (x[i] - mx);
            syy += (y[i] - my) * (y[i] - my);
        }
        EXPECT_NEAR(pearson(x, y), sxy / std::sqrt(sxx * syy), 1e-12);
    }
}

TEST(Pearson, AffineInvarianceAndAntisymmetry) {
    Rng rng(107);
    const auto x = random_values(rng, 25);
    const auto y = random_values(rng, 25);
    const double r = pearson(x, y);
    std::vector<double> scaled = x;
    for (auto& v : scaled) v = 3.0 * v + 10.0;
    EXPECT_NEAR(pearson(scaled, y), r, 1e-12);
    std::vector<double> negated = y;
    for (auto& v : negated) v = -v;
    EXPECT_NEAR(pearson(x, negated), -r, 1e-12);
}

TEST(Pearson, RejectsConstantAndShortInputs) {
    EXPECT_THROW(pearson({1, 1, 1}, {1, 2, 3}), undefined_metric_error);
    EXPECT_THROW(pearson({1, 2}, {1, 2}), undefined_metric_error);
    EXPECT_THROW(pearson({1, 2, 3}, {1, 2}), std::invalid_argument);
}

TEST(PearsonPValue, KnownValues) {
    // Perfect correlation: p = 0 at any df.
    EXPECT_DOUBLE_EQ(pearson_p_value(1.0, 10), 0.0);
    // r = 0: p = 1.
    EXPECT_NEAR(pearson_p_value(0.0, 10), 1.0, 1e-12);
    // Larger samples make the same r more surprising.
    EXPECT_LT(pearson_p_value(0.5, 100), pearson_p_value(0.5, 10));
}

TEST(FdrAdjust, HandComputedStepUp) {
    const auto adjusted = fdr_adjust({0.01, 0.02, 0.03, 0.04});
    ASSERT_EQ(adjusted.size(), 4u);
    for (double v : adjusted) EXPECT_DOUBLE_EQ(v, 0.04);
}

TEST(FdrAdjust, TrivialCases) {
    EXPECT_EQ(fdr_adjust({0.37}), std::vector<double>{0.37});
    const auto ones = fdr_adjust({1.0, 1.0, 1.0});
    for (double v : ones) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(FdrAdjust, MatchesBruteForceReference) {
    Rng rng(113);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 1 + rng.below(50);
        std::vector<double> p;
        for (std::size_t i = 0; i < m; ++i) p.push_back(rng.uniform() * 0.999 + 0.001);
        const auto adjusted = fdr_adjust(p);

        // Reference: sort, take min over higher ranks, restore.
        std::vector<std::size_t> order(m);
        for (std::size_t i = 0; i < m; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
        for (std::size_t rank = 0; rank < m; ++rank) {
            double best = 1.0;
            for (std::size_t j = rank; j < m; ++j) {
                best = std::min(best, std::min(1.0, p[order[j]] * static_cast<double>(m) /
                                                        static_cast<double>(j + 1)));
            }
            EXPECT_NEAR(adjusted[order[rank]], best, 1e-12);
        }

        // Adjusted values dominate the raw ones and are monotone in rank.
        for (std::size_t i = 0; i < m; ++i) EXPECT_GE(adjusted[i] + 1e-15, p[i]);
        for (std::size_t i = 1; i < m; ++i) {
            EXPECT_GE(adjusted[order[i]] + 1e-15, adjusted[order[i - 1]]);
        }
    }
}

TEST(FdrAdjust, RejectsOutOfRange) {
    EXPECT_THROW(fdr_adjust({0.0}), std::invalid_argument);
    EXPECT_THROW(fdr_adjust({1.5}), std::invalid_argument);
    EXPECT_THROW(fdr_adjust({-0.1}), std::invalid_argument);
}
