#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>

#include "edgechain/chain_optimizer.hpp"

using namespace edgechain;
using namespace edgechain::chain;

namespace {

std::vector<ValidatorProfile> random_pool(std::mt19937_64& rng, int count) {
    std::uniform_real_distribution<double> compute(20, 200), price(0.01, 0.1), markup(0, 0.5);
    std::vector<ValidatorProfile> pool;
    for (int i = 1; i <= count; ++i) {
        const double x = compute(rng), rho = price(rng);
        pool.push_back({i, x, rho, rho * x * (1 + markup(rng))});
    }
    return pool;
}

MetricWeights random_weights(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.05, 1);
    const double a = u(rng), b = u(rng), g = u(rng);
    const double s = a + b + g;
    MetricWeights w{a / s, b / s, 0};
    w.gamma = 1.0 - w.alpha - w.beta;
    return w;
}

ChainParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0, 1);
    ChainParams p;
    p.tx_size_bits = 100 + 2000 * u(rng);
    p.workload = 20 + 200 * u(rng);
    p.downlink_bps = 1e5 + 2e6 * u(rng);
    p.uplink_bps = 1e5 + 2e6 * u(rng);
    p.psi = 1e-7 + 1e-5 * u(rng);
    p.q = 2 + 3 * u(rng);
    return p;
}

// a*L + g*C as a continuous function of n for a fixed validator set.
double continuous_objective(const ChainParams& p, const EffectiveWeights& ew, std::span<const ValidatorProfile> sel,
                            double n) {
    double paid = 0;
    for (const auto& v : sel) paid += v.cost;
    return ew.latency * latency(p, sel, n) + ew.cost * paid / n;
}

}  // namespace

TEST(Metrics, LatencyHandValue) {
    ChainParams p;
    std::vector<ValidatorProfile> sel{{1, 50, 0.01, 1}, {2, 100, 0.01, 1}, {3, 80, 0.01, 1}, {4, 60, 0.01, 1}};
    // 5000/1.2e6 + 100/50 + 1e-6*5000*4 + 5e5/1.3e6
    EXPECT_NEAR(latency(p, sel, 10), 2.40878205128205, 1e-13);
}

TEST(Metrics, SecurityAndCost) {
    ChainParams p;
    EXPECT_DOUBLE_EQ(security(p, 8), 4096.0);
    p.theta = 2.5;
    p.q = 2;
    EXPECT_DOUBLE_EQ(security(p, 3), 22.5);
    std::vector<ValidatorProfile> sel{{1, 10, 0.5, 6}, {2, 10, 0.1, 4}};
    EXPECT_DOUBLE_EQ(cost(sel, 4), 2.5);
    sel[1].cost = 0.5;
    try {
        cost(sel, 4);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ConstraintViolation);
    }
    EXPECT_THROW(security(p, 0), Error);
}

TEST(Metrics, UtilityIsOneAtNormalizationPoint) {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 100; ++i) {
        const auto w = random_weights(rng);
        NormalizationBounds b{1.0 + static_cast<double>(rng() % 50), 1.0 + static_cast<double>(rng() % 1000), 0.5 + static_cast<double>(rng() % 7)};
        EXPECT_NEAR(utility(b.latency, b.security, b.cost, w, b), 1.0, 1e-12);
    }
}

TEST(Metrics, WeightValidation) {
    EXPECT_THROW(validate(MetricWeights{0.5, 0.3, 0.3}), Error);
    EXPECT_THROW(validate(MetricWeights{-0.1, 0.6, 0.5}), Error);
    EXPECT_NO_THROW(validate(MetricWeights{0.7, 0.0, 0.3}));
}

TEST(Metrics, Monotonicity) {
    std::mt19937_64 rng(37);
    for (int i = 0; i < 300; ++i) {
        const auto p = random_params(rng);
        const auto ranked = order_validators(random_pool(rng, 21), p);
        const std::span<const ValidatorProfile> pool(ranked);
        const int m = 1 + static_cast<int>(rng() % 20);
        const double n = 1 + static_cast<double>(rng() % 19);
        EXPECT_LT(latency(p, pool.first(m), n), latency(p, pool.first(m), n + 1));
        EXPECT_LT(latency(p, pool.first(m), n), latency(p, pool.first(m + 1), n));
        EXPECT_GT(cost(pool.first(m), n), cost(pool.first(m), n + 1));
        EXPECT_LE(cost(pool.first(m), n), cost(pool.first(m + 1), n));
        EXPECT_LT(security(p, m), security(p, m + 1));
    }
}

TEST(ClosedFormN, HandValue) {
    ChainParams p;
    p.tx_size_bits = 1000;
    p.downlink_bps = 1000;
    p.psi = 1e-3;
    std::vector<ValidatorProfile> sel{{1, 10, 0.1, 8}};
    const NormalizationBounds b{1, 1, 1};
    // a = g = 0.5: n = sqrt(8 / (1 + 1)) = 2
    const auto s = closed_form_n(p, MetricWeights{0.5, 0, 0.5}, b, sel);
    EXPECT_TRUE(s.interior);
    EXPECT_NEAR(s.n, 2.0, 1e-15);
    const auto edge = closed_form_n(p, MetricWeights{0, 0.5, 0.5}, b, sel);
    EXPECT_FALSE(edge.interior);
    EXPECT_EQ(clamp_block_size(p, edge), p.max_block_size);
}

TEST(ClosedFormN, StationaryOnRandomDraws) {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 100; ++i) {
        const auto p = random_params(rng);
        const auto w = random_weights(rng);
        const auto pool = order_validators(random_pool(rng, 21), p);
        const auto b = default_bounds(p, pool);
        const auto ew = effective_weights(w, b);
        const auto sel = std::span<const ValidatorProfile>(pool).first(1 + rng() % 21);
        const double n = closed_form_n(p, w, b, sel).n;
        const double h = 1e-4 * n;
        const double d = (continuous_objective(p, ew, sel, n + h) - continuous_objective(p, ew, sel, n - h)) / (2 * h);
        const double scale = continuous_objective(p, ew, sel, n) / n;
        EXPECT_LT(std::abs(d) / scale, 1e-6);
        // It is a minimum: the objective rises on both sides.
        EXPECT_GT(continuous_objective(p, ew, sel, n * 1.05), continuous_objective(p, ew, sel, n));
        EXPECT_GT(continuous_objective(p, ew, sel, n * 0.95), continuous_objective(p, ew, sel, n));
    }
}

TEST(Nint, HalvesRoundUp) {
    EXPECT_EQ(nint(2.5), 3);
    EXPECT_EQ(nint(2.4999), 2);
    EXPECT_EQ(nint(0.5), 1);
    EXPECT_EQ(nint(-0.5), 0);
    ChainParams p;
    EXPECT_EQ(clamp_block_size(p, {0.2, true}), 1);
    EXPECT_EQ(clamp_block_size(p, {55.0, true}), 20);
    EXPECT_EQ(clamp_block_size(p, {7.5, true}), 8);
}

TEST(OrderValidators, FastestFirstTiesById) {
    ChainParams p;
    std::vector<ValidatorProfile> v{{3, 10, 0, 0}, {1, 20, 0, 0}, {2, 10, 0, 0}};
    const auto r = order_validators(v, p);
    EXPECT_EQ(r[0].id, 1);
    EXPECT_EQ(r[1].id, 2);
    EXPECT_EQ(r[2].id, 3);
}

TEST(Bco, InfeasibleWithoutEnoughValidators) {
    ChainParams p;
    p.min_validators = 3;
    std::mt19937_64 rng(1);
    const auto pool = random_pool(rng, 3);
    try {
        bco(p, {}, pool, default_bounds(p, pool));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Infeasible);
    }
}

TEST(Bco, SingleStepWhenLowerBoundIsMMinusOne) {
    ChainParams p;
    p.min_validators = 20;
    std::mt19937_64 rng(2);
    const auto pool = random_pool(rng, 21);
    const auto r = bco(p, {}, pool, default_bounds(p, pool));
    EXPECT_EQ(r.iterations, 1);
    EXPECT_TRUE(r.config.m == 20 || r.config.m == 21);
}

TEST(Bco, RespectsBoundsAndIterationLimit) {
    std::mt19937_64 rng(43);
    for (int i = 0; i < 200; ++i) {
        const auto p = random_params(rng);
        const auto w = random_weights(rng);
        const auto pool = random_pool(rng, 5 + static_cast<int>(rng() % 30));
        const auto b = default_bounds(p, pool);
        const auto r = bco(p, w, pool, b);
        EXPECT_LE(r.iterations, p.max_validators);
        EXPECT_GE(r.config.m, p.min_validators);
        EXPECT_LE(r.config.m, std::min<int>(p.max_validators, static_cast<int>(pool.size())));
        EXPECT_GE(r.config.n, p.min_block_size);
        EXPECT_LE(r.config.n, p.max_block_size);
        EXPECT_EQ(r.config.validator_ids.size(), static_cast<std::size_t>(r.config.m));
        const auto x = exhaustive_search(p, w, pool, b);
        EXPECT_GE(r.config.utility, x.config.utility * (1 - 1e-12));
    }
}

TEST(Exhaustive, GridSizeAndRescan) {
    std::mt19937_64 rng(47);
    ChainParams p;
    const auto pool = random_pool(rng, 21);
    const auto b = default_bounds(p, pool);
    const MetricWeights w;
    const auto x = exhaustive_search(p, w, pool, b);
    EXPECT_EQ(x.evaluations, 420u);
    const auto ranked = order_validators(pool, p);
    for (int m = 1; m <= 21; ++m) {
        for (int n = 1; n <= 20; ++n) EXPECT_GE(evaluate(p, w, b, ranked, m, n).utility, x.config.utility);
    }
}

// Greedy can miss the grid optimum when U(m) is not unimodal or when rounding
// the continuous n is not the best integer. Record how often on random draws.
TEST(Bco, OptimalityGapOnRandomDraws) {
    std::mt19937_64 rng(53);
    int mismatches = 0;
    double worst = 0;
    const int draws = 500;
    for (int i = 0; i < draws; ++i) {
        const auto p = random_params(rng);
        const auto w = random_weights(rng);
        const auto pool = random_pool(rng, 21);
        const auto b = default_bounds(p, pool);
        const double g = bco(p, w, pool, b).config.utility;
        const double x = exhaustive_search(p, w, pool, b).config.utility;
        if (g != x) {
            ++mismatches;
            worst = std::max(worst, (g - x) / x);
        }
    }
    std::cout << "bco vs exhaustive: " << mismatches << "/" << draws << " differ, worst relative gap " << worst << '\n';
    SUCCEED();
}
