#pragma once

// Latency / security / cost model of a DPoS channel, the weighted utility
// over them, the closed-form block size for a fixed validator set, the greedy
// configuration search (BCO) and an exhaustive grid search used as its oracle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "edgechain/error.hpp"

namespace edgechain::chain {

struct ValidatorProfile {
    int id = 0;
    double compute = 1.0;  // x_i, compute units/s
    double price = 0.0;    // rho_i, currency per compute unit
    double cost = 0.0;     // c_i, currency paid to the validator

    bool operator==(const ValidatorProfile&) const = default;
};

struct ChainParams {
    double tx_size_bits = 500.0;       // B
    double workload = 100.0;           // K, compute units per block verification
    double feedback_bits = 5e5;        // O
    double downlink_bps = 1.2e6;       // r_d
    double uplink_bps = 1.3e6;         // r_u
    double psi = 1e-6;                 // s per bit per validator
    double theta = 1.0;
    double q = 4.0;                    // network-scale exponent
    int min_validators = 1;            // v
    int max_validators = 21;           // M
    int min_block_size = 1;            // t
    int max_block_size = 20;           // chi

    bool operator==(const ChainParams&) const = default;
};

struct MetricWeights {
    double alpha = 1.0 / 3.0;  // latency
    double beta = 1.0 / 3.0;   // security
    double gamma = 1.0 / 3.0;  // cost

    bool operator==(const MetricWeights&) const = default;
};

inline constexpr double kWeightSumTolerance = 1e-12;

/// Maxima used to bring L, eta and C onto a common scale.
struct NormalizationBounds {
    double latency = 1.0;   // l_m
    double security = 1.0;  // eta_m
    double cost = 1.0;      // c_m
};

struct ChainConfig {
    int m = 0;
    int n = 0;
    std::vector<int> validator_ids;
    double latency = 0.0;
    double security = 0.0;
    double cost = 0.0;
    double utility = 0.0;
};

inline void validate(const ChainParams& p) {
    const double positives[] = {p.tx_size_bits, p.workload, p.feedback_bits, p.downlink_bps,
                                p.uplink_bps,   p.psi,      p.theta};
    for (double v : positives) {
        if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorKind::InvalidInput, "chain parameters must be positive and finite");
    }
    if (!(p.q >= 2.0)) fail(ErrorKind::InvalidInput, "network-scale exponent q must be >= 2");
    if (p.min_validators < 1 || p.min_validators > p.max_validators) {
        fail(ErrorKind::InvalidInput, "validator bounds must satisfy 1 <= v <= M");
    }
    if (p.min_block_size < 1 || p.min_block_size > p.max_block_size) {
        fail(ErrorKind::InvalidInput, "block size bounds must satisfy 1 <= t <= chi");
    }
}

inline void validate(const MetricWeights& w) {
    if (w.alpha < 0.0 || w.beta < 0.0 || w.gamma < 0.0) fail(ErrorKind::InvalidInput, "metric weights must be >= 0");
    if (std::abs(w.alpha + w.beta + w.gamma - 1.0) > kWeightSumTolerance) {
        fail(ErrorKind::InvalidInput, "metric weights must sum to 1");
    }
}

/// c_i >= rho_i * x_i (relative slack of 1e-12 for values read back from text).
inline bool satisfies_payment_constraint(const ValidatorProfile& v) noexcept {
    const double floor = v.price * v.compute;
    return v.cost >= floor - 1e-12 * std::abs(floor);
}

inline double latency(const ChainParams& p, std::span<const ValidatorProfile> selected, double n) {
    if (selected.empty()) fail(ErrorKind::InvalidInput, "latency needs at least one selected validator");
    double slowest = 0.0;
    for (const auto& v : selected) {
        if (!(v.compute > 0.0)) fail(ErrorKind::InvalidInput, "validator compute must be positive");
        slowest = std::max(slowest, p.workload / v.compute);
    }
    const double block_bits = n * p.tx_size_bits;
    const auto m = static_cast<double>(selected.size());
    return block_bits / p.downlink_bps + slowest + p.psi * block_bits * m + p.feedback_bits / p.uplink_bps;
}

inline double security(const ChainParams& p, int m) {
    if (m < 1) fail(ErrorKind::InvalidInput, "security needs m >= 1");
    return p.theta * std::pow(static_cast<double>(m), p.q);
}

inline double cost(std::span<const ValidatorProfile> selected, double n) {
    if (!(n >= 1.0)) fail(ErrorKind::InvalidInput, "cost needs n >= 1");
    double total = 0.0;
    for (const auto& v : selected) {
        if (!satisfies_payment_constraint(v)) {
            fail(ErrorKind::ConstraintViolation,
                 "validator " + std::to_string(v.id) + " is paid less than its compute bill (c_i < rho_i * x_i)");
        }
        total += v.cost;
    }
    return total / n;
}

/// Lower is better.
inline double utility(double latency_s, double security_level, double cost_per_tx, const MetricWeights& w,
                      const NormalizationBounds& b) {
    if (!(security_level > 0.0)) fail(ErrorKind::InvalidInput, "utility needs a positive security level");
    if (!(b.latency > 0.0) || !(b.security > 0.0) || !(b.cost > 0.0)) {
        fail(ErrorKind::InvalidInput, "normalization bounds must be positive");
    }
    return w.alpha * latency_s / b.latency + w.beta * b.security / security_level + w.gamma * cost_per_tx / b.cost;
}

/// Weights with the normalisation folded in, so that
/// U = a*L + b/eta + g*C matches the unnormalised objective used for the
/// block-size derivative and the greedy gain test.
struct EffectiveWeights {
    double latency = 0.0;
    double security = 0.0;
    double cost = 0.0;
};

inline EffectiveWeights effective_weights(const MetricWeights& w, const NormalizationBounds& b) noexcept {
    return {w.alpha / b.latency, w.beta * b.security, w.gamma / b.cost};
}

/// Verification-time order: fastest first (K/x ascending), ties by id.
inline std::vector<ValidatorProfile> order_validators(std::vector<ValidatorProfile> validators, const ChainParams& p) {
    if (validators.empty()) fail(ErrorKind::InvalidInput, "no validators to order");
    std::stable_sort(validators.begin(), validators.end(), [&p](const ValidatorProfile& a, const ValidatorProfile& b) {
        const double ta = p.workload / a.compute;
        const double tb = p.workload / b.compute;
        if (ta != tb) return ta < tb;
        return a.id < b.id;
    });
    return validators;
}

/// l_m = L at (M, chi) with the slowest validator in the pool; eta_m = theta*M^q;
/// c_m = C at (M, t) with the M most expensive validators.
inline NormalizationBounds default_bounds(const ChainParams& p, std::span<const ValidatorProfile> pool) {
    validate(p);
    if (pool.empty()) fail(ErrorKind::InvalidInput, "no validators for normalization bounds");
    const int big_m = p.max_validators;
    double slowest = 0.0;
    for (const auto& v : pool) slowest = std::max(slowest, p.workload / v.compute);
    const double block_bits = p.max_block_size * p.tx_size_bits;
    NormalizationBounds b;
    b.latency = block_bits / p.downlink_bps + slowest + p.psi * block_bits * big_m + p.feedback_bits / p.uplink_bps;
    b.security = security(p, big_m);
    std::vector<double> costs;
    for (const auto& v : pool) costs.push_back(v.cost);
    std::sort(costs.begin(), costs.end(), std::greater<>());
    costs.resize(std::min<std::size_t>(costs.size(), static_cast<std::size_t>(big_m)));
    b.cost = std::accumulate(costs.begin(), costs.end(), 0.0) / p.min_block_size;
    if (!(b.cost > 0.0)) b.cost = 1.0;  // all validators free: the cost term is identically zero
    return b;
}

struct BlockSizeSolution {
    double n = 0.0;         // continuous stationary point, before rounding/clamping
    bool interior = true;   // false when alpha = 0 (no stationary point; n is chi)
};

/// Positive root of d/dn [a*L + b/eta + g*C] = 0 for the first m validators:
///   n = sqrt(g * sum c_i / (a * (B/r_d + psi*B*m)))
inline BlockSizeSolution closed_form_n(const ChainParams& p, const MetricWeights& w, const NormalizationBounds& b,
                                       std::span<const ValidatorProfile> selected) {
    if (selected.empty()) fail(ErrorKind::InvalidInput, "closed-form block size needs validators");
    if (w.alpha <= 0.0) return {static_cast<double>(p.max_block_size), false};
    const auto ew = effective_weights(w, b);
    double paid = 0.0;
    for (const auto& v : selected) paid += v.cost;
    const auto m = static_cast<double>(selected.size());
    const double marginal_latency = p.tx_size_bits / p.downlink_bps + p.psi * p.tx_size_bits * m;
    return {std::sqrt(ew.cost * paid / (ew.latency * marginal_latency)), true};
}

/// Nearest integer, halves rounded up.
inline std::int64_t nint(double x) noexcept { return static_cast<std::int64_t>(std::floor(x + 0.5)); }

inline int clamp_block_size(const ChainParams& p, const BlockSizeSolution& s) noexcept {
    if (!s.interior) return p.max_block_size;
    const std::int64_t r = nint(s.n);
    if (r < p.min_block_size) return p.min_block_size;
    if (r > p.max_block_size) return p.max_block_size;
    return static_cast<int>(r);
}

/// Metrics and utility for the first m ranked validators and block size n.
inline ChainConfig evaluate(const ChainParams& p, const MetricWeights& w, const NormalizationBounds& b,
                            std::span<const ValidatorProfile> ranked, int m, int n) {
    if (m < 1 || static_cast<std::size_t>(m) > ranked.size()) {
        fail(ErrorKind::InvalidInput, "m = " + std::to_string(m) + " is outside the validator pool");
    }
    auto selected = ranked.first(static_cast<std::size_t>(m));
    ChainConfig c;
    c.m = m;
    c.n = n;
    for (const auto& v : selected) c.validator_ids.push_back(v.id);
    c.latency = latency(p, selected, n);
    c.security = security(p, m);
    c.cost = cost(selected, n);
    c.utility = utility(c.latency, c.security, c.cost, w, b);
    return c;
}

/// Objective pieces used by the greedy gain test.
struct ObjectiveTerms {
    double security_term = 0.0;      // b / eta
    double latency_cost_term = 0.0;  // a*L + g*C
};

inline ObjectiveTerms objective_terms(const ChainConfig& c, const EffectiveWeights& ew) noexcept {
    return {ew.security / c.security, ew.latency * c.latency + ew.cost * c.cost};
}

struct BcoStep {
    int iteration = 0;
    ChainConfig candidate;  // configuration with m validators
    bool accepted = false;
};

struct BcoResult {
    ChainConfig config;
    std::vector<BcoStep> trace;
    int iterations = 0;
};

namespace detail {

inline std::vector<ValidatorProfile> prepare_pool(const ChainParams& p, const MetricWeights& w,
                                                  std::vector<ValidatorProfile> validators) {
    validate(p);
    validate(w);
    if (validators.size() < static_cast<std::size_t>(p.min_validators) + 1) {
        fail(ErrorKind::Infeasible, "need at least v+1 = " + std::to_string(p.min_validators + 1) +
                                        " validators, have " + std::to_string(validators.size()));
    }
    for (const auto& v : validators) {
        if (!(v.compute > 0.0)) fail(ErrorKind::InvalidInput, "validator compute must be positive");
        if (!satisfies_payment_constraint(v)) {
            fail(ErrorKind::ConstraintViolation, "validator " + std::to_string(v.id) + " violates c_i >= rho_i * x_i");
        }
    }
    return order_validators(std::move(validators), p);
}

inline int upper_validator_count(const ChainParams& p, std::size_t pool) noexcept {
    return std::min(p.max_validators, static_cast<int>(pool));
}

}  // namespace detail

/// Greedy search: validators are added fastest-first; for each m the block
/// size is the rounded, clamped closed-form n; the search stops at the first
/// m whose security gain is smaller than its latency+cost increase.
inline BcoResult bco(const ChainParams& p, const MetricWeights& w, std::vector<ValidatorProfile> validators,
                     const NormalizationBounds& b) {
    const auto ranked = detail::prepare_pool(p, w, std::move(validators));
    const std::span<const ValidatorProfile> pool(ranked);
    const auto ew = effective_weights(w, b);
    const int upper = detail::upper_validator_count(p, ranked.size());

    auto config_for = [&](int m) {
        const auto sel = pool.first(static_cast<std::size_t>(m));
        return evaluate(p, w, b, pool, m, clamp_block_size(p, closed_form_n(p, w, b, sel)));
    };

    BcoResult result;
    ChainConfig previous = config_for(p.min_validators);
    for (int m = p.min_validators + 1; m <= upper; ++m) {
        ChainConfig current = config_for(m);
        ++result.iterations;
        const auto before = objective_terms(previous, ew);
        const auto after = objective_terms(current, ew);
        const double security_gain = before.security_term - after.security_term;
        const double latency_cost_increase = after.latency_cost_term - before.latency_cost_term;
        const bool stop = security_gain < latency_cost_increase;
        result.trace.push_back({result.iterations, current, !stop});
        if (stop) {
            result.config = previous;
            return result;
        }
        previous = std::move(current);
    }
    result.config = previous;
    return result;
}

struct ExhaustiveResult {
    ChainConfig config;
    std::size_t evaluations = 0;
};

/// Grid search over m in [v, M] (ranked prefixes) and n in [t, chi]; ties go to
/// the smaller m, then the smaller n.
inline ExhaustiveResult exhaustive_search(const ChainParams& p, const MetricWeights& w,
                                          std::vector<ValidatorProfile> validators, const NormalizationBounds& b) {
    const auto ranked = detail::prepare_pool(p, w, std::move(validators));
    const std::span<const ValidatorProfile> pool(ranked);
    const int upper = detail::upper_validator_count(p, ranked.size());
    ExhaustiveResult best;
    best.config.utility = std::numeric_limits<double>::infinity();
    for (int m = p.min_validators; m <= upper; ++m) {
        for (int n = p.min_block_size; n <= p.max_block_size; ++n) {
            auto c = evaluate(p, w, b, pool, m, n);
            ++best.evaluations;
            if (c.utility < best.config.utility) best.config = std::move(c);
        }
    }
    return best;
}

}  // namespace edgechain::chain
