#pragma once

// Blockchain-manager side: transaction intake, channel allocation by urgency
// and security need, per-channel configuration, and block formation.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edgechain/chain_optimizer.hpp"
#include "edgechain/error.hpp"
#include "edgechain/priority_queue.hpp"
#include "edgechain/signal_monitor.hpp"

namespace edgechain::ledger {

using queueing::Urgency;

enum class TxKind { EmergencyNotification, RawData, FeatureSummary, LegalDocument };
enum class SecurityNeed { Standard, High };

constexpr std::string_view to_string(TxKind k) noexcept {
    switch (k) {
        case TxKind::EmergencyNotification: return "emergency-notification";
        case TxKind::RawData:               return "raw-data";
        case TxKind::FeatureSummary:        return "feature-summary";
        case TxKind::LegalDocument:         return "legal-document";
    }
    return "?";
}

constexpr std::string_view to_string(SecurityNeed s) noexcept {
    return s == SecurityNeed::High ? "high" : "standard";
}

inline std::optional<SecurityNeed> parse_security_need(std::string_view text) noexcept {
    if (text == "standard") return SecurityNeed::Standard;
    if (text == "high") return SecurityNeed::High;
    return std::nullopt;
}

struct Transaction {
    std::uint64_t id = 0;
    int entity_id = 0;
    TxKind kind = TxKind::FeatureSummary;
    Urgency urgency = Urgency::Normal;
    SecurityNeed security_need = SecurityNeed::Standard;
    double size_bits = 0.0;
    double created_at = 0.0;
};

inline void validate(const Transaction& tx) {
    if (!(tx.size_bits > 0.0)) fail(ErrorKind::InvalidInput, "transaction size must be positive");
    if (tx.kind == TxKind::EmergencyNotification && tx.urgency != Urgency::Urgent) {
        fail(ErrorKind::InvalidInput, "emergency notifications must be urgent");
    }
}

enum class ChannelMode { Restricted, FullyRestricted, Optimized, Fixed };

constexpr std::string_view to_string(ChannelMode m) noexcept {
    switch (m) {
        case ChannelMode::Restricted:      return "restricted";
        case ChannelMode::FullyRestricted: return "fully-restricted";
        case ChannelMode::Optimized:       return "optimized";
        case ChannelMode::Fixed:           return "fixed";
    }
    return "?";
}

inline std::optional<ChannelMode> parse_channel_mode(std::string_view text) noexcept {
    if (text == "restricted") return ChannelMode::Restricted;
    if (text == "fully-restricted") return ChannelMode::FullyRestricted;
    if (text == "optimized") return ChannelMode::Optimized;
    if (text == "fixed") return ChannelMode::Fixed;
    return std::nullopt;
}

inline constexpr int kUrgentChannel = 1;
inline constexpr int kSecureChannel = 2;
inline constexpr int kNormalChannel = 3;

/// What an operator asks for; bind_channel_config turns it into a Channel.
struct ChannelSpec {
    int id = kNormalChannel;
    ChannelMode mode = ChannelMode::Optimized;
    chain::MetricWeights weights;
    int fixed_m = 0;  // Fixed mode only
    int fixed_n = 0;
    std::vector<int> validator_ids;  // empty: whole pool

    bool operator==(const ChannelSpec&) const = default;
};

struct Channel {
    int id = 0;
    ChannelMode mode = ChannelMode::Optimized;
    chain::ChainConfig config;
    chain::MetricWeights weights;
    std::vector<chain::BcoStep> trace;  // Optimized mode only
};

/// Urgent -> 1; high security (not urgent) -> 2; everything else -> 3.
inline int canonical_channel(Urgency urgency, SecurityNeed need) noexcept {
    if (urgency == Urgency::Urgent) return kUrgentChannel;
    if (need == SecurityNeed::High) return kSecureChannel;
    return kNormalChannel;
}

inline int allocate_channel(const Transaction& tx, std::span<const Channel> channels) {
    const int target = canonical_channel(tx.urgency, tx.security_need);
    for (int required : {kUrgentChannel, kSecureChannel, kNormalChannel}) {
        bool found = false;
        for (const auto& c : channels) found = found || c.id == required;
        if (!found) fail(ErrorKind::Configuration, "canonical channel " + std::to_string(required) + " is not configured");
    }
    return target;
}

/// Restricted pins m = v, FullyRestricted pins m = min(M, pool); both take the
/// closed-form block size. Optimized runs the greedy search, Fixed echoes the
/// operator's (m, n).
inline Channel bind_channel_config(const ChannelSpec& spec, const chain::ChainParams& params,
                                   std::vector<chain::ValidatorProfile> pool, const chain::NormalizationBounds& bounds) {
    if (pool.empty()) fail(ErrorKind::Infeasible, "channel " + std::to_string(spec.id) + " has no validators");
    Channel ch;
    ch.id = spec.id;
    ch.mode = spec.mode;
    ch.weights = spec.weights;
    const auto ranked = chain::order_validators(std::move(pool), params);
    const std::span<const chain::ValidatorProfile> view(ranked);

    auto pinned = [&](int m) {
        if (m < 1 || static_cast<std::size_t>(m) > ranked.size()) {
            fail(ErrorKind::Infeasible, "channel " + std::to_string(spec.id) + " needs " + std::to_string(m) +
                                            " validators, pool has " + std::to_string(ranked.size()));
        }
        const auto sol = chain::closed_form_n(params, spec.weights, bounds, view.first(static_cast<std::size_t>(m)));
        return chain::evaluate(params, spec.weights, bounds, view, m, chain::clamp_block_size(params, sol));
    };

    switch (spec.mode) {
        case ChannelMode::Restricted:
            chain::validate(params);
            chain::validate(spec.weights);
            ch.config = pinned(params.min_validators);
            break;
        case ChannelMode::FullyRestricted:
            chain::validate(params);
            chain::validate(spec.weights);
            ch.config = pinned(std::min(params.max_validators, static_cast<int>(ranked.size())));
            break;
        case ChannelMode::Optimized: {
            auto r = chain::bco(params, spec.weights, ranked, bounds);
            ch.config = std::move(r.config);
            ch.trace = std::move(r.trace);
            break;
        }
        case ChannelMode::Fixed:
            if (spec.fixed_m < 1 || spec.fixed_n < 1) {
                fail(ErrorKind::Configuration, "fixed channel " + std::to_string(spec.id) + " needs m >= 1 and n >= 1");
            }
            if (static_cast<std::size_t>(spec.fixed_m) > ranked.size()) {
                fail(ErrorKind::Infeasible, "fixed channel " + std::to_string(spec.id) + " asks for more validators than the pool has");
            }
            ch.config = chain::evaluate(params, spec.weights, bounds, view, spec.fixed_m, spec.fixed_n);
            break;
    }
    return ch;
}

/// Priority-then-FIFO intake queue for one channel.
class ChannelQueue {
public:
    struct Entry {
        int rank = 0;               // smaller is served first
        std::uint64_t sequence = 0; // arrival order
        Transaction tx;

        bool operator<(const Entry& other) const noexcept {
            if (rank != other.rank) return rank < other.rank;
            return sequence < other.sequence;
        }
    };

    void push(const Transaction& tx, int rank) { entries_.insert({rank, next_sequence_++, tx}); }

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    /// Creation time of the longest-waiting transaction.
    std::optional<double> oldest_created_at() const noexcept {
        std::optional<double> oldest;
        for (const auto& e : entries_) {
            if (!oldest || e.tx.created_at < *oldest) oldest = e.tx.created_at;
        }
        return oldest;
    }

    Transaction pop_front() {
        auto node = entries_.extract(entries_.begin());
        return std::move(node.value().tx);
    }

private:
    std::multiset<Entry> entries_;
    std::uint64_t next_sequence_ = 0;
};

struct Block {
    std::uint64_t id = 0;
    int channel_id = 0;
    std::vector<Transaction> transactions;
    double formed_at = 0.0;
};

/// Dequeues up to the channel's n transactions; nullopt when the queue is empty.
inline std::optional<Block> form_block(ChannelQueue& queue, const Channel& channel, double now,
                                       std::uint64_t block_id = 0) {
    if (queue.empty()) return std::nullopt;
    if (channel.config.n < 1) fail(ErrorKind::Configuration, "channel " + std::to_string(channel.id) + " is not bound");
    Block block{block_id, channel.id, {}, now};
    const auto take = std::min<std::size_t>(queue.size(), static_cast<std::size_t>(channel.config.n));
    block.transactions.reserve(take);
    for (std::size_t i = 0; i < take; ++i) block.transactions.push_back(queue.pop_front());
    return block;
}

struct DispatchRecord {
    std::uint64_t tx_id = 0;
    int entity_id = 0;
    int channel_id = 0;
    double enqueued_at = 0.0;
    std::uint64_t block_id = 0;
    double formed_at = 0.0;
};

/// Single-writer BM state: accepted transactions sit in exactly one channel
/// queue or one formed block.
class BMState {
public:
    explicit BMState(std::vector<Channel> channels) : channels_(std::move(channels)) {
        for (const auto& c : channels_) queues_[c.id];
        for (int required : {kUrgentChannel, kSecureChannel, kNormalChannel}) {
            if (!queues_.contains(required)) {
                fail(ErrorKind::Configuration, "canonical channel " + std::to_string(required) + " is not configured");
            }
        }
    }

    const std::vector<Channel>& channels() const noexcept { return channels_; }

    const Channel& channel(int id) const {
        for (const auto& c : channels_) {
            if (c.id == id) return c;
        }
        fail(ErrorKind::Configuration, "unknown channel " + std::to_string(id));
    }

    /// Queues the transaction and returns its channel.
    int accept(const Transaction& tx, int rank, double now) {
        validate(tx);
        const int ch = allocate_channel(tx, channels_);
        queues_.at(ch).push(tx, rank);
        enqueued_at_[tx.id] = now;
        ++accepted_;
        return ch;
    }

    const ChannelQueue& queue(int channel_id) const { return queues_.at(channel_id); }

    /// Forms a block only when the queue holds at least n transactions.
    std::optional<Block> form_if_full(int channel_id, double now) {
        const auto& ch = channel(channel_id);
        if (queues_.at(channel_id).size() < static_cast<std::size_t>(ch.config.n)) return std::nullopt;
        return flush(channel_id, now);
    }

    /// Forms a (possibly underfull) block from whatever is queued.
    std::optional<Block> flush(int channel_id, double now) {
        auto block = form_block(queues_.at(channel_id), channel(channel_id), now, next_block_id_);
        if (!block) return std::nullopt;
        ++next_block_id_;
        for (const auto& tx : block->transactions) {
            log_.push_back({tx.id, tx.entity_id, channel_id, enqueued_at_.at(tx.id), block->id, now});
            enqueued_at_.erase(tx.id);
        }
        in_blocks_ += block->transactions.size();
        return block;
    }

    std::size_t accepted() const noexcept { return accepted_; }
    std::size_t in_blocks() const noexcept { return in_blocks_; }
    std::size_t queued() const noexcept {
        std::size_t total = 0;
        for (const auto& [id, q] : queues_) total += q.size();
        return total;
    }
    const std::vector<DispatchRecord>& dispatch_log() const noexcept { return log_; }

private:
    std::vector<Channel> channels_;
    std::map<int, ChannelQueue> queues_;
    std::map<std::uint64_t, double> enqueued_at_;
    std::vector<DispatchRecord> log_;
    std::size_t accepted_ = 0;
    std::size_t in_blocks_ = 0;
    std::uint64_t next_block_id_ = 1;
};

/// Turns an edge share decision into chain transactions. Feature summaries
/// cost one transaction of size B; emergency payloads carry B bits per raw
/// window. Repeat notices produce nothing.
inline std::vector<Transaction> payload_transactions(const monitor::SharePayload& payload, int entity_id,
                                                     double tx_size_bits, double now, std::uint64_t& next_id) {
    std::vector<Transaction> out;
    switch (payload.kind) {
        case monitor::PayloadKind::EmergencyNotificationWithRaw: {
            const auto windows = std::max<std::size_t>(1, payload.raw.size());
            out.push_back({next_id++, entity_id, TxKind::EmergencyNotification, Urgency::Urgent,
                           SecurityNeed::Standard, tx_size_bits * static_cast<double>(windows), now});
            break;
        }
        case monitor::PayloadKind::FeaturesOnly:
            out.push_back({next_id++, entity_id, TxKind::FeatureSummary, Urgency::Normal, SecurityNeed::Standard,
                           tx_size_bits, now});
            break;
        case monitor::PayloadKind::PhysicianRepeatNotice:
            break;
    }
    return out;
}

}  // namespace edgechain::ledger
