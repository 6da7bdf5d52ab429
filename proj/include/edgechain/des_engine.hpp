#pragma once

// Seeded discrete-event simulation. run_queue_sim is the empirical
// counterpart of the closed-form sojourn times; run_pipeline_sim pushes
// transactions through BM service, channel queues, block formation and
// verification until commit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <string_view>
#include <tuple>
#include <vector>

#include "edgechain/chain_optimizer.hpp"
#include "edgechain/error.hpp"
#include "edgechain/ledger_channels.hpp"
#include "edgechain/priority_queue.hpp"

namespace edgechain::sim {

enum class EventKind { Arrival, ServiceStart, Preemption, ServiceComplete, BlockFormed, BlockCommitted };

constexpr std::string_view to_string(EventKind k) noexcept {
    switch (k) {
        case EventKind::Arrival:         return "arrival";
        case EventKind::ServiceStart:    return "service-start";
        case EventKind::Preemption:      return "preemption";
        case EventKind::ServiceComplete: return "service-complete";
        case EventKind::BlockFormed:     return "block-formed";
        case EventKind::BlockCommitted:  return "block-committed";
    }
    return "?";
}

struct SimEvent {
    double time = 0.0;
    EventKind kind = EventKind::Arrival;
    std::uint64_t subject = 0;  // transaction id, or block id for block events
    int owner = 0;              // entity id, or channel id for block events

    bool operator==(const SimEvent&) const = default;
};

struct SimConfig {
    std::uint64_t seed = 1;
    std::uint64_t max_served = 1'000'000;  // stop after this many service completions (0: no cap)
    double horizon = 0.0;                  // simulated seconds of arrivals (0: no limit)
    double warmup_fraction = 0.1;
    bool record_events = false;
};

inline void validate(const SimConfig& cfg) {
    if (cfg.max_served == 0 && !(cfg.horizon > 0.0)) {
        fail(ErrorKind::InvalidInput, "simulation needs a positive horizon or a served-transaction cap");
    }
    if (cfg.horizon < 0.0) fail(ErrorKind::InvalidInput, "simulation horizon must be >= 0");
    if (!(cfg.warmup_fraction >= 0.0 && cfg.warmup_fraction < 1.0)) {
        fail(ErrorKind::InvalidInput, "warmup fraction must lie in [0, 1)");
    }
}

/// Independent stream per (entity, purpose), derived from the master seed so
/// that adding an entity never shifts another entity's draws.
class RandomStream {
public:
    enum class Purpose : std::uint64_t { Interarrival = 1, Service = 2 };

    RandomStream(std::uint64_t master_seed, std::uint64_t entity, Purpose purpose)
        : engine_(mix(mix(master_seed) ^ mix(entity * 4 + static_cast<std::uint64_t>(purpose)))) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double exponential(double rate) noexcept { return -std::log1p(-uniform()) / rate; }

private:
    static std::uint64_t mix(std::uint64_t x) noexcept {  // splitmix64 finalizer
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 engine_;
};

struct Job {
    std::uint64_t id = 0;
    int entity_id = 0;
    int rank = 0;  // 0 is served first
    double arrival = 0.0;
    double remaining = 0.0;  // outstanding work, seconds
};

/// Single server, preemptive-resume across ranks, FIFO within a rank. A
/// preempted job goes back to the head of its rank and keeps its remaining work.
class PreemptiveServer {
public:
    explicit PreemptiveServer(int ranks) : waiting_(static_cast<std::size_t>(std::max(ranks, 1))) {}

    template <class Sink>
    void arrive(Job job, double now, Sink&& log) {
        if (!current_) {
            start(std::move(job), now, log);
            return;
        }
        if (job.rank < current_->rank) {
            current_->remaining = std::max(0.0, current_->remaining - (now - started_at_));
            log(SimEvent{now, EventKind::Preemption, current_->id, current_->entity_id});
            waiting_[static_cast<std::size_t>(current_->rank)].push_front(*current_);
            current_.reset();
            start(std::move(job), now, log);
            return;
        }
        waiting_[static_cast<std::size_t>(job.rank)].push_back(std::move(job));
    }

    /// Finishes the job in service and starts the next one, if any.
    template <class Sink>
    Job complete(double now, Sink&& log) {
        Job done = *current_;
        current_.reset();
        log(SimEvent{now, EventKind::ServiceComplete, done.id, done.entity_id});
        for (auto& lane : waiting_) {
            if (!lane.empty()) {
                Job next = std::move(lane.front());
                lane.pop_front();
                start(std::move(next), now, log);
                break;
            }
        }
        return done;
    }

    bool busy() const noexcept { return current_.has_value(); }
    const std::optional<Job>& in_service() const noexcept { return current_; }
    double completion_time() const noexcept { return started_at_ + current_->remaining; }
    std::uint64_t token() const noexcept { return token_; }

private:
    template <class Sink>
    void start(Job job, double now, Sink& log) {
        started_at_ = now;
        ++token_;
        log(SimEvent{now, EventKind::ServiceStart, job.id, job.entity_id});
        current_ = std::move(job);
    }

    std::vector<std::deque<Job>> waiting_;
    std::optional<Job> current_;
    double started_at_ = 0.0;
    std::uint64_t token_ = 0;
};

/// Min-heap of pending events ordered by (time, kind, subject, insertion).
template <class Payload>
class EventQueue {
public:
    struct Item {
        SimEvent event;
        Payload payload;
        std::uint64_t sequence = 0;
    };

    void push(const SimEvent& e, Payload p) { heap_.push({e, std::move(p), next_++}); }
    bool empty() const noexcept { return heap_.empty(); }
    Item pop() {
        Item top = heap_.top();
        heap_.pop();
        return top;
    }

private:
    struct Later {
        bool operator()(const Item& a, const Item& b) const noexcept {
            return std::make_tuple(a.event.time, static_cast<int>(a.event.kind), a.event.subject, a.sequence) >
                   std::make_tuple(b.event.time, static_cast<int>(b.event.kind), b.event.subject, b.sequence);
        }
    };
    std::priority_queue<Item, std::vector<Item>, Later> heap_;
    std::uint64_t next_ = 0;
};

struct EntityStats {
    int entity_id = 0;
    std::size_t samples = 0;
    double mean_sojourn = 0.0;
    double ci_half_width = 0.0;  // 95%, batch means
    double mean_end_to_end = 0.0;  // pipeline only: arrival to commit
};

struct ChannelStats {
    int channel_id = 0;
    std::size_t blocks = 0;
    std::size_t transactions = 0;
    double mean_commit_latency = 0.0;  // channel enqueue to commit
    double p50_commit_latency = 0.0;
    double p95_commit_latency = 0.0;
    double max_commit_latency = 0.0;
};

struct SimReport {
    std::vector<EntityStats> entities;  // ascending entity id
    std::vector<ChannelStats> channels;
    std::uint64_t served = 0;
    double end_time = 0.0;
    std::vector<SimEvent> events;

    const EntityStats& entity(int id) const {
        for (const auto& e : entities) {
            if (e.entity_id == id) return e;
        }
        fail(ErrorKind::InvalidInput, "no statistics for entity " + std::to_string(id));
    }
};

inline constexpr int kBatchCount = 20;
inline constexpr double kStudentT19 = 2.093;  // two-sided 95%, 19 degrees of freedom

/// Mean and batch-means 95% half-width over contiguous batches.
inline std::pair<double, double> mean_with_ci(std::span<const double> samples) {
    if (samples.empty()) return {0.0, 0.0};
    double sum = 0.0;
    for (double s : samples) sum += s;
    const double mean = sum / static_cast<double>(samples.size());
    const std::size_t per_batch = samples.size() / kBatchCount;
    if (per_batch == 0) return {mean, 0.0};
    std::vector<double> batch_means(kBatchCount, 0.0);
    for (int b = 0; b < kBatchCount; ++b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < per_batch; ++i) acc += samples[static_cast<std::size_t>(b) * per_batch + i];
        batch_means[static_cast<std::size_t>(b)] = acc / static_cast<double>(per_batch);
    }
    double grand = 0.0;
    for (double m : batch_means) grand += m;
    grand /= kBatchCount;
    double var = 0.0;
    for (double m : batch_means) var += (m - grand) * (m - grand);
    var /= (kBatchCount - 1);
    return {mean, kStudentT19 * std::sqrt(var / kBatchCount)};
}

namespace detail {

inline std::map<int, int> rank_table(const std::vector<queueing::EntityProfile>& entities,
                                     const queueing::PriorityOrder& order, queueing::Discipline discipline) {
    std::map<int, int> rank;
    if (discipline == queueing::Discipline::EqualPriority) {
        for (const auto& e : entities) rank[e.id] = 0;
        return rank;
    }
    if (order.ranked_ids.size() != entities.size()) {
        fail(ErrorKind::InvalidInput, "priority order must rank every entity exactly once");
    }
    int r = 0;
    for (int id : order.ranked_ids) {
        if (!rank.emplace(id, r++).second) fail(ErrorKind::InvalidInput, "entity ranked twice");
    }
    for (const auto& e : entities) {
        if (!rank.contains(e.id)) fail(ErrorKind::InvalidInput, "entity " + std::to_string(e.id) + " has no rank");
    }
    return rank;
}

inline double quantile(std::vector<double> sorted_or_not, double p) {
    if (sorted_or_not.empty()) return 0.0;
    std::sort(sorted_or_not.begin(), sorted_or_not.end());
    const auto idx = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted_or_not.size()))) ;
    return sorted_or_not[std::min(sorted_or_not.size() - 1, idx == 0 ? 0 : idx - 1)];
}

}  // namespace detail

struct NoPayload {};

/// Poisson arrivals per entity, exponential service at rate mu. Under
/// UrgencyPriority each entity is its own preemptive-resume class ranked by
/// `order`; under EqualPriority the server is FCFS.
inline SimReport run_queue_sim(const queueing::QueueSystem& system, const queueing::PriorityOrder& order,
                               const SimConfig& cfg,
                               queueing::Discipline discipline = queueing::Discipline::UrgencyPriority) {
    validate(cfg);
    if (system.entities.empty()) fail(ErrorKind::InvalidInput, "queue simulation needs entities");
    if (!(queueing::stability_margin(system) > 0.0)) {
        fail(ErrorKind::Instability, "refusing to simulate an unstable queue (sum lambda >= mu)");
    }
    for (const auto& e : system.entities) {
        if (!(e.arrival_rate > 0.0)) fail(ErrorKind::InvalidInput, "arrival rates must be positive");
    }
    const auto rank = detail::rank_table(system.entities, order, discipline);
    const double mu = system.service_rate;

    struct Source {
        int entity_id;
        double rate;
        RandomStream arrivals;
        RandomStream service;
    };
    std::vector<Source> sources;
    for (const auto& e : system.entities) {
        const auto key = static_cast<std::uint64_t>(e.id);
        sources.push_back({e.id, e.arrival_rate, {cfg.seed, key, RandomStream::Purpose::Interarrival},
                           {cfg.seed, key, RandomStream::Purpose::Service}});
    }

    SimReport report;
    auto log = [&](const SimEvent& e) {
        if (cfg.record_events) report.events.push_back(e);
    };

    // Payload: source index for arrivals, server token for completions.
    EventQueue<std::uint64_t> events;
    for (std::size_t i = 0; i < sources.size(); ++i) {
        const double t = sources[i].arrivals.exponential(sources[i].rate);
        events.push({t, EventKind::Arrival, 0, sources[i].entity_id}, i);
    }

    PreemptiveServer server(discipline == queueing::Discipline::EqualPriority ? 1
                                                                              : static_cast<int>(rank.size()));
    const auto warmup_served = static_cast<std::uint64_t>(cfg.warmup_fraction * static_cast<double>(cfg.max_served));
    const double warmup_time = cfg.warmup_fraction * cfg.horizon;
    std::map<int, std::vector<double>> samples;
    for (const auto& e : system.entities) samples[e.id];

    std::uint64_t next_job = 1;
    double now = 0.0;
    auto schedule_completion = [&] {
        if (server.busy()) {
            const auto& job = *server.in_service();
            events.push({server.completion_time(), EventKind::ServiceComplete, job.id, job.entity_id}, server.token());
        }
    };

    while (!events.empty()) {
        auto item = events.pop();
        now = item.event.time;
        if (item.event.kind == EventKind::Arrival) {
            if (cfg.horizon > 0.0 && now >= cfg.horizon) continue;  // no arrivals past the horizon
            auto& src = sources[item.payload];
            Job job{next_job++, src.entity_id, rank.at(src.entity_id), now, src.service.exponential(mu)};
            log({now, EventKind::Arrival, job.id, job.entity_id});
            const auto token_before = server.token();
            server.arrive(std::move(job), now, log);
            if (server.token() != token_before) schedule_completion();
            const double t = now + src.arrivals.exponential(src.rate);
            events.push({t, EventKind::Arrival, 0, src.entity_id}, item.payload);
        } else {
            if (!server.busy() || item.payload != server.token()) continue;  // stale after a preemption
            const Job done = server.complete(now, log);
            schedule_completion();
            ++report.served;
            const bool past_warmup = cfg.max_served > 0 ? report.served > warmup_served : done.arrival >= warmup_time;
            if (past_warmup) samples[done.entity_id].push_back(now - done.arrival);
            if (cfg.max_served > 0 && report.served >= cfg.max_served) break;
        }
    }
    report.end_time = now;
    for (const auto& [id, s] : samples) {
        auto [mean, hw] = mean_with_ci(s);
        report.entities.push_back({id, s.size(), mean, hw, 0.0});
    }
    return report;
}

// ---------------------------------------------------------------------------
// Pipeline

struct PipelineEntity {
    queueing::EntityProfile profile;
    ledger::SecurityNeed security = ledger::SecurityNeed::Standard;
};

/// A pre-scripted arrival (used for hand-traced runs); replaces Poisson arrivals.
struct ScriptedArrival {
    double time = 0.0;
    int entity_id = 0;
    double service_time = 0.0;
};

struct PipelineScenario {
    std::vector<PipelineEntity> entities;
    double service_rate = 50.0;
    chain::ChainParams params;
    std::vector<chain::ValidatorProfile> validators;
    std::vector<ledger::Channel> channels;  // bound configurations
    bool priority_assignment = true;
    double block_timeout = 5.0;
    std::vector<ScriptedArrival> script;
};

struct DispatchEntry {
    std::uint64_t tx_id = 0;
    int entity_id = 0;
    int channel_id = 0;
    double created_at = 0.0;
    double enqueued_at = 0.0;  // BM service complete
    std::uint64_t block_id = 0;
    double formed_at = 0.0;
    double committed_at = 0.0;
};

struct PipelineResult {
    SimReport report;
    std::vector<DispatchEntry> dispatch;  // commit order
};

inline ledger::TxKind transaction_kind(queueing::Urgency u, ledger::SecurityNeed s) noexcept {
    if (u == queueing::Urgency::Urgent) return ledger::TxKind::EmergencyNotification;
    if (s == ledger::SecurityNeed::High) return ledger::TxKind::LegalDocument;
    return ledger::TxKind::FeatureSummary;
}

/// Verification delay of one block: latency with n = block size over the
/// channel's selected validators.
inline double block_verification_delay(const PipelineScenario& sc, const ledger::Channel& ch, std::size_t block_size) {
    std::vector<chain::ValidatorProfile> selected;
    for (int id : ch.config.validator_ids) {
        auto it = std::find_if(sc.validators.begin(), sc.validators.end(),
                               [id](const chain::ValidatorProfile& v) { return v.id == id; });
        if (it == sc.validators.end()) fail(ErrorKind::Configuration, "channel references unknown validator " + std::to_string(id));
        selected.push_back(*it);
    }
    return chain::latency(sc.params, selected, static_cast<double>(block_size));
}

inline PipelineResult run_pipeline_sim(const PipelineScenario& sc, const SimConfig& cfg) {
    validate(cfg);
    if (sc.script.empty() && !(cfg.horizon > 0.0)) {
        fail(ErrorKind::InvalidInput, "pipeline simulation needs a positive time horizon");
    }
    if (!(sc.service_rate > 0.0)) fail(ErrorKind::InvalidInput, "service rate must be positive");
    if (!(sc.block_timeout > 0.0)) fail(ErrorKind::InvalidInput, "block timeout must be positive");

    std::vector<queueing::EntityProfile> profiles;
    std::map<int, const PipelineEntity*> by_id;
    double total_rate = 0.0;
    for (const auto& e : sc.entities) {
        if (e.profile.arrival_rate < 0.0) fail(ErrorKind::InvalidInput, "arrival rates must be >= 0");
        if (!by_id.emplace(e.profile.id, &e).second) fail(ErrorKind::Configuration, "duplicate entity id");
        profiles.push_back(e.profile);
        total_rate += e.profile.arrival_rate;
    }
    if (sc.script.empty() && total_rate >= sc.service_rate) {
        fail(ErrorKind::Instability, "refusing to simulate an unstable BM queue (sum lambda >= mu)");
    }

    const auto discipline =
        sc.priority_assignment ? queueing::Discipline::UrgencyPriority : queueing::Discipline::EqualPriority;
    const auto order = profiles.empty() ? queueing::PriorityOrder{} : queueing::assign_priorities(profiles);
    const auto rank = detail::rank_table(profiles, order, discipline);

    ledger::BMState bm(sc.channels);

    struct Source {
        int entity_id;
        double rate;
        RandomStream arrivals;
        RandomStream service;
    };
    std::vector<Source> sources;
    for (const auto& e : sc.entities) {
        const auto key = static_cast<std::uint64_t>(e.profile.id);
        sources.push_back({e.profile.id, e.profile.arrival_rate, {cfg.seed, key, RandomStream::Purpose::Interarrival},
                           {cfg.seed, key, RandomStream::Purpose::Service}});
    }

    enum class Tag { Arrival, Completion, Timer, Commit };
    struct Payload {
        Tag tag = Tag::Arrival;
        std::uint64_t value = 0;  // source index / server token / timer generation / block index
    };

    PipelineResult result;
    auto& report = result.report;
    auto log = [&](const SimEvent& e) {
        if (cfg.record_events) report.events.push_back(e);
    };

    EventQueue<Payload> events;
    if (sc.script.empty()) {
        for (std::size_t i = 0; i < sources.size(); ++i) {
            if (!(sources[i].rate > 0.0)) continue;
            const double t = sources[i].arrivals.exponential(sources[i].rate);
            if (t < cfg.horizon) events.push({t, EventKind::Arrival, 0, sources[i].entity_id}, {Tag::Arrival, i});
        }
    } else {
        for (std::size_t i = 0; i < sc.script.size(); ++i) {
            if (!by_id.contains(sc.script[i].entity_id)) fail(ErrorKind::Configuration, "script references unknown entity");
            events.push({sc.script[i].time, EventKind::Arrival, 0, sc.script[i].entity_id}, {Tag::Arrival, i});
        }
    }

    PreemptiveServer server(discipline == queueing::Discipline::EqualPriority ? 1 : static_cast<int>(rank.size()));
    std::map<std::uint64_t, ledger::Transaction> in_service_tx;
    std::map<int, std::uint64_t> timer_generation;
    std::map<int, double> channel_free_at;
    std::vector<ledger::Block> pending_blocks;
    std::vector<double> block_commit_time;
    std::map<std::uint64_t, double> bm_done_at;
    std::uint64_t next_tx = 1;
    double now = 0.0;

    auto schedule_completion = [&] {
        if (server.busy()) {
            const auto& job = *server.in_service();
            events.push({server.completion_time(), EventKind::ServiceComplete, job.id, job.entity_id},
                        {Tag::Completion, server.token()});
        }
    };
    auto arm_timer = [&](int channel_id) {
        const auto gen = ++timer_generation[channel_id];
        events.push({now + sc.block_timeout, EventKind::BlockFormed, 0, channel_id}, {Tag::Timer, gen});
    };
    auto dispatch_block = [&](ledger::Block block) {
        const auto& ch = bm.channel(block.channel_id);
        log({now, EventKind::BlockFormed, block.id, block.channel_id});
        const double start = std::max(now, channel_free_at[block.channel_id]);
        const double commit = start + block_verification_delay(sc, ch, block.transactions.size());
        channel_free_at[block.channel_id] = commit;
        events.push({commit, EventKind::BlockCommitted, block.id, block.channel_id}, {Tag::Commit, pending_blocks.size()});
        pending_blocks.push_back(std::move(block));
        block_commit_time.push_back(commit);
    };

    while (!events.empty()) {
        auto item = events.pop();
        now = item.event.time;
        switch (item.payload.tag) {
            case Tag::Arrival: {
                int entity_id = 0;
                double work = 0.0;
                if (sc.script.empty()) {
                    auto& src = sources[item.payload.value];
                    entity_id = src.entity_id;
                    work = src.service.exponential(sc.service_rate);
                    const double t = now + src.arrivals.exponential(src.rate);
                    if (t < cfg.horizon) events.push({t, EventKind::Arrival, 0, entity_id}, item.payload);
                } else {
                    const auto& a = sc.script[item.payload.value];
                    entity_id = a.entity_id;
                    work = a.service_time;
                }
                const auto& ent = *by_id.at(entity_id);
                const auto id = next_tx++;
                ledger::Transaction tx{id,
                                       entity_id,
                                       transaction_kind(ent.profile.urgency, ent.security),
                                       ent.profile.urgency,
                                       ent.security,
                                       sc.params.tx_size_bits,
                                       now};
                in_service_tx.emplace(id, tx);
                log({now, EventKind::Arrival, id, entity_id});
                const auto token_before = server.token();
                server.arrive(Job{id, entity_id, rank.at(entity_id), now, work}, now, log);
                if (server.token() != token_before) schedule_completion();
                break;
            }
            case Tag::Completion: {
                if (!server.busy() || item.payload.value != server.token()) break;
                const Job done = server.complete(now, log);
                schedule_completion();
                ++report.served;
                auto node = in_service_tx.extract(done.id);
                const auto tx = node.mapped();
                bm_done_at[tx.id] = now;
                const int ch = bm.accept(tx, rank.at(tx.entity_id), now);
                if (bm.queue(ch).size() == 1) arm_timer(ch);
                if (auto block = bm.form_if_full(ch, now)) {
                    dispatch_block(std::move(*block));
                    if (!bm.queue(ch).empty()) arm_timer(ch);
                    else ++timer_generation[ch];
                }
                break;
            }
            case Tag::Timer: {
                const int ch = item.event.owner;
                if (item.payload.value != timer_generation[ch]) break;
                if (auto block = bm.flush(ch, now)) dispatch_block(std::move(*block));
                break;
            }
            case Tag::Commit: {
                const auto& block = pending_blocks[item.payload.value];
                log({now, EventKind::BlockCommitted, block.id, block.channel_id});
                break;
            }
        }
    }
    report.end_time = now;

    // Statistics
    std::map<std::uint64_t, std::pair<std::uint64_t, double>> commit_of;  // tx -> (block, commit time)
    std::map<std::uint64_t, const ledger::Block*> block_by_id;
    for (std::size_t i = 0; i < pending_blocks.size(); ++i) {
        block_by_id[pending_blocks[i].id] = &pending_blocks[i];
        for (const auto& tx : pending_blocks[i].transactions) commit_of[tx.id] = {pending_blocks[i].id, block_commit_time[i]};
    }
    const double warmup_time = sc.script.empty() ? cfg.warmup_fraction * cfg.horizon : 0.0;
    std::map<int, std::vector<double>> sojourn, end_to_end;
    std::map<int, std::vector<double>> channel_latency;
    std::map<int, std::size_t> channel_blocks;
    for (const auto& c : sc.channels) {
        channel_latency[c.id];
        channel_blocks[c.id] = 0;
    }
    for (const auto& b : pending_blocks) ++channel_blocks[b.channel_id];
    for (const auto& e : sc.entities) {
        sojourn[e.profile.id];
        end_to_end[e.profile.id];
    }
    for (const auto& rec : bm.dispatch_log()) {
        const auto [block_id, committed] = commit_of.at(rec.tx_id);
        const auto* block = block_by_id.at(block_id);
        double created = 0.0;
        for (const auto& tx : block->transactions) {
            if (tx.id == rec.tx_id) created = tx.created_at;
        }
        result.dispatch.push_back({rec.tx_id, rec.entity_id, rec.channel_id, created, rec.enqueued_at, block_id,
                                   rec.formed_at, committed});
    }
    std::stable_sort(result.dispatch.begin(), result.dispatch.end(), [](const DispatchEntry& a, const DispatchEntry& b) {
        return std::tie(a.committed_at, a.tx_id) < std::tie(b.committed_at, b.tx_id);
    });
    for (const auto& d : result.dispatch) {
        if (d.created_at < warmup_time) continue;
        sojourn[d.entity_id].push_back(d.enqueued_at - d.created_at);
        end_to_end[d.entity_id].push_back(d.committed_at - d.created_at);
        channel_latency[d.channel_id].push_back(d.committed_at - d.enqueued_at);
    }
    for (const auto& [id, s] : sojourn) {
        if (s.empty()) continue;
        auto [mean, hw] = mean_with_ci(s);
        const auto& e2e = end_to_end.at(id);
        report.entities.push_back({id, s.size(), mean, hw, mean_with_ci(e2e).first});
    }
    for (const auto& [id, lat] : channel_latency) {
        if (lat.empty()) continue;
        ChannelStats cs;
        cs.channel_id = id;
        cs.blocks = channel_blocks.at(id);
        cs.transactions = lat.size();
        cs.mean_commit_latency = mean_with_ci(lat).first;
        cs.p50_commit_latency = detail::quantile(lat, 0.5);
        cs.p95_commit_latency = detail::quantile(lat, 0.95);
        cs.max_commit_latency = *std::max_element(lat.begin(), lat.end());
        report.channels.push_back(cs);
    }
    return result;
}

}  // namespace edgechain::sim
