#pragma once

// Command implementations behind the `edgechain` CLI. Each returns CSV tables
// with stable column order; the CLI decides where they are written.

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "edgechain/chain_optimizer.hpp"
#include "edgechain/des_engine.hpp"
#include "edgechain/io/scenario.hpp"
#include "edgechain/io/signals.hpp"
#include "edgechain/io/table.hpp"
#include "edgechain/ledger_channels.hpp"
#include "edgechain/priority_queue.hpp"
#include "edgechain/signal_monitor.hpp"

namespace edgechain::io {

inline std::vector<Table> features_command(const IngestResult& input) {
    Table t{"features",
            {"patient", "channel", "session", "window", "mean", "variance", "rms", "kurtosis", "min", "max", "degenerate"},
            {}};
    std::map<std::tuple<std::string, int, int>, int> counter;
    for (const auto& w : input.windows) {
        const int index = counter[{w.patient_id, w.channel_id, static_cast<int>(w.session)}]++;
        const auto fv = monitor::extract_features(w);
        t.add(w.patient_id, w.channel_id, monitor::to_string(w.session), index, fv.mean, fv.variance, fv.rms,
              fv.kurtosis, fv.min, fv.max, fv.degenerate);
    }
    return {t};
}

inline std::vector<Table> monitor_command(const IngestResult& input, double zeta) {
    const auto cohort = monitor::assess_cohort(input.windows, zeta);
    Table baseline{"baseline", {"delta_bar", "channels", "patients", "zeta"}, {}};
    baseline.add(cohort.baseline.delta_bar, cohort.baseline.channel_count, cohort.baseline.patient_count, zeta);

    Table deltas{"deltas",
                 {"patient", "channel", "delta_before", "delta_during", "delta_after", "kappa", "exceeds_zeta",
                  "degenerate"},
                 {}};
    Table patients{"patients", {"patient", "status", "exceed_count", "payload", "on_chain", "flagged_channels"}, {}};
    for (const auto& pa : cohort.patients) {
        for (const auto& cd : pa.channels) {
            deltas.add(pa.patient_id, cd.channel_id, cd.delta_before, cd.delta_during, cd.delta_after, cd.kappa,
                       cd.kappa > zeta, cd.before.degenerate || cd.during.degenerate || cd.after.degenerate);
        }
        std::string flagged;
        for (std::size_t i = 0; i < pa.payload.flagged_channels.size(); ++i) {
            if (i) flagged += ';';
            flagged += std::to_string(pa.payload.flagged_channels[i]);
        }
        patients.add(pa.patient_id, monitor::to_string(pa.status), monitor::exceed_count(pa.profile.kappa, zeta),
                     monitor::to_string(pa.payload.kind), pa.payload.goes_on_chain(), flagged);
    }
    return {baseline, deltas, patients};
}

/// Closed-form sojourn per entity for every service rate in the sweep.
inline std::vector<Table> queue_command(const Scenario& sc) {
    Table t{"sojourn",
            {"service_rate", "rank", "entity", "urgency", "arrival_rate", "sojourn_equal", "sojourn_priority"},
            {}};
    std::vector<double> rates = sc.queue.sweep;
    if (rates.empty()) {
        const auto bound = sc.queue.service_rate_from_chain ? bind_channels(sc) : std::vector<ledger::Channel>{};
        rates.push_back(effective_service_rate(sc, bound));
    }
    for (double mu : rates) {
        const auto qs = queue_system(sc, mu);
        const auto order = queueing::assign_priorities(qs.entities);
        const auto equal = queueing::sojourn_equal(qs);
        const auto prio = queueing::sojourn_priority(qs, order);
        for (const auto& e : prio.entries) {
            const auto& profile = *std::find_if(qs.entities.begin(), qs.entities.end(),
                                                [&](const auto& p) { return p.id == e.entity_id; });
            t.add(mu, e.rank, e.entity_id, queueing::to_string(profile.urgency), profile.arrival_rate,
                  equal.sojourn_of(e.entity_id), e.sojourn);
        }
    }
    return {t};
}

struct OptimizeOutcome {
    chain::BcoResult greedy;
    chain::ExhaustiveResult exhaustive;
    chain::NormalizationBounds bounds;
};

inline OptimizeOutcome optimize(const Scenario& sc) {
    const auto bounds = scenario_bounds(sc);
    return {chain::bco(sc.chain, sc.optimizer_weights, sc.validators, bounds),
            chain::exhaustive_search(sc.chain, sc.optimizer_weights, sc.validators, bounds), bounds};
}

inline std::vector<Table> optimize_command(const Scenario& sc) {
    const auto out = optimize(sc);
    Table trace{"bco_trace", {"iteration", "m", "n", "latency", "security", "cost", "utility", "accepted"}, {}};
    for (const auto& step : out.greedy.trace) {
        const auto& c = step.candidate;
        trace.add(step.iteration, c.m, c.n, c.latency, c.security, c.cost, c.utility, step.accepted);
    }
    Table bounds{"bounds", {"latency_max", "security_max", "cost_max"}, {}};
    bounds.add(out.bounds.latency, out.bounds.security, out.bounds.cost);

    Table result{"result", {"method", "m", "n", "latency", "security", "cost", "utility", "steps"}, {}};
    const auto& g = out.greedy.config;
    const auto& x = out.exhaustive.config;
    result.add("bco", g.m, g.n, g.latency, g.security, g.cost, g.utility, out.greedy.iterations);
    result.add("exhaustive", x.m, x.n, x.latency, x.security, x.cost, x.utility, out.exhaustive.evaluations);

    Table cmp{"comparison", {"bco_m", "bco_n", "bco_utility", "exhaustive_m", "exhaustive_n", "exhaustive_utility", "equal"}, {}};
    cmp.add(g.m, g.n, g.utility, x.m, x.n, x.utility, g.utility == x.utility);
    return {bounds, trace, result, cmp};
}

inline std::vector<Table> channels_command(const Scenario& sc) {
    const auto bound = bind_channels(sc);
    Table summary{"channels", {"channel", "mode", "m", "n", "latency", "security", "cost", "utility", "validators"}, {}};
    Table trace{"channel_trace", {"channel", "iteration", "m", "n", "latency", "security", "cost", "utility", "accepted"}, {}};
    for (const auto& ch : bound) {
        std::string ids;
        for (std::size_t i = 0; i < ch.config.validator_ids.size(); ++i) {
            if (i) ids += ';';
            ids += std::to_string(ch.config.validator_ids[i]);
        }
        const auto& c = ch.config;
        summary.add(ch.id, ledger::to_string(ch.mode), c.m, c.n, c.latency, c.security, c.cost, c.utility, ids);
        for (const auto& step : ch.trace) {
            const auto& s = step.candidate;
            trace.add(ch.id, step.iteration, s.m, s.n, s.latency, s.security, s.cost, s.utility, step.accepted);
        }
    }
    return {summary, trace};
}

inline std::vector<Table> simulate_command(const Scenario& sc, std::uint64_t seed) {
    const auto cfg = pipeline_config(sc, seed);
    const auto configured = sim::run_pipeline_sim(pipeline_scenario(sc, sc.sim.priority), cfg);

    Table entities{"entities", {"entity", "urgency", "channel", "samples", "mean_sojourn", "ci_half_width", "mean_end_to_end"}, {}};
    for (const auto& es : configured.report.entities) {
        const auto& e = *std::find_if(sc.entities.begin(), sc.entities.end(),
                                      [&](const auto& x) { return x.profile.id == es.entity_id; });
        entities.add(es.entity_id, queueing::to_string(e.profile.urgency),
                     ledger::canonical_channel(e.profile.urgency, e.security), es.samples, es.mean_sojourn,
                     es.ci_half_width, es.mean_end_to_end);
    }
    Table channels{"channel_latency", {"channel", "blocks", "transactions", "mean", "p50", "p95", "max"}, {}};
    for (const auto& c : configured.report.channels) {
        channels.add(c.channel_id, c.blocks, c.transactions, c.mean_commit_latency, c.p50_commit_latency,
                     c.p95_commit_latency, c.max_commit_latency);
    }

    // Same seed with and without priority assignment, aggregated per channel.
    Table comparison{"priority_comparison", {"channel", "priority", "transactions", "mean_sojourn", "mean_end_to_end"}, {}};
    for (bool priority : {true, false}) {
        const auto run = priority == sc.sim.priority ? configured : sim::run_pipeline_sim(pipeline_scenario(sc, priority), cfg);
        const double warmup_time = cfg.warmup_fraction * cfg.horizon;
        std::map<int, std::tuple<std::size_t, double, double>> acc;
        for (const auto& d : run.dispatch) {
            if (d.created_at < warmup_time) continue;
            auto& [count, soj, e2e] = acc[d.channel_id];
            ++count;
            soj += d.enqueued_at - d.created_at;
            e2e += d.committed_at - d.created_at;
        }
        for (const auto& [ch, v] : acc) {
            const auto& [count, soj, e2e] = v;
            comparison.add(ch, priority ? "on" : "off", count, soj / static_cast<double>(count), e2e / static_cast<double>(count));
        }
    }

    Table dispatch{"dispatch",
                   {"tx", "entity", "channel", "created_at", "enqueued_at", "block", "formed_at", "committed_at"},
                   {}};
    for (const auto& d : configured.dispatch) {
        dispatch.add(d.tx_id, d.entity_id, d.channel_id, d.created_at, d.enqueued_at, d.block_id, d.formed_at,
                     d.committed_at);
    }
    return {entities, channels, comparison, dispatch};
}

inline std::vector<Table> synth_table(const SyntheticCohort& cohort) {
    Table injected{"injected", {"patient", "channels"}, {}};
    for (const auto& [patient, chans] : cohort.injected) {
        std::string ids;
        for (std::size_t i = 0; i < chans.size(); ++i) {
            if (i) ids += ';';
            ids += std::to_string(chans[i]);
        }
        injected.add(patient, ids);
    }
    return {injected};
}

}  // namespace edgechain::io
