#pragma once

// Scenario files: YAML with named sections, parsed strictly (unknown keys are
// errors). Generators for validators and entities are expanded at load time,
// and write_scenario always emits the expanded lists, so save -> load is
// value-identical.

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "edgechain/chain_optimizer.hpp"
#include "edgechain/des_engine.hpp"
#include "edgechain/error.hpp"
#include "edgechain/io/table.hpp"
#include "edgechain/ledger_channels.hpp"
#include "edgechain/priority_queue.hpp"
#include "edgechain/signal_monitor.hpp"

namespace edgechain::io {

struct ScenarioEntity {
    queueing::EntityProfile profile;
    ledger::SecurityNeed security = ledger::SecurityNeed::Standard;

    bool operator==(const ScenarioEntity&) const = default;
};

struct QueueSettings {
    double service_rate = 50.0;
    std::vector<double> sweep;            // service rates for the `queue` table; empty: service_rate only
    bool service_rate_from_chain = false; // use mu = n / L of the normal channel instead

    bool operator==(const QueueSettings&) const = default;
};

struct MonitorSettings {
    double zeta = monitor::kDefaultZeta;
    std::size_t window = monitor::kDefaultWindowLength;

    bool operator==(const MonitorSettings&) const = default;
};

struct SimSettings {
    std::uint64_t seed = 1;
    double horizon = 600.0;
    double warmup = 0.1;
    double block_timeout = 5.0;
    bool priority = true;

    bool operator==(const SimSettings&) const = default;
};

struct Scenario {
    std::string name;
    chain::ChainParams chain;
    std::vector<chain::ValidatorProfile> validators;
    std::vector<ScenarioEntity> entities;
    chain::MetricWeights optimizer_weights;
    std::vector<ledger::ChannelSpec> channels;
    QueueSettings queue;
    MonitorSettings monitor;
    SimSettings sim;

    bool operator==(const Scenario&) const = default;
};

namespace detail {

/// Cursor over a YAML map that remembers which keys were consumed.
class Section {
public:
    Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
        if (!node_.IsMap()) fail(ErrorKind::Configuration, where() + ": expected a mapping");
    }

    const std::string& path() const noexcept { return path_; }

    bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }

    YAML::Node raw(const std::string& key) {
        seen_.insert(key);
        return node_[key];
    }

    template <class T>
    T get(const std::string& key) {
        auto n = raw(key);
        if (!n) fail(ErrorKind::Configuration, child(key) + ": missing required field");
        return convert<T>(n, child(key));
    }

    template <class T>
    T get_or(const std::string& key, T fallback) {
        auto n = raw(key);
        if (!n) return fallback;
        return convert<T>(n, child(key));
    }

    Section section(const std::string& key) {
        auto n = raw(key);
        if (!n) fail(ErrorKind::Configuration, child(key) + ": missing required section");
        return Section(n, child(key));
    }

    /// Rejects any key not consumed so far.
    void finish() const {
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!seen_.contains(key)) {
                fail(ErrorKind::Configuration, fmt::format("{}: unknown key (line {})", child(key), kv.first.Mark().line + 1));
            }
        }
    }

    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    template <class T>
    static T convert(const YAML::Node& n, const std::string& path) {
        try {
            return n.as<T>();
        } catch (const YAML::Exception&) {
            fail(ErrorKind::Configuration, fmt::format("{}: wrong type (line {})", path, n.Mark().line + 1));
        }
    }

private:
    std::string where() const { return path_.empty() ? "<root>" : path_; }

    YAML::Node node_;
    std::string path_;
    std::set<std::string> seen_;
};

inline chain::MetricWeights read_weights(Section s) {
    chain::MetricWeights w{s.get<double>("alpha"), s.get<double>("beta"), s.get<double>("gamma")};
    s.finish();
    if (w.alpha < 0 || w.beta < 0 || w.gamma < 0 ||
        std::abs(w.alpha + w.beta + w.gamma - 1.0) > chain::kWeightSumTolerance) {
        fail(ErrorKind::Configuration, s.path() + ": weights must be non-negative and sum to 1");
    }
    return w;
}

inline chain::ChainParams read_chain(Section s) {
    chain::ChainParams p;
    p.tx_size_bits = s.get<double>("tx_size_bits");
    p.workload = s.get<double>("workload");
    p.feedback_bits = s.get<double>("feedback_bits");
    p.downlink_bps = s.get<double>("downlink_bps");
    p.uplink_bps = s.get<double>("uplink_bps");
    p.psi = s.get_or<double>("psi", 1e-6);
    p.theta = s.get<double>("theta");
    p.q = s.get<double>("q");
    p.min_validators = s.get<int>("min_validators");
    p.max_validators = s.get<int>("max_validators");
    p.min_block_size = s.get<int>("min_block_size");
    p.max_block_size = s.get<int>("max_block_size");
    s.finish();
    try {
        chain::validate(p);
    } catch (const Error& e) {
        fail(ErrorKind::Configuration, s.path() + ": " + e.what());
    }
    return p;
}

inline double draw_uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

inline std::vector<chain::ValidatorProfile> read_validators(Section s) {
    std::vector<chain::ValidatorProfile> out;
    if (s.has("generate") == s.has("list")) {
        fail(ErrorKind::Configuration, s.path() + ": give exactly one of 'generate' or 'list'");
    }
    if (s.has("generate")) {
        auto g = s.section("generate");
        const int count = g.get<int>("count");
        const auto seed = g.get<std::uint64_t>("seed");
        const double cmin = g.get_or<double>("compute_min", 20.0);
        const double cmax = g.get_or<double>("compute_max", 100.0);
        const double pmin = g.get_or<double>("price_min", 0.01);
        const double pmax = g.get_or<double>("price_max", 0.1);
        g.finish();
        if (count < 1 || !(cmin > 0) || cmax < cmin || pmin < 0 || pmax < pmin) {
            fail(ErrorKind::Configuration, g.path() + ": invalid generator bounds");
        }
        std::mt19937_64 rng(seed);
        for (int i = 1; i <= count; ++i) {
            chain::ValidatorProfile v;
            v.id = i;
            v.compute = draw_uniform(rng, cmin, cmax);
            v.price = draw_uniform(rng, pmin, pmax);
            v.cost = v.price * v.compute;
            out.push_back(v);
        }
    } else {
        auto list = s.raw("list");
        if (!list.IsSequence()) fail(ErrorKind::Configuration, s.child("list") + ": expected a sequence");
        for (std::size_t i = 0; i < list.size(); ++i) {
            Section item(list[i], fmt::format("{}[{}]", s.child("list"), i));
            chain::ValidatorProfile v;
            v.id = item.get<int>("id");
            v.compute = item.get<double>("compute");
            v.price = item.get<double>("price");
            v.cost = item.has("cost") ? item.get<double>("cost") : v.price * v.compute;
            item.finish();
            if (!(v.compute > 0) || v.price < 0) fail(ErrorKind::Configuration, item.path() + ": compute must be > 0, price >= 0");
            if (!chain::satisfies_payment_constraint(v)) {
                fail(ErrorKind::Configuration, item.path() + ": cost must cover price * compute");
            }
            out.push_back(v);
        }
    }
    s.finish();
    std::set<int> ids;
    for (const auto& v : out) {
        if (!ids.insert(v.id).second) fail(ErrorKind::Configuration, fmt::format("{}: duplicate validator id {}", s.path(), v.id));
    }
    return out;
}

inline std::vector<ScenarioEntity> read_entities(Section s) {
    std::vector<ScenarioEntity> out;
    if (s.has("preset") == s.has("list")) {
        fail(ErrorKind::Configuration, s.path() + ": give exactly one of 'preset' or 'list'");
    }
    auto parse_security = [](const std::string& text, const std::string& path) {
        auto v = ledger::parse_security_need(text);
        if (!v) fail(ErrorKind::Configuration, path + ": security must be 'standard' or 'high'");
        return *v;
    };
    if (s.has("preset")) {
        auto p = s.section("preset");
        const int count = p.get<int>("count");
        const int urgent = p.get<int>("urgent");
        const int normal = p.get<int>("normal");
        const auto arrival = p.get<std::string>("arrival");
        const double rate = p.get<double>("rate");
        const auto seed = p.get_or<std::uint64_t>("seed", 1);
        const double weight = p.get_or<double>("weight", 1.0);
        const auto non_urgent_security =
            parse_security(p.get_or<std::string>("non_urgent_security", "standard"), p.child("non_urgent_security"));
        p.finish();
        if (count < 1 || urgent < 0 || normal < 0 || urgent + normal > count || !(rate > 0)) {
            fail(ErrorKind::Configuration, p.path() + ": invalid entity preset");
        }
        if (arrival != "constant" && arrival != "uniform") {
            fail(ErrorKind::Configuration, p.child("arrival") + ": expected 'constant' or 'uniform'");
        }
        std::mt19937_64 rng(seed);
        for (int i = 1; i <= count; ++i) {
            ScenarioEntity e;
            e.profile.id = i;
            e.profile.urgency = i <= urgent            ? queueing::Urgency::Urgent
                                : i <= urgent + normal ? queueing::Urgency::Normal
                                                       : queueing::Urgency::NonUrgent;
            e.profile.weight = weight;
            // uniform: U(0, 2*rate], mean `rate`
            e.profile.arrival_rate = arrival == "constant" ? rate : 2.0 * rate - draw_uniform(rng, 0.0, 2.0 * rate);
            e.security = e.profile.urgency == queueing::Urgency::NonUrgent ? non_urgent_security
                                                                           : ledger::SecurityNeed::Standard;
            out.push_back(e);
        }
    } else {
        auto list = s.raw("list");
        if (!list.IsSequence()) fail(ErrorKind::Configuration, s.child("list") + ": expected a sequence");
        for (std::size_t i = 0; i < list.size(); ++i) {
            Section item(list[i], fmt::format("{}[{}]", s.child("list"), i));
            ScenarioEntity e;
            e.profile.id = item.get<int>("id");
            e.profile.arrival_rate = item.get<double>("arrival_rate");
            const auto urg = item.get<std::string>("urgency");
            auto u = queueing::parse_urgency(urg);
            if (!u) fail(ErrorKind::Configuration, item.child("urgency") + ": expected urgent, normal or non-urgent");
            e.profile.urgency = *u;
            e.profile.weight = item.get_or<double>("weight", 1.0);
            e.security = parse_security(item.get_or<std::string>("security", "standard"), item.child("security"));
            item.finish();
            if (e.profile.id < 1 || e.profile.arrival_rate < 0 || e.profile.weight < 0) {
                fail(ErrorKind::Configuration, item.path() + ": id must be >= 1, rates and weights >= 0");
            }
            out.push_back(e);
        }
    }
    s.finish();
    std::set<int> ids;
    for (const auto& e : out) {
        if (!ids.insert(e.profile.id).second) {
            fail(ErrorKind::Configuration, fmt::format("{}: duplicate entity id {}", s.path(), e.profile.id));
        }
    }
    return out;
}

inline std::vector<ledger::ChannelSpec> read_channels(const YAML::Node& list, const std::string& path,
                                                      const std::vector<chain::ValidatorProfile>& validators) {
    if (!list.IsSequence()) fail(ErrorKind::Configuration, path + ": expected a sequence");
    std::set<int> validator_ids;
    for (const auto& v : validators) validator_ids.insert(v.id);
    std::vector<ledger::ChannelSpec> out;
    std::set<int> ids;
    for (std::size_t i = 0; i < list.size(); ++i) {
        Section item(list[i], fmt::format("{}[{}]", path, i));
        ledger::ChannelSpec c;
        c.id = item.get<int>("id");
        const auto mode = item.get<std::string>("mode");
        auto m = ledger::parse_channel_mode(mode);
        if (!m) fail(ErrorKind::Configuration, item.child("mode") + ": unknown channel mode '" + mode + "'");
        c.mode = *m;
        c.weights = read_weights(item.section("weights"));
        if (c.mode == ledger::ChannelMode::Fixed) {
            c.fixed_m = item.get<int>("m");
            c.fixed_n = item.get<int>("n");
            if (c.fixed_m < 1 || c.fixed_n < 1) fail(ErrorKind::Configuration, item.path() + ": fixed m and n must be >= 1");
        }
        c.validator_ids = item.get_or<std::vector<int>>("validators", {});
        item.finish();
        for (int id : c.validator_ids) {
            if (!validator_ids.contains(id)) {
                fail(ErrorKind::Configuration, fmt::format("{}: unknown validator id {}", item.child("validators"), id));
            }
        }
        if (!ids.insert(c.id).second) fail(ErrorKind::Configuration, fmt::format("{}: duplicate channel id {}", item.path(), c.id));
        out.push_back(std::move(c));
    }
    for (int required : {ledger::kUrgentChannel, ledger::kSecureChannel, ledger::kNormalChannel}) {
        if (!ids.contains(required)) fail(ErrorKind::Configuration, fmt::format("{}: canonical channel {} is missing", path, required));
    }
    return out;
}

}  // namespace detail

inline Scenario parse_scenario(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        fail(ErrorKind::Parse, fmt::format("scenario parse error at line {}, column {}: {}", e.mark.line + 1,
                                           e.mark.column + 1, e.msg));
    }
    detail::Section s(root, "");
    Scenario sc;
    sc.name = s.get<std::string>("name");
    sc.chain = detail::read_chain(s.section("chain"));
    sc.validators = detail::read_validators(s.section("validators"));
    sc.entities = detail::read_entities(s.section("entities"));
    {
        auto opt = s.section("optimizer");
        sc.optimizer_weights = detail::read_weights(opt.section("weights"));
        opt.finish();
    }
    sc.channels = detail::read_channels(s.raw("channels"), "channels", sc.validators);
    if (s.has("queue")) {
        auto q = s.section("queue");
        sc.queue.service_rate = q.get<double>("service_rate");
        sc.queue.sweep = q.get_or<std::vector<double>>("sweep", {});
        sc.queue.service_rate_from_chain = q.get_or<bool>("service_rate_from_chain", false);
        q.finish();
        if (!(sc.queue.service_rate > 0)) fail(ErrorKind::Configuration, q.child("service_rate") + ": must be > 0");
        for (double mu : sc.queue.sweep) {
            if (!(mu > 0)) fail(ErrorKind::Configuration, q.child("sweep") + ": service rates must be > 0");
        }
    }
    if (s.has("monitor")) {
        auto m = s.section("monitor");
        sc.monitor.zeta = m.get_or<double>("zeta", monitor::kDefaultZeta);
        sc.monitor.window = m.get_or<std::size_t>("window", monitor::kDefaultWindowLength);
        m.finish();
        if (!(sc.monitor.zeta > 0)) fail(ErrorKind::Configuration, m.child("zeta") + ": must be > 0");
        if (sc.monitor.window < 2) fail(ErrorKind::Configuration, m.child("window") + ": must be >= 2");
    }
    if (s.has("sim")) {
        auto m = s.section("sim");
        sc.sim.seed = m.get_or<std::uint64_t>("seed", 1);
        sc.sim.horizon = m.get_or<double>("horizon", 600.0);
        sc.sim.warmup = m.get_or<double>("warmup", 0.1);
        sc.sim.block_timeout = m.get_or<double>("block_timeout", 5.0);
        sc.sim.priority = m.get_or<bool>("priority", true);
        m.finish();
        if (!(sc.sim.horizon > 0)) fail(ErrorKind::Configuration, m.child("horizon") + ": must be > 0");
        if (!(sc.sim.warmup >= 0 && sc.sim.warmup < 1)) fail(ErrorKind::Configuration, m.child("warmup") + ": must lie in [0, 1)");
        if (!(sc.sim.block_timeout > 0)) fail(ErrorKind::Configuration, m.child("block_timeout") + ": must be > 0");
    }
    s.finish();
    return sc;
}

inline std::string write_scenario(const Scenario& sc) {
    auto num = [](double x) { return format_number(x); };
    YAML::Emitter e;
    e << YAML::BeginMap;
    e << YAML::Key << "name" << YAML::Value << sc.name;

    const auto& p = sc.chain;
    e << YAML::Key << "chain" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "tx_size_bits" << YAML::Value << num(p.tx_size_bits);
    e << YAML::Key << "workload" << YAML::Value << num(p.workload);
    e << YAML::Key << "feedback_bits" << YAML::Value << num(p.feedback_bits);
    e << YAML::Key << "downlink_bps" << YAML::Value << num(p.downlink_bps);
    e << YAML::Key << "uplink_bps" << YAML::Value << num(p.uplink_bps);
    e << YAML::Key << "psi" << YAML::Value << num(p.psi);
    e << YAML::Key << "theta" << YAML::Value << num(p.theta);
    e << YAML::Key << "q" << YAML::Value << num(p.q);
    e << YAML::Key << "min_validators" << YAML::Value << p.min_validators;
    e << YAML::Key << "max_validators" << YAML::Value << p.max_validators;
    e << YAML::Key << "min_block_size" << YAML::Value << p.min_block_size;
    e << YAML::Key << "max_block_size" << YAML::Value << p.max_block_size;
    e << YAML::EndMap;

    e << YAML::Key << "validators" << YAML::Value << YAML::BeginMap << YAML::Key << "list" << YAML::Value << YAML::BeginSeq;
    for (const auto& v : sc.validators) {
        e << YAML::Flow << YAML::BeginMap;
        e << YAML::Key << "id" << YAML::Value << v.id;
        e << YAML::Key << "compute" << YAML::Value << num(v.compute);
        e << YAML::Key << "price" << YAML::Value << num(v.price);
        e << YAML::Key << "cost" << YAML::Value << num(v.cost);
        e << YAML::EndMap;
    }
    e << YAML::EndSeq << YAML::EndMap;

    e << YAML::Key << "entities" << YAML::Value << YAML::BeginMap << YAML::Key << "list" << YAML::Value << YAML::BeginSeq;
    for (const auto& en : sc.entities) {
        e << YAML::Flow << YAML::BeginMap;
        e << YAML::Key << "id" << YAML::Value << en.profile.id;
        e << YAML::Key << "arrival_rate" << YAML::Value << num(en.profile.arrival_rate);
        e << YAML::Key << "urgency" << YAML::Value << std::string(queueing::to_string(en.profile.urgency));
        e << YAML::Key << "weight" << YAML::Value << num(en.profile.weight);
        e << YAML::Key << "security" << YAML::Value << std::string(ledger::to_string(en.security));
        e << YAML::EndMap;
    }
    e << YAML::EndSeq << YAML::EndMap;

    auto weights = [&](const chain::MetricWeights& w) {
        e << YAML::Flow << YAML::BeginMap;
        e << YAML::Key << "alpha" << YAML::Value << num(w.alpha);
        e << YAML::Key << "beta" << YAML::Value << num(w.beta);
        e << YAML::Key << "gamma" << YAML::Value << num(w.gamma);
        e << YAML::EndMap;
    };
    e << YAML::Key << "optimizer" << YAML::Value << YAML::BeginMap << YAML::Key << "weights" << YAML::Value;
    weights(sc.optimizer_weights);
    e << YAML::EndMap;

    e << YAML::Key << "channels" << YAML::Value << YAML::BeginSeq;
    for (const auto& c : sc.channels) {
        e << YAML::BeginMap;
        e << YAML::Key << "id" << YAML::Value << c.id;
        e << YAML::Key << "mode" << YAML::Value << std::string(ledger::to_string(c.mode));
        e << YAML::Key << "weights" << YAML::Value;
        weights(c.weights);
        if (c.mode == ledger::ChannelMode::Fixed) {
            e << YAML::Key << "m" << YAML::Value << c.fixed_m;
            e << YAML::Key << "n" << YAML::Value << c.fixed_n;
        }
        if (!c.validator_ids.empty()) e << YAML::Key << "validators" << YAML::Value << YAML::Flow << c.validator_ids;
        e << YAML::EndMap;
    }
    e << YAML::EndSeq;

    e << YAML::Key << "queue" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "service_rate" << YAML::Value << num(sc.queue.service_rate);
    e << YAML::Key << "sweep" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (double mu : sc.queue.sweep) e << num(mu);
    e << YAML::EndSeq;
    e << YAML::Key << "service_rate_from_chain" << YAML::Value << sc.queue.service_rate_from_chain;
    e << YAML::EndMap;

    e << YAML::Key << "monitor" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "zeta" << YAML::Value << num(sc.monitor.zeta);
    e << YAML::Key << "window" << YAML::Value << sc.monitor.window;
    e << YAML::EndMap;

    e << YAML::Key << "sim" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "seed" << YAML::Value << sc.sim.seed;
    e << YAML::Key << "horizon" << YAML::Value << num(sc.sim.horizon);
    e << YAML::Key << "warmup" << YAML::Value << num(sc.sim.warmup);
    e << YAML::Key << "block_timeout" << YAML::Value << num(sc.sim.block_timeout);
    e << YAML::Key << "priority" << YAML::Value << sc.sim.priority;
    e << YAML::EndMap;

    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

// ---------------------------------------------------------------------------
// Built-in scenarios

/// Default setup: 21 entities (1-8 urgent, 9-12 normal,
/// 13-21 non-urgent at 2 tx/s), q=4, O=0.5 Mb, theta=1, r_d=1.2 Mbps,
/// r_u=1.3 Mbps, K=100, B=0.5 kb, M=21, n in [1, 20]; channel 4 fixed at
/// (m=8, n=80).
inline constexpr const char* kPaperDefaultScenario = R"(name: paper_default
chain:
  tx_size_bits: 500
  workload: 100
  feedback_bits: 500000
  downlink_bps: 1200000
  uplink_bps: 1300000
  psi: 1e-6
  theta: 1
  q: 4
  min_validators: 1
  max_validators: 21
  min_block_size: 1
  max_block_size: 20
validators:
  generate: {count: 21, seed: 2020, compute_min: 20, compute_max: 100, price_min: 0.01, price_max: 0.1}
entities:
  preset: {count: 21, urgent: 8, normal: 4, arrival: constant, rate: 2, non_urgent_security: high}
optimizer:
  weights: {alpha: 0.3333333333333333, beta: 0.3333333333333333, gamma: 0.3333333333333334}
channels:
  - {id: 1, mode: optimized, weights: {alpha: 0.7, beta: 0, gamma: 0.3}}
  - {id: 2, mode: optimized, weights: {alpha: 0.1, beta: 0.8, gamma: 0.1}}
  - {id: 3, mode: optimized, weights: {alpha: 0.4, beta: 0.3, gamma: 0.3}}
  - {id: 4, mode: fixed, weights: {alpha: 0.4, beta: 0.3, gamma: 0.3}, m: 8, n: 80}
queue:
  service_rate: 50
  sweep: [45, 50, 60]
monitor:
  zeta: 30
  window: 1920
sim:
  seed: 1
  horizon: 600
  warmup: 0.1
  block_timeout: 5
  priority: true
)";

/// Same chain setup with arrivals uniformly distributed around 1 tx/s.
inline constexpr const char* kUniformArrivalsScenario = R"(name: uniform_arrivals
chain:
  tx_size_bits: 500
  workload: 100
  feedback_bits: 500000
  downlink_bps: 1200000
  uplink_bps: 1300000
  psi: 1e-6
  theta: 1
  q: 4
  min_validators: 1
  max_validators: 21
  min_block_size: 1
  max_block_size: 20
validators:
  generate: {count: 21, seed: 2020, compute_min: 20, compute_max: 100, price_min: 0.01, price_max: 0.1}
entities:
  preset: {count: 21, urgent: 8, normal: 4, arrival: uniform, rate: 1, seed: 9, non_urgent_security: high}
optimizer:
  weights: {alpha: 0.3333333333333333, beta: 0.3333333333333333, gamma: 0.3333333333333334}
channels:
  - {id: 1, mode: optimized, weights: {alpha: 0.7, beta: 0, gamma: 0.3}}
  - {id: 2, mode: optimized, weights: {alpha: 0.1, beta: 0.8, gamma: 0.1}}
  - {id: 3, mode: optimized, weights: {alpha: 0.4, beta: 0.3, gamma: 0.3}}
  - {id: 4, mode: fixed, weights: {alpha: 0.4, beta: 0.3, gamma: 0.3}, m: 8, n: 80}
queue:
  service_rate: 30
  sweep: [25, 30, 40]
monitor:
  zeta: 30
  window: 1920
sim:
  seed: 1
  horizon: 1200
  warmup: 0.1
  block_timeout: 5
  priority: true
)";

inline std::optional<std::string> builtin_scenario_text(const std::string& name) {
    if (name == "paper_default") return std::string(kPaperDefaultScenario);
    if (name == "uniform_arrivals") return std::string(kUniformArrivalsScenario);
    return std::nullopt;
}

/// A built-in name or a path to a YAML file.
inline Scenario load_scenario(const std::string& name_or_path) {
    if (auto text = builtin_scenario_text(name_or_path)) return parse_scenario(*text);
    std::ifstream in(name_or_path);
    if (!in) fail(ErrorKind::Configuration, "cannot open scenario '" + name_or_path + "' (not a file or built-in name)");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

// ---------------------------------------------------------------------------
// Scenario -> module inputs

inline std::vector<chain::ValidatorProfile> channel_pool(const Scenario& sc, const ledger::ChannelSpec& spec) {
    if (spec.validator_ids.empty()) return sc.validators;
    std::vector<chain::ValidatorProfile> pool;
    for (int id : spec.validator_ids) {
        auto it = std::find_if(sc.validators.begin(), sc.validators.end(), [id](const auto& v) { return v.id == id; });
        if (it == sc.validators.end()) fail(ErrorKind::Configuration, fmt::format("unknown validator id {}", id));
        pool.push_back(*it);
    }
    return pool;
}

inline chain::NormalizationBounds scenario_bounds(const Scenario& sc) {
    return chain::default_bounds(sc.chain, sc.validators);
}

inline std::vector<ledger::Channel> bind_channels(const Scenario& sc) {
    const auto bounds = scenario_bounds(sc);
    std::vector<ledger::Channel> out;
    for (const auto& spec : sc.channels) {
        out.push_back(ledger::bind_channel_config(spec, sc.chain, channel_pool(sc, spec), bounds));
    }
    return out;
}

/// mu = n / L of the normal channel when coupled to the chain, else the
/// configured rate.
inline double effective_service_rate(const Scenario& sc, const std::vector<ledger::Channel>& bound) {
    if (!sc.queue.service_rate_from_chain) return sc.queue.service_rate;
    for (const auto& c : bound) {
        if (c.id == ledger::kNormalChannel) return c.config.n / c.config.latency;
    }
    fail(ErrorKind::Configuration, "normal channel missing for chain-coupled service rate");
}

inline queueing::QueueSystem queue_system(const Scenario& sc, double service_rate) {
    queueing::QueueSystem qs;
    qs.service_rate = service_rate;
    for (const auto& e : sc.entities) qs.entities.push_back(e.profile);
    return qs;
}

inline sim::PipelineScenario pipeline_scenario(const Scenario& sc, bool priority) {
    sim::PipelineScenario ps;
    for (const auto& e : sc.entities) ps.entities.push_back({e.profile, e.security});
    ps.params = sc.chain;
    ps.validators = sc.validators;
    ps.channels = bind_channels(sc);
    ps.service_rate = effective_service_rate(sc, ps.channels);
    ps.priority_assignment = priority;
    ps.block_timeout = sc.sim.block_timeout;
    return ps;
}

inline sim::SimConfig pipeline_config(const Scenario& sc, std::uint64_t seed) {
    sim::SimConfig cfg;
    cfg.seed = seed;
    cfg.max_served = 0;
    cfg.horizon = sc.sim.horizon;
    cfg.warmup_fraction = sc.sim.warmup;
    return cfg;
}

}  // namespace edgechain::io
