#pragma once

// Priority assignment at the blockchain manager and closed-form mean sojourn
// times for an M/M/1 server, either FCFS with equal priorities or
// preemptive-resume with one priority class per entity.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edgechain/error.hpp"

namespace edgechain::queueing {

enum class Urgency { Urgent, Normal, NonUrgent };

constexpr std::string_view to_string(Urgency u) noexcept {
    switch (u) {
        case Urgency::Urgent:    return "urgent";
        case Urgency::Normal:    return "normal";
        case Urgency::NonUrgent: return "non-urgent";
    }
    return "?";
}

inline std::optional<Urgency> parse_urgency(std::string_view text) noexcept {
    if (text == "urgent") return Urgency::Urgent;
    if (text == "normal") return Urgency::Normal;
    if (text == "non-urgent") return Urgency::NonUrgent;
    return std::nullopt;
}

struct EntityProfile {
    int id = 1;
    double arrival_rate = 1.0;  // transactions/s
    Urgency urgency = Urgency::Normal;
    double weight = 1.0;

    bool operator==(const EntityProfile&) const = default;
};

struct QueueSystem {
    std::vector<EntityProfile> entities;
    double service_rate = 1.0;  // transactions/s
};

/// Entity ids by rank; front() is served first.
struct PriorityOrder {
    std::vector<int> ranked_ids;
};

enum class Discipline { EqualPriority, UrgencyPriority };

struct SojournEntry {
    int entity_id = 0;
    int rank = 0;  // 1-based; 0 under equal priority
    double sojourn = 0.0;
};

struct SojournReport {
    Discipline discipline = Discipline::EqualPriority;
    std::vector<SojournEntry> entries;  // in rank order for UrgencyPriority, input order otherwise

    double sojourn_of(int entity_id) const {
        for (const auto& e : entries) {
            if (e.entity_id == entity_id) return e.sojourn;
        }
        fail(ErrorKind::InvalidInput, "no sojourn entry for entity " + std::to_string(entity_id));
    }
};

inline double total_arrival_rate(const QueueSystem& system) noexcept {
    return std::accumulate(system.entities.begin(), system.entities.end(), 0.0,
                           [](double acc, const EntityProfile& e) { return acc + e.arrival_rate; });
}

inline double stability_margin(const QueueSystem& system) noexcept {
    return system.service_rate - total_arrival_rate(system);
}

/// Urgency first, then heavier weight, then lower id.
inline PriorityOrder assign_priorities(const std::vector<EntityProfile>& entities) {
    if (entities.empty()) fail(ErrorKind::InvalidInput, "cannot rank an empty entity list");
    std::vector<const EntityProfile*> sorted;
    sorted.reserve(entities.size());
    for (const auto& e : entities) sorted.push_back(&e);
    std::sort(sorted.begin(), sorted.end(), [](const EntityProfile* a, const EntityProfile* b) {
        if (a->urgency != b->urgency) return static_cast<int>(a->urgency) < static_cast<int>(b->urgency);
        if (a->weight != b->weight) return a->weight > b->weight;
        return a->id < b->id;
    });
    PriorityOrder order;
    for (const auto* e : sorted) order.ranked_ids.push_back(e->id);
    return order;
}

namespace detail {

inline void require_stable(const QueueSystem& system) {
    if (!(system.service_rate > 0.0) || !std::isfinite(system.service_rate)) {
        fail(ErrorKind::InvalidInput, "service rate must be positive and finite");
    }
    for (const auto& e : system.entities) {
        if (!(e.arrival_rate > 0.0) || !std::isfinite(e.arrival_rate)) {
            fail(ErrorKind::InvalidInput, "entity " + std::to_string(e.id) + " needs a positive finite arrival rate");
        }
    }
    if (!(stability_margin(system) > 0.0)) {
        fail(ErrorKind::Instability, "total arrival rate must stay below the service rate");
    }
}

}  // namespace detail

/// M/M/1 response time 1/(mu - sum lambda), identical for every entity.
inline SojournReport sojourn_equal(const QueueSystem& system) {
    detail::require_stable(system);
    const double s = 1.0 / stability_margin(system);
    SojournReport report{Discipline::EqualPriority, {}};
    for (const auto& e : system.entities) report.entries.push_back({e.id, 0, s});
    return report;
}

/// Preemptive-resume mean sojourn for the class at each rank:
///   S_i = (sum_{n<=i} rho_n / mu) / ((1 - sigma_i)(1 - sigma_{i-1})) + (1/mu) / (1 - sigma_{i-1})
/// with rho_n = lambda_n / mu and sigma_i = sum_{n<=i} rho_n.
inline SojournReport sojourn_priority(const QueueSystem& system, const PriorityOrder& order) {
    detail::require_stable(system);
    if (order.ranked_ids.size() != system.entities.size()) {
        fail(ErrorKind::InvalidInput, "priority order must rank every entity exactly once");
    }
    const double mu = system.service_rate;
    const double mean_service = 1.0 / mu;
    SojournReport report{Discipline::UrgencyPriority, {}};
    std::vector<bool> seen(system.entities.size(), false);
    double sigma_prev = 0.0;
    int rank = 0;
    for (int id : order.ranked_ids) {
        auto it = std::find_if(system.entities.begin(), system.entities.end(),
                               [id](const EntityProfile& e) { return e.id == id; });
        if (it == system.entities.end()) fail(ErrorKind::InvalidInput, "unknown entity id " + std::to_string(id));
        auto idx = static_cast<std::size_t>(it - system.entities.begin());
        if (seen[idx]) fail(ErrorKind::InvalidInput, "entity " + std::to_string(id) + " ranked twice");
        seen[idx] = true;

        const double sigma = sigma_prev + it->arrival_rate / mu;
        const double residual_work = sigma * mean_service;
        const double s = residual_work / ((1.0 - sigma) * (1.0 - sigma_prev)) + mean_service / (1.0 - sigma_prev);
        report.entries.push_back({id, ++rank, s});
        sigma_prev = sigma;
    }
    return report;
}

}  // namespace edgechain::queueing
