#pragma once

// Pairwise semantic alignment scoring and threshold-triggered belief
// re-synchronization.
//
//   sas = 0.4 * belief overlap + 0.4 * plan validity + 0.2 * confidence alignment
//
// Vacuous cases score 1: no shared entities / no plan is not divergence.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scf/process_model.hpp"

namespace scf {

struct PlannedAction {
    std::string action;
    std::string entity_id;
    std::string entity_type;
    std::string from_state;
    std::string to_state;
};

struct AgentContextView {
    std::string agent_id;
    std::string role;
    std::map<std::string, std::string> entity_beliefs;  // entity id -> believed state
    std::optional<PlannedAction> planned_action;
    double confidence = 0.5;
};

struct SasComponents {
    double overlap = 1.0;
    double plan_validity = 1.0;
    double confidence_alignment = 1.0;
};

struct SasResult {
    double sas = 1.0;
    SasComponents components;
};

struct DriftEvent {
    std::string workflow_id;
    std::string agent_a;
    std::string agent_b;
    double sas = 1.0;
    SasComponents components;
    double threshold = 0.0;
    bool triggered_resync = false;
    std::uint64_t at = 0;
};

namespace detail {

inline double belief_overlap(const AgentContextView& v,
                             const std::map<std::string, std::string>& ground_truth) {
    std::size_t shared = 0, correct = 0;
    for (const auto& [entity, state] : v.entity_beliefs) {
        auto it = ground_truth.find(entity);
        if (it == ground_truth.end()) continue;
        ++shared;
        if (it->second == state) ++correct;
    }
    if (shared == 0) return 1.0;
    return static_cast<double>(correct) / static_cast<double>(shared);
}

inline double plan_validity(const AgentContextView& v,
                            const std::map<std::string, std::string>& ground_truth,
                            const ProcessModel& model) {
    if (!v.planned_action) return 1.0;
    const auto& p = *v.planned_action;
    auto it = ground_truth.find(p.entity_id);
    const std::string& current = it == ground_truth.end() ? p.from_state : it->second;
    if (!model.find_entity_type(p.entity_type)) return 0.0;
    return valid_transition(model, p.entity_type, current, p.to_state, p.action, v.role) ? 1.0
                                                                                         : 0.0;
}

}  // namespace detail

inline SasResult semantic_alignment_score(const AgentContextView& a, const AgentContextView& b,
                                          const std::map<std::string, std::string>& ground_truth,
                                          const ProcessModel& model, double base_rate) {
    SasResult r;
    r.components.overlap =
        0.5 * (detail::belief_overlap(a, ground_truth) + detail::belief_overlap(b, ground_truth));
    r.components.plan_validity = 0.5 * (detail::plan_validity(a, ground_truth, model) +
                                        detail::plan_validity(b, ground_truth, model));
    r.components.confidence_alignment =
        1.0 - 0.5 * (std::abs(a.confidence - base_rate) + std::abs(b.confidence - base_rate));
    double sas = 0.4 * r.components.overlap + 0.4 * r.components.plan_validity +
                 0.2 * r.components.confidence_alignment;
    r.sas = std::clamp(sas, 0.0, 1.0);
    return r;
}

// Scores every agent pair; pairs below theta get both belief maps overwritten
// from ground truth (for the entities truth knows about). Returns all events;
// only triggered ones count as drift events in the metrics.
inline std::vector<DriftEvent> check_and_resync(
    const std::string& workflow_id, std::map<std::string, AgentContextView>& views,
    const std::map<std::string, std::string>& ground_truth, const ProcessModel& model,
    double base_rate, double theta, std::uint64_t at) {
    std::vector<DriftEvent> events;
    std::vector<std::string> ids;
    ids.reserve(views.size());
    for (const auto& [id, v] : views) ids.push_back(id);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t j = i + 1; j < ids.size(); ++j) {
            AgentContextView& a = views.at(ids[i]);
            AgentContextView& b = views.at(ids[j]);
            const SasResult r = semantic_alignment_score(a, b, ground_truth, model, base_rate);
            DriftEvent ev{workflow_id, ids[i], ids[j], r.sas,
                          r.components, theta,  false,  at};
            if (r.sas < theta) {
                ev.triggered_resync = true;
                for (auto* v : {&a, &b}) {
                    for (auto& [entity, belief] : v->entity_beliefs) {
                        auto it = ground_truth.find(entity);
                        if (it != ground_truth.end()) belief = it->second;
                    }
                }
            }
            events.push_back(std::move(ev));
        }
    }
    return events;
}

}  // namespace scf
