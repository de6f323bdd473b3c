#pragma once

// Tiered conflict resolution: policy > capability-authority > temporal,
// with structured escalation when policy forbids every contested action.
//
// resolve() is pure; apply_resolution() mutates the graph under the
// workflow's single-writer rule.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "scf/conflict_detection.hpp"
#include "scf/errors.hpp"
#include "scf/intent_graph.hpp"
#include "scf/process_model.hpp"

namespace scf {

struct AgentAuthority {
    std::string agent_id;
    std::string role;
    int rank = 0;
    std::vector<std::string> skills;
    double historical_accuracy = 0.5;  // EWMA, see update_accuracy
};

inline void update_accuracy(AgentAuthority& a, bool correct, double ewma = 0.2) {
    a.historical_accuracy = (1.0 - ewma) * a.historical_accuracy + ewma * (correct ? 1.0 : 0.0);
}

enum class Disposition { Queued, Aborted, Modified };

inline const char* to_string(Disposition d) {
    switch (d) {
        case Disposition::Queued: return "queued";
        case Disposition::Aborted: return "aborted";
        case Disposition::Modified: return "modified";
    }
    return "?";
}

enum class Tier { Policy, Authority, Temporal, Escalated };

inline const char* to_string(Tier t) {
    switch (t) {
        case Tier::Policy: return "policy";
        case Tier::Authority: return "authority";
        case Tier::Temporal: return "temporal";
        case Tier::Escalated: return "escalated";
    }
    return "?";
}

struct Resolution {
    std::string conflict_id;
    std::optional<std::string> winner;
    std::vector<std::pair<std::string, Disposition>> losers;
    Tier tier = Tier::Temporal;
    std::optional<std::string> policy_id;
    std::string rationale;
};

struct TierAttempt {
    Tier tier;
    std::string reason;
};

struct ConflictReport {
    Conflict conflict;
    nlohmann::json subgraph;
    std::vector<TierAttempt> attempted;
};

inline nlohmann::json report_to_json(const ConflictReport& r) {
    nlohmann::json attempts = nlohmann::json::array();
    for (const auto& a : r.attempted)
        attempts.push_back({{"tier", to_string(a.tier)}, {"reason", a.reason}});
    return {{"conflict", conflict_to_json(r.conflict)},
            {"subgraph", r.subgraph},
            {"attempted_tiers", attempts}};
}

inline nlohmann::json resolution_to_json(const Resolution& r) {
    nlohmann::json losers = nlohmann::json::array();
    for (const auto& [id, d] : r.losers)
        losers.push_back({{"node_id", id}, {"disposition", to_string(d)}});
    nlohmann::json j{{"conflict_id", r.conflict_id},
                     {"tier", to_string(r.tier)},
                     {"losers", losers},
                     {"rationale", r.rationale}};
    j["winner"] = r.winner ? nlohmann::json(*r.winner) : nlohmann::json(nullptr);
    if (r.policy_id) j["policy_id"] = *r.policy_id;
    return j;
}

using ResolveOutcome = std::variant<Resolution, ConflictReport>;

namespace detail {

// Contradicted intents cannot meaningfully retry; contended ones requeue.
inline Disposition loser_disposition(int conflict_type) {
    return conflict_type == 1 ? Disposition::Aborted : Disposition::Queued;
}

inline bool policy_matches(const PolicyRule& p, const Conflict& c,
                           const std::vector<const IntentNode*>& nodes,
                           const std::set<std::string>& entity_types) {
    const auto& w = p.when;
    if (w.conflict_type && *w.conflict_type != c.conflict_type) return false;
    if (w.entity_type && !entity_types.count(*w.entity_type)) return false;
    if (!w.actions.empty()) {
        bool any = std::any_of(nodes.begin(), nodes.end(), [&](const IntentNode* n) {
            return std::find(w.actions.begin(), w.actions.end(), n->action) != w.actions.end();
        });
        if (!any) return false;
    }
    if (!w.roles.empty()) {
        bool any = std::any_of(nodes.begin(), nodes.end(), [&](const IntentNode* n) {
            return std::find(w.roles.begin(), w.roles.end(), n->role) != w.roles.end();
        });
        if (!any) return false;
    }
    return true;
}

}  // namespace detail

inline ResolveOutcome resolve(const Conflict& conflict, const IntentGraph& graph,
                              const ProcessModel& model,
                              const std::map<std::string, AgentAuthority>& authorities) {
    std::vector<const IntentNode*> nodes;
    for (const auto& id : conflict.node_ids) {
        const auto& n = graph.node(id);
        if (is_terminal(n.status))
            throw StaleConflict("conflict " + conflict.id + " references terminal node " + id);
        nodes.push_back(&n);
    }
    std::set<std::string> entity_types;
    for (const auto* n : nodes)
        for (const auto& t : n->targets)
            if (std::find(conflict.entity_ids.begin(), conflict.entity_ids.end(), t.entity_id) !=
                conflict.entity_ids.end())
                entity_types.insert(t.entity_type);

    const Disposition losing = detail::loser_disposition(conflict.conflict_type);
    auto finish = [&](const IntentNode* winner, Tier tier, std::optional<std::string> policy_id,
                      std::string rationale,
                      const std::set<std::string>& forced_aborts = {}) -> Resolution {
        Resolution r;
        r.conflict_id = conflict.id;
        r.winner = winner->id;
        r.tier = tier;
        r.policy_id = std::move(policy_id);
        r.rationale = std::move(rationale);
        for (const auto* n : nodes) {
            if (n == winner) continue;
            r.losers.emplace_back(
                n->id, forced_aborts.count(n->id) ? Disposition::Aborted : losing);
        }
        return r;
    };

    // ---- Tier 1: policy ----
    std::string policy_reason;
    {
        std::vector<const PolicyRule*> matching;
        for (const auto& p : model.policies)
            if (detail::policy_matches(p, conflict, nodes, entity_types)) matching.push_back(&p);
        if (matching.empty()) {
            policy_reason = "no matching policy";
        } else {
            int top = (*std::max_element(matching.begin(), matching.end(),
                                         [](const PolicyRule* a, const PolicyRule* b) {
                                             return a->priority < b->priority;
                                         }))
                          ->priority;
            std::vector<const PolicyRule*> rules;
            for (const auto* p : matching)
                if (p->priority == top) rules.push_back(p);

            std::set<std::string> forbidden;  // node ids whose action is forbidden
            const PolicyRule* first_forbid = nullptr;
            for (const auto* p : rules) {
                if (p->outcome.kind != PolicyOutcomeKind::ForbidAction) continue;
                if (!first_forbid) first_forbid = p;
                for (const auto* n : nodes)
                    if (n->action == p->outcome.value) forbidden.insert(n->id);
            }
            if (forbidden.size() == nodes.size()) {
                // Policy mandates escalation: every contested action is forbidden.
                ConflictReport report;
                report.conflict = conflict;
                report.subgraph = graph.conflict_subgraph(conflict.node_ids).to_json();
                report.attempted = {
                    {Tier::Policy, "policy forbids every contested action"},
                    {Tier::Authority, "not consulted: policy mandated escalation"},
                    {Tier::Temporal, "not consulted: policy mandated escalation"}};
                return report;
            }

            std::vector<const IntentNode*> survivors;
            for (const auto* n : nodes)
                if (!forbidden.count(n->id)) survivors.push_back(n);

            std::vector<std::pair<const PolicyRule*, const IntentNode*>> designated;
            bool ambiguous = false;
            for (const auto* p : rules) {
                if (p->outcome.kind == PolicyOutcomeKind::ForbidAction) continue;
                std::vector<const IntentNode*> hits;
                for (const auto* n : survivors) {
                    if (p->outcome.kind == PolicyOutcomeKind::PreferRole
                            ? n->role == p->outcome.value
                            : n->action == p->outcome.value)
                        hits.push_back(n);
                }
                if (hits.size() > 1) ambiguous = true;
                if (hits.size() == 1) designated.emplace_back(p, hits[0]);
            }
            std::set<const IntentNode*> distinct;
            for (const auto& [p, n] : designated) distinct.insert(n);

            if (!ambiguous && distinct.size() == 1) {
                const auto& [rule, winner] = designated.front();
                std::ostringstream why;
                why << "policy '" << rule->id << "' (priority " << rule->priority
                    << ") designates " << winner->id;
                return finish(winner, Tier::Policy, rule->id, why.str(), forbidden);
            }
            if (distinct.empty() && !forbidden.empty() && survivors.size() == 1) {
                std::ostringstream why;
                why << "policy '" << first_forbid->id << "' forbids all but " << survivors[0]->id;
                return finish(survivors[0], Tier::Policy, first_forbid->id, why.str(), forbidden);
            }
            policy_reason = distinct.size() > 1 ? "equal-priority policies designate different winners"
                                                : "matching policy does not single out a winner";
        }
    }

    // ---- Tier 2: capability authority ----
    std::string authority_reason;
    {
        struct Key {
            int rank;
            int relevance;
            double accuracy;
        };
        std::set<std::string> relevant_tags = entity_types;
        for (const auto* n : nodes) relevant_tags.insert(n->action);
        auto key_for = [&](const IntentNode* n) -> Key {
            auto it = authorities.find(n->agent_id);
            int rank;
            std::vector<std::string> skills;
            double acc = 0.5;
            if (it != authorities.end()) {
                rank = it->second.rank;
                skills = it->second.skills;
                acc = it->second.historical_accuracy;
            } else {
                const auto& r = model.role(n->role);
                rank = r.rank;
                skills = r.skills;
            }
            int rel = 0;
            for (const auto& s : skills)
                if (relevant_tags.count(s)) ++rel;
            return {rank, rel, acc};
        };
        auto better = [](const Key& a, const Key& b) {
            if (a.rank != b.rank) return a.rank < b.rank;  // 1 = highest authority
            if (a.relevance != b.relevance) return a.relevance > b.relevance;
            return a.accuracy > b.accuracy;
        };
        const IntentNode* best = nodes[0];
        Key best_key = key_for(best);
        bool tie = false;
        for (std::size_t i = 1; i < nodes.size(); ++i) {
            Key k = key_for(nodes[i]);
            if (better(k, best_key)) {
                best = nodes[i];
                best_key = k;
                tie = false;
            } else if (!better(best_key, k)) {
                tie = true;
            }
        }
        if (!tie) {
            std::ostringstream why;
            why << "authority: " << best->id << " (role " << best->role << ", rank "
                << best_key.rank << ", skill relevance " << best_key.relevance << ", accuracy "
                << best_key.accuracy << ")";
            return finish(best, Tier::Authority, std::nullopt, why.str());
        }
        authority_reason = "capability tie across contested agents";
    }

    // ---- Tier 3: temporal priority ----
    // Timestamps are strictly monotonic, so this tier cannot tie.
    const IntentNode* first = *std::min_element(
        nodes.begin(), nodes.end(),
        [](const IntentNode* a, const IntentNode* b) { return a->timestamp < b->timestamp; });
    std::ostringstream why;
    why << "temporal: " << first->id << " registered first (t=" << first->timestamp
        << "); policy: " << policy_reason << "; authority: " << authority_reason;
    return finish(first, Tier::Temporal, std::nullopt, why.str());
}

// Winner proceeds untouched; losers move to their disposition. Re-applying a
// resolution whose losers already moved throws IllegalStatusTransition.
inline void apply_resolution(const Resolution& r, IntentGraph& graph) {
    for (const auto& [id, disposition] : r.losers) {
        const auto& n = graph.node(id);
        switch (disposition) {
            case Disposition::Queued:
                if (n.status == IntentStatus::Registered)
                    graph.set_status(id, IntentStatus::Blocked);
                graph.set_status(id, IntentStatus::Queued);
                break;
            case Disposition::Aborted:
            case Disposition::Modified:
                if (n.status == IntentStatus::Registered)
                    graph.set_status(id, IntentStatus::Blocked);
                graph.set_status(id, IntentStatus::Aborted);
                break;
        }
    }
}

// Replaces a queued loser with a fresh intent whose pre-states reflect entity
// ground truth. If any expectation went stale the replacement becomes a no-op
// (empty postconditions); quantified demands shrink to the remaining capacity.
inline IntentNode requeue(IntentGraph& graph, const std::string& queued_id,
                          const std::string& winner_id,
                          const std::map<std::string, std::string>& updated_pre_states,
                          const std::map<std::string, double>& remaining_capacity = {}) {
    const auto& original = graph.node(queued_id);
    if (original.status != IntentStatus::Queued)
        throw Error("requeue: node " + queued_id + " is not queued");
    if (graph.node(winner_id).status != IntentStatus::Committed)
        throw WinnerNotCommitted("winner " + winner_id + " has not committed");

    IntentNode repl = original;
    repl.id = original.id + "~r";
    repl.timestamp = graph.max_timestamp() + 1;
    repl.status = IntentStatus::Registered;
    repl.causal_deps = {winner_id};
    repl.replacement_id.reset();

    bool stale = false;
    for (auto& t : repl.targets) {
        auto it = updated_pre_states.find(t.entity_id);
        if (it != updated_pre_states.end() && it->second != t.pre_state) {
            t.pre_state = it->second;
            stale = true;
        }
    }
    if (!repl.demands.empty()) {
        double remaining = 0.0;
        bool feasible = true;
        std::vector<Demand> adjusted;
        for (const auto& d : repl.demands) {
            auto it = remaining_capacity.find(d.entity_id);
            remaining = it == remaining_capacity.end() ? d.amount : it->second;
            if (remaining <= 0.0) {
                feasible = false;
                break;
            }
            adjusted.push_back({d.entity_id, std::min(d.amount, remaining)});
        }
        if (feasible) {
            repl.demands = std::move(adjusted);
        } else {
            repl.demands.clear();
            repl.postconditions.clear();  // nothing left to claim
        }
    } else if (stale) {
        repl.postconditions.clear();  // assumption broke; replay as a no-op
    }

    graph.register_intent(repl);
    graph.set_replacement(queued_id, repl.id);
    graph.set_status(queued_id, IntentStatus::Aborted);
    return graph.node(repl.id);
}

}  // namespace scf
