#pragma once

// Semantic intent graph: registered intents plus automatically constructed
// dependency / potential-conflict / causal-chain edges.
//
// Single-writer per workflow: callers serialize mutations of one graph.
// Edge direction is always earlier-timestamp -> later-timestamp, so the
// dependency + causal-chain subgraph is acyclic by construction.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scf/errors.hpp"
#include "scf/process_model.hpp"

namespace scf {

enum class IntentStatus { Registered, Blocked, Queued, Committed, Aborted };

inline const char* to_string(IntentStatus s) {
    switch (s) {
        case IntentStatus::Registered: return "registered";
        case IntentStatus::Blocked: return "blocked";
        case IntentStatus::Queued: return "queued";
        case IntentStatus::Committed: return "committed";
        case IntentStatus::Aborted: return "aborted";
    }
    return "?";
}

inline bool is_terminal(IntentStatus s) {
    return s == IntentStatus::Committed || s == IntentStatus::Aborted;
}
// Live for conflict detection purposes.
inline bool is_live(IntentStatus s) {
    return s == IntentStatus::Registered || s == IntentStatus::Blocked;
}

struct TargetRef {
    std::string entity_id;
    std::string entity_type;
    std::string pre_state;  // expected state before execution

    bool operator==(const TargetRef&) const = default;
};

struct PostCondition {
    std::string entity_id;
    std::string post_state;

    bool operator==(const PostCondition&) const = default;
};

// Quantified demand against a capacity-tracked entity.
struct Demand {
    std::string entity_id;
    double amount = 0.0;

    bool operator==(const Demand&) const = default;
};

struct IntentNode {
    std::string id;
    std::string agent_id;
    std::string role;
    std::string action;
    std::vector<TargetRef> targets;
    std::vector<PostCondition> postconditions;
    std::vector<Demand> demands;
    double confidence = 1.0;
    std::uint64_t timestamp = 0;
    std::vector<std::string> causal_deps;
    IntentStatus status = IntentStatus::Registered;
    std::optional<std::string> replacement_id;  // set when requeue replaced this node

    const TargetRef* target_for(const std::string& entity_id) const {
        for (const auto& t : targets)
            if (t.entity_id == entity_id) return &t;
        return nullptr;
    }
    const PostCondition* post_for(const std::string& entity_id) const {
        for (const auto& p : postconditions)
            if (p.entity_id == entity_id) return &p;
        return nullptr;
    }
    const Demand* demand_for(const std::string& entity_id) const {
        for (const auto& d : demands)
            if (d.entity_id == entity_id) return &d;
        return nullptr;
    }
    std::set<std::string> target_entity_ids() const {
        std::set<std::string> out;
        for (const auto& t : targets) out.insert(t.entity_id);
        return out;
    }
};

enum class EdgeKind { Dependency, PotentialConflict, CausalChain };

inline const char* to_string(EdgeKind k) {
    switch (k) {
        case EdgeKind::Dependency: return "dependency";
        case EdgeKind::PotentialConflict: return "potential-conflict";
        case EdgeKind::CausalChain: return "causal-chain";
    }
    return "?";
}

struct IntentEdge {
    std::string from;
    std::string to;
    EdgeKind kind;

    bool operator==(const IntentEdge&) const = default;
};

class IntentGraph {
public:
    using StatusHook = std::function<void(const IntentNode&, IntentStatus /*old*/)>;

    explicit IntentGraph(std::string workflow_id = "", const ProcessModel* model = nullptr)
        : workflow_id_(std::move(workflow_id)), model_(model) {}

    const std::string& workflow_id() const { return workflow_id_; }

    void set_status_hook(StatusHook hook) { status_hook_ = std::move(hook); }

    bool contains(const std::string& id) const { return index_.count(id) > 0; }

    const IntentNode& node(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) throw UnknownNode("unknown intent node: " + id);
        return nodes_[it->second];
    }

    // Timestamp (= registration) order.
    const std::vector<IntentNode>& nodes() const { return nodes_; }
    const std::vector<IntentEdge>& edges() const { return edges_; }

    std::uint64_t max_timestamp() const {
        return nodes_.empty() ? 0 : nodes_.back().timestamp;
    }

    bool has_edge(const std::string& from, const std::string& to, EdgeKind kind) const {
        return std::any_of(edges_.begin(), edges_.end(), [&](const IntentEdge& e) {
            return e.from == from && e.to == to && e.kind == kind;
        });
    }
    bool has_edge_between(const std::string& a, const std::string& b, EdgeKind kind) const {
        return has_edge(a, b, kind) || has_edge(b, a, kind);
    }
    bool any_edge_between(const std::string& a, const std::string& b) const {
        return std::any_of(edges_.begin(), edges_.end(), [&](const IntentEdge& e) {
            return (e.from == a && e.to == b) || (e.from == b && e.to == a);
        });
    }

    // Edges the given candidate node would acquire against the current graph.
    // Pure: depends only on node contents (and the process model for
    // composite-state coupling); deterministic and order-independent.
    std::vector<IntentEdge> build_edges(const IntentNode& n) const {
        std::vector<IntentEdge> out;
        for (const auto& u : nodes_) {
            if (u.id == n.id || is_terminal(u.status)) continue;
            const IntentNode& earlier = u.timestamp < n.timestamp ? u : n;
            const IntentNode& later = u.timestamp < n.timestamp ? n : u;

            // (1) dependency: explicit causal_deps, or the later node expects
            // exactly the state the earlier one will post on a shared entity.
            bool dep = std::find(later.causal_deps.begin(), later.causal_deps.end(),
                                 earlier.id) != later.causal_deps.end();
            if (!dep) {
                for (const auto& t : later.targets) {
                    if (const auto* p = earlier.post_for(t.entity_id);
                        p && p->post_state == t.pre_state) {
                        dep = true;
                        break;
                    }
                }
            }
            if (dep) {
                out.push_back({earlier.id, later.id, EdgeKind::Dependency});
                continue;  // an ordered pair is not a conflict candidate
            }

            // (2) potential-conflict: overlapping target entities.
            const auto a_ids = earlier.target_entity_ids();
            bool overlap = false;
            for (const auto& t : later.targets)
                if (a_ids.count(t.entity_id)) {
                    overlap = true;
                    break;
                }
            if (overlap) out.push_back({earlier.id, later.id, EdgeKind::PotentialConflict});

            // (3) causal-chain: the earlier node posts on one entity while the
            // later one assumes a pre-state on a different entity of a coupled
            // type (composite-state coupling via shared transition rows).
            if (model_) {
                bool chained = false;
                for (const auto& p : earlier.postconditions) {
                    const auto* pt = earlier.target_for(p.entity_id);
                    if (!pt) continue;
                    for (const auto& t : later.targets) {
                        if (t.entity_id == p.entity_id) continue;
                        if (types_coupled(*model_, pt->entity_type, t.entity_type)) {
                            chained = true;
                            break;
                        }
                    }
                    if (chained) break;
                }
                if (chained) out.push_back({earlier.id, later.id, EdgeKind::CausalChain});
            }
        }
        return out;
    }

    // Stores the node (status forced to registered) and materializes its edges.
    const std::string& register_intent(IntentNode n) {
        if (contains(n.id)) throw DuplicateId("duplicate intent id: " + n.id);
        if (!nodes_.empty() && n.timestamp <= nodes_.back().timestamp)
            throw NonMonotonicTimestamp("timestamp " + std::to_string(n.timestamp) +
                                        " not greater than " +
                                        std::to_string(nodes_.back().timestamp));
        for (const auto& p : n.postconditions)
            if (!n.target_for(p.entity_id))
                throw Error("postcondition entity '" + p.entity_id + "' missing from targets");
        for (const auto& d : n.demands)
            if (!n.target_for(d.entity_id))
                throw Error("demand entity '" + d.entity_id + "' missing from targets");

        n.status = IntentStatus::Registered;
        auto new_edges = build_edges(n);
        index_[n.id] = nodes_.size();
        nodes_.push_back(std::move(n));
        for (auto& e : new_edges) edges_.push_back(std::move(e));
        return nodes_.back().id;
    }

    void set_status(const std::string& id, IntentStatus next) {
        auto it = index_.find(id);
        if (it == index_.end()) throw UnknownNode("unknown intent node: " + id);
        IntentNode& n = nodes_[it->second];
        if (!allowed(n.status, next))
            throw IllegalStatusTransition(std::string("illegal status transition ") +
                                          to_string(n.status) + " -> " + to_string(next) +
                                          " on " + id);
        const IntentStatus old = n.status;
        n.status = next;
        if (status_hook_) status_hook_(n, old);
    }

    void set_replacement(const std::string& id, const std::string& replacement) {
        auto it = index_.find(id);
        if (it == index_.end()) throw UnknownNode("unknown intent node: " + id);
        nodes_[it->second].replacement_id = replacement;
    }

    // Induced subgraph on the given nodes plus their 1-hop dependency /
    // causal-chain neighbors. Used for escalation reports.
    IntentGraph conflict_subgraph(const std::vector<std::string>& ids) const {
        std::set<std::string> keep;
        for (const auto& id : ids) {
            node(id);  // throws UnknownNode
            keep.insert(id);
        }
        for (const auto& e : edges_) {
            if (e.kind == EdgeKind::PotentialConflict) continue;
            const bool from_seed =
                std::find(ids.begin(), ids.end(), e.from) != ids.end();
            const bool to_seed = std::find(ids.begin(), ids.end(), e.to) != ids.end();
            if (from_seed) keep.insert(e.to);
            if (to_seed) keep.insert(e.from);
        }
        IntentGraph sub(workflow_id_, model_);
        for (const auto& n : nodes_)
            if (keep.count(n.id)) {
                sub.index_[n.id] = sub.nodes_.size();
                sub.nodes_.push_back(n);
            }
        for (const auto& e : edges_)
            if (keep.count(e.from) && keep.count(e.to)) sub.edges_.push_back(e);
        return sub;
    }

    nlohmann::json to_json() const {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& n : nodes_) {
            nlohmann::json targets = nlohmann::json::array();
            for (const auto& t : n.targets)
                targets.push_back({{"entity_id", t.entity_id},
                                   {"entity_type", t.entity_type},
                                   {"pre_state", t.pre_state}});
            nlohmann::json posts = nlohmann::json::array();
            for (const auto& p : n.postconditions)
                posts.push_back({{"entity_id", p.entity_id}, {"post_state", p.post_state}});
            nodes.push_back({{"id", n.id},
                             {"agent_id", n.agent_id},
                             {"role", n.role},
                             {"action", n.action},
                             {"targets", targets},
                             {"postconditions", posts},
                             {"confidence", n.confidence},
                             {"timestamp", n.timestamp},
                             {"causal_deps", n.causal_deps},
                             {"status", to_string(n.status)}});
        }
        nlohmann::json edges = nlohmann::json::array();
        for (const auto& e : edges_)
            edges.push_back({{"from", e.from}, {"to", e.to}, {"kind", to_string(e.kind)}});
        return {{"workflow_id", workflow_id_}, {"nodes", nodes}, {"edges", edges}};
    }

private:
    static bool allowed(IntentStatus from, IntentStatus to) {
        switch (from) {
            case IntentStatus::Registered:
                return to == IntentStatus::Blocked || to == IntentStatus::Committed;
            case IntentStatus::Blocked:
                return to == IntentStatus::Queued || to == IntentStatus::Aborted ||
                       to == IntentStatus::Committed;
            case IntentStatus::Queued:
                // Replay happens through a replacement node; the original aborts.
                return to == IntentStatus::Aborted;
            case IntentStatus::Committed:
            case IntentStatus::Aborted:
                return false;
        }
        return false;
    }

    std::string workflow_id_;
    const ProcessModel* model_;
    std::vector<IntentNode> nodes_;
    std::map<std::string, std::size_t> index_;
    std::vector<IntentEdge> edges_;
    StatusHook status_hook_;
};

}  // namespace scf
