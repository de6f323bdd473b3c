#pragma once

// Rule-based conflict detection over the intent graph.
//
//   Type 1  contradictory intent  — postconditions map to mutually exclusive
//           canonical states (without PCL: raw string inequality).
//   Type 2  resource contention   — quantified demand above capacity, or a
//           shared required pre-state invalidated by both postconditions.
//   Type 3  causal violation      — one node's postcondition invalidates the
//           other's expected pre-state while the pair is unordered, or a
//           model temporal constraint is violated by the pair.
//
// Detectors are pure functions of (graph, model, config); candidate pairs are
// the live pairs connected by a potential-conflict or causal-chain edge.

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "scf/errors.hpp"
#include "scf/intent_graph.hpp"
#include "scf/process_model.hpp"

namespace scf {

struct Conflict {
    std::string id;
    int conflict_type = 0;  // 1, 2, 3
    std::vector<std::string> node_ids;    // sorted, >= 2
    std::vector<std::string> entity_ids;  // sorted, nonempty
    std::string evidence;
    std::uint64_t detected_at = 0;
};

struct DetectorConfig {
    bool pcl_enabled = true;  // synonym canonicalization + mutex lookup
    std::map<std::string, double> capacity_table;
};

namespace detail {

inline std::string resolve_state(const ProcessModel& model, const DetectorConfig& cfg,
                                 const std::string& entity_type, const std::string& state) {
    if (!cfg.pcl_enabled) return state;
    return canonicalize(model, entity_type, state).state;
}

struct PairFinding {
    int type;
    std::string entity_id;
    std::string evidence;
};

inline void find_type1(const IntentGraph&, const ProcessModel& model, const DetectorConfig& cfg,
                       const IntentNode& a, const IntentNode& b,
                       std::vector<PairFinding>& out) {
    for (const auto& pa : a.postconditions) {
        const auto* pb = b.post_for(pa.entity_id);
        if (!pb) continue;
        const auto* ta = a.target_for(pa.entity_id);
        if (!ta) continue;
        if (cfg.pcl_enabled) {
            const std::string ca = resolve_state(model, cfg, ta->entity_type, pa.post_state);
            const std::string cb = resolve_state(model, cfg, ta->entity_type, pb->post_state);
            if (ca != cb && mutually_exclusive(model, ta->entity_type, ca, cb)) {
                std::ostringstream ev;
                ev << "type1: post(" << pa.post_state << ")->" << ca << " vs post("
                   << pb->post_state << ")->" << cb << " mutually exclusive on "
                   << pa.entity_id;
                out.push_back({1, pa.entity_id, ev.str()});
            }
        } else if (pa.post_state != pb->post_state) {
            // Raw string comparison only; aliases of one canonical state
            // surface here as false positives.
            std::ostringstream ev;
            ev << "type1(no-pcl): raw post mismatch '" << pa.post_state << "' vs '"
               << pb->post_state << "' on " << pa.entity_id;
            out.push_back({1, pa.entity_id, ev.str()});
        }
    }
}

inline void find_type2(const IntentGraph&, const ProcessModel& model, const DetectorConfig& cfg,
                       const IntentNode& a, const IntentNode& b,
                       std::vector<PairFinding>& out) {
    // (a) quantified contention against a capacity-tracked entity.
    for (const auto& da : a.demands) {
        const auto* db = b.demand_for(da.entity_id);
        if (!db) continue;
        auto cap = cfg.capacity_table.find(da.entity_id);
        if (cap == cfg.capacity_table.end())
            throw MissingCapacity("no capacity registered for entity " + da.entity_id);
        if (da.amount + db->amount > cap->second) {
            std::ostringstream ev;
            ev << "type2: demand " << da.amount << " + " << db->amount << " > capacity "
               << cap->second << " on " << da.entity_id;
            out.push_back({2, da.entity_id, ev.str()});
        }
    }
    // (b) shared required pre-state invalidated by both postconditions.
    for (const auto& ta : a.targets) {
        const auto* tb = b.target_for(ta.entity_id);
        if (!tb) continue;
        const std::string pre_a = resolve_state(model, cfg, ta.entity_type, ta.pre_state);
        const std::string pre_b = resolve_state(model, cfg, tb->entity_type, tb->pre_state);
        if (pre_a != pre_b) continue;
        const auto* pa = a.post_for(ta.entity_id);
        const auto* pb = b.post_for(ta.entity_id);
        if (!pa || !pb) continue;
        const std::string post_a = resolve_state(model, cfg, ta.entity_type, pa->post_state);
        const std::string post_b = resolve_state(model, cfg, tb->entity_type, pb->post_state);
        if (post_a != pre_a && post_b != pre_b) {
            std::ostringstream ev;
            ev << "type2: shared pre-state '" << pre_a << "' on " << ta.entity_id
               << " invalidated by posts '" << post_a << "' and '" << post_b << "'";
            out.push_back({2, ta.entity_id, ev.str()});
        }
    }
}

inline void find_type3(const IntentGraph& graph, const ProcessModel& model,
                       const DetectorConfig& cfg, const IntentNode& a, const IntentNode& b,
                       std::vector<PairFinding>& out) {
    const bool ordered = graph.has_edge_between(a.id, b.id, EdgeKind::Dependency);
    if (!ordered) {
        auto check = [&](const IntentNode& writer, const IntentNode& reader) {
            for (const auto& p : writer.postconditions) {
                const auto* t = reader.target_for(p.entity_id);
                if (!t) continue;
                const std::string post =
                    resolve_state(model, cfg, t->entity_type, p.post_state);
                const std::string pre = resolve_state(model, cfg, t->entity_type, t->pre_state);
                if (post != pre) {
                    std::ostringstream ev;
                    ev << "type3: post '" << post << "' by " << writer.id
                       << " invalidates expected pre '" << pre << "' of " << reader.id
                       << " on " << p.entity_id;
                    out.push_back({3, p.entity_id, ev.str()});
                }
            }
        };
        check(a, b);
        check(b, a);
    }
    // Model-wide temporal ordering between action types.
    for (const auto& rule : model.temporal) {
        const IntentNode* before = nullptr;
        const IntentNode* after = nullptr;
        if (a.action == rule.before && b.action == rule.after) {
            before = &a;
            after = &b;
        } else if (b.action == rule.before && a.action == rule.after) {
            before = &b;
            after = &a;
        }
        if (before && after && after->timestamp < before->timestamp) {
            std::set<std::string> ids;
            for (const auto& t : a.targets) ids.insert(t.entity_id);
            for (const auto& t : b.targets) ids.insert(t.entity_id);
            for (const auto& e : ids) {
                std::ostringstream ev;
                ev << "type3: temporal rule (" << rule.before << " before " << rule.after
                   << ") violated: " << after->id << " precedes " << before->id;
                out.push_back({3, e, ev.str()});
            }
        }
    }
}

}  // namespace detail

inline std::optional<Conflict> make_pair_conflict(std::vector<detail::PairFinding> findings,
                                                  const IntentNode& a, const IntentNode& b,
                                                  int type, std::uint64_t detected_at) {
    std::set<std::string> entities;
    std::string evidence;
    for (const auto& f : findings) {
        if (f.type != type) continue;
        entities.insert(f.entity_id);
        if (!evidence.empty()) evidence += "; ";
        evidence += f.evidence;
    }
    if (entities.empty()) return std::nullopt;
    Conflict c;
    c.conflict_type = type;
    c.node_ids = {a.id, b.id};
    std::sort(c.node_ids.begin(), c.node_ids.end());
    c.entity_ids.assign(entities.begin(), entities.end());
    c.evidence = std::move(evidence);
    c.detected_at = detected_at;
    c.id = "c" + std::to_string(detected_at) + "-t" + std::to_string(type) + "-" + c.node_ids[0];
    return c;
}

inline std::optional<Conflict> detect_type1(const IntentGraph& g, const ProcessModel& m,
                                            const DetectorConfig& cfg, const std::string& a_id,
                                            const std::string& b_id) {
    const auto& a = g.node(a_id);
    const auto& b = g.node(b_id);
    std::vector<detail::PairFinding> f;
    detail::find_type1(g, m, cfg, a, b, f);
    return make_pair_conflict(std::move(f), a, b, 1, g.max_timestamp());
}

inline std::optional<Conflict> detect_type2(const IntentGraph& g, const ProcessModel& m,
                                            const DetectorConfig& cfg, const std::string& a_id,
                                            const std::string& b_id) {
    const auto& a = g.node(a_id);
    const auto& b = g.node(b_id);
    std::vector<detail::PairFinding> f;
    detail::find_type2(g, m, cfg, a, b, f);
    return make_pair_conflict(std::move(f), a, b, 2, g.max_timestamp());
}

inline std::optional<Conflict> detect_type3(const IntentGraph& g, const ProcessModel& m,
                                            const DetectorConfig& cfg, const std::string& a_id,
                                            const std::string& b_id) {
    const auto& a = g.node(a_id);
    const auto& b = g.node(b_id);
    std::vector<detail::PairFinding> f;
    detail::find_type3(g, m, cfg, a, b, f);
    return make_pair_conflict(std::move(f), a, b, 3, g.max_timestamp());
}

// Runs all detectors over every live candidate pair and groups findings at
// entity level so one contested entity yields one conflict per type no matter
// how many pairwise findings touch it. Deterministic result order.
inline std::vector<Conflict> detect_all(const IntentGraph& g, const ProcessModel& m,
                                        const DetectorConfig& cfg) {
    const auto& nodes = g.nodes();
    const std::uint64_t now = g.max_timestamp();

    // (entity, type) -> (node set, evidence list)
    std::map<std::pair<std::string, int>, std::pair<std::set<std::string>, std::vector<std::string>>>
        buckets;

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!is_live(nodes[i].status)) continue;
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            if (!is_live(nodes[j].status)) continue;
            const auto& a = nodes[i];
            const auto& b = nodes[j];
            if (!g.has_edge_between(a.id, b.id, EdgeKind::PotentialConflict) &&
                !g.has_edge_between(a.id, b.id, EdgeKind::CausalChain))
                continue;
            std::vector<detail::PairFinding> f;
            detail::find_type1(g, m, cfg, a, b, f);
            detail::find_type2(g, m, cfg, a, b, f);
            detail::find_type3(g, m, cfg, a, b, f);
            for (auto& x : f) {
                auto& bucket = buckets[{x.entity_id, x.type}];
                bucket.first.insert(a.id);
                bucket.first.insert(b.id);
                bucket.second.push_back(std::move(x.evidence));
            }
        }
    }

    // Merge buckets that share (type, node set) into one conflict with the
    // union of entities; then order deterministically.
    std::map<std::pair<int, std::vector<std::string>>,
             std::pair<std::set<std::string>, std::vector<std::string>>>
        merged;
    for (auto& [key, val] : buckets) {
        std::vector<std::string> node_ids(val.first.begin(), val.first.end());
        auto& slot = merged[{key.second, node_ids}];
        slot.first.insert(key.first);
        for (auto& ev : val.second) slot.second.push_back(std::move(ev));
    }

    std::vector<Conflict> out;
    for (auto& [key, val] : merged) {
        Conflict c;
        c.conflict_type = key.first;
        c.node_ids = key.second;
        c.entity_ids.assign(val.first.begin(), val.first.end());
        std::sort(val.second.begin(), val.second.end());
        val.second.erase(std::unique(val.second.begin(), val.second.end()), val.second.end());
        std::string ev;
        for (const auto& x : val.second) {
            if (!ev.empty()) ev += "; ";
            ev += x;
        }
        c.evidence = std::move(ev);
        c.detected_at = now;
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const Conflict& x, const Conflict& y) {
        if (x.detected_at != y.detected_at) return x.detected_at < y.detected_at;
        if (x.conflict_type != y.conflict_type) return x.conflict_type < y.conflict_type;
        if (x.node_ids[0] != y.node_ids[0]) return x.node_ids[0] < y.node_ids[0];
        return x.entity_ids < y.entity_ids;
    });
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i].id = "c" + std::to_string(now) + "-" + std::to_string(i);
    return out;
}

inline nlohmann::json conflict_to_json(const Conflict& c) {
    return {{"id", c.id},
            {"type", c.conflict_type},
            {"node_ids", c.node_ids},
            {"entity_ids", c.entity_ids},
            {"evidence", c.evidence},
            {"detected_at", c.detected_at}};
}

}  // namespace scf
