#pragma once

// Independent brute-force re-statement of the conflict rules, used as the
// oracle for detect_all. Deliberately shares no code with the detection
// engine: every rule is re-derived from its definition over plain loops.

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "scf/conflict_detection.hpp"
#include "scf/intent_graph.hpp"
#include "scf/process_model.hpp"

namespace scf_test {

// (type, sorted node ids, sorted entity ids)
using OracleConflict = std::tuple<int, std::vector<std::string>, std::vector<std::string>>;

inline std::vector<OracleConflict> brute_force_detect(const scf::IntentGraph& g,
                                                      const scf::ProcessModel& m,
                                                      const scf::DetectorConfig& cfg) {
    auto canon = [&](const std::string& type, const std::string& s) -> std::string {
        if (!cfg.pcl_enabled) return s;
        return scf::canonicalize(m, type, s).state;
    };
    auto pre_of = [](const scf::IntentNode& n,
                     const std::string& e) -> const scf::TargetRef* {
        for (const auto& t : n.targets)
            if (t.entity_id == e) return &t;
        return nullptr;
    };
    auto post_of = [](const scf::IntentNode& n,
                      const std::string& e) -> const scf::PostCondition* {
        for (const auto& p : n.postconditions)
            if (p.entity_id == e) return &p;
        return nullptr;
    };

    // (entity, type) -> node id set
    std::map<std::pair<std::string, int>, std::set<std::string>> found;
    const auto& nodes = g.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            const auto& a = nodes[i];
            const auto& b = nodes[j];
            if (!scf::is_live(a.status) || !scf::is_live(b.status)) continue;

            bool candidate = false;
            bool dep_edge = false;
            for (const auto& e : g.edges()) {
                const bool between = (e.from == a.id && e.to == b.id) ||
                                     (e.from == b.id && e.to == a.id);
                if (!between) continue;
                if (e.kind == scf::EdgeKind::PotentialConflict ||
                    e.kind == scf::EdgeKind::CausalChain)
                    candidate = true;
                if (e.kind == scf::EdgeKind::Dependency) dep_edge = true;
            }
            if (!candidate) continue;

            std::set<std::string> shared;
            for (const auto& t : a.targets)
                if (pre_of(b, t.entity_id)) shared.insert(t.entity_id);

            // Type 1: postconditions on a shared entity map to mutually
            // exclusive states (PCL) or differ as raw strings (no PCL).
            for (const auto& e : shared) {
                const auto* pa = post_of(a, e);
                const auto* pb = post_of(b, e);
                if (!pa || !pb) continue;
                const std::string ty = pre_of(a, e)->entity_type;
                if (cfg.pcl_enabled) {
                    if (scf::mutually_exclusive(m, ty, pa->post_state, pb->post_state))
                        found[{e, 1}].insert(a.id), found[{e, 1}].insert(b.id);
                } else if (pa->post_state != pb->post_state) {
                    found[{e, 1}].insert(a.id), found[{e, 1}].insert(b.id);
                }
            }

            // Type 2a: joint demand above capacity.
            for (const auto& da : a.demands) {
                for (const auto& db : b.demands) {
                    if (da.entity_id != db.entity_id) continue;
                    if (da.amount + db.amount > cfg.capacity_table.at(da.entity_id)) {
                        found[{da.entity_id, 2}].insert(a.id);
                        found[{da.entity_id, 2}].insert(b.id);
                    }
                }
            }
            // Type 2b: shared required pre-state invalidated by both posts.
            for (const auto& e : shared) {
                const auto* ta = pre_of(a, e);
                const auto* tb = pre_of(b, e);
                const auto* pa = post_of(a, e);
                const auto* pb = post_of(b, e);
                if (!pa || !pb) continue;
                const std::string pre_a = canon(ta->entity_type, ta->pre_state);
                const std::string pre_b = canon(tb->entity_type, tb->pre_state);
                if (pre_a != pre_b) continue;
                if (canon(ta->entity_type, pa->post_state) != pre_a &&
                    canon(tb->entity_type, pb->post_state) != pre_b) {
                    found[{e, 2}].insert(a.id);
                    found[{e, 2}].insert(b.id);
                }
            }

            // Type 3: a post invalidates the other's expected pre while the
            // pair is unordered.
            if (!dep_edge) {
                for (const auto* writer : {&a, &b}) {
                    const auto* reader = writer == &a ? &b : &a;
                    for (const auto& p : writer->postconditions) {
                        const auto* t = pre_of(*reader, p.entity_id);
                        if (!t) continue;
                        if (canon(t->entity_type, p.post_state) !=
                            canon(t->entity_type, t->pre_state)) {
                            found[{p.entity_id, 3}].insert(a.id);
                            found[{p.entity_id, 3}].insert(b.id);
                        }
                    }
                }
            }
            // Type 3 temporal clause: the "after" action carries the smaller
            // timestamp.
            for (const auto& rule : m.temporal) {
                const scf::IntentNode* nb = nullptr;
                const scf::IntentNode* na = nullptr;
                if (a.action == rule.before && b.action == rule.after) nb = &a, na = &b;
                if (b.action == rule.before && a.action == rule.after) nb = &b, na = &a;
                if (nb && na && na->timestamp < nb->timestamp) {
                    for (const auto& t : a.targets) found[{t.entity_id, 3}].insert(a.id);
                    for (const auto& t : b.targets) found[{t.entity_id, 3}].insert(b.id);
                    for (const auto& t : a.targets) found[{t.entity_id, 3}].insert(b.id);
                    for (const auto& t : b.targets) found[{t.entity_id, 3}].insert(a.id);
                }
            }
        }
    }

    // Entity-level grouping, then merge equal (type, node set) buckets.
    std::map<std::pair<int, std::vector<std::string>>, std::set<std::string>> merged;
    for (const auto& [key, ids] : found)
        merged[{key.second, {ids.begin(), ids.end()}}].insert(key.first);

    std::vector<OracleConflict> out;
    for (const auto& [key, entities] : merged)
        out.emplace_back(key.first, key.second,
                         std::vector<std::string>(entities.begin(), entities.end()));
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<OracleConflict> as_oracle_form(const std::vector<scf::Conflict>& cs) {
    std::vector<OracleConflict> out;
    for (const auto& c : cs) out.emplace_back(c.conflict_type, c.node_ids, c.entity_ids);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace scf_test
