#pragma once

// Executes one generated workflow under one of the five approaches and
// scores it against the ground-truth labels at entity level.
//
// The governed (scf-*) path is the full middleware loop:
//   register -> build edges -> detect -> resolve -> apply -> commit gate
//   -> drift check, with queued losers requeued against entity ground truth.
// A conservative commit gate serializes any intent behind earlier live
// intents that share a target entity or are edge-connected to it, and a
// staleness check turns intents whose (declared or implicit) pre-states no
// longer hold into aborts. Together these make a committed ground-truth
// conflict pair impossible; InvariantBreach asserts exactly that.

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scf/audit.hpp"
#include "scf/conflict_detection.hpp"
#include "scf/drift.hpp"
#include "scf/errors.hpp"
#include "scf/intent_graph.hpp"
#include "scf/process_model.hpp"
#include "scf/resolution.hpp"
#include "scf/rng.hpp"
#include "scf/sim/config.hpp"
#include "scf/sim/generator.hpp"

namespace scf::sim {

struct RunResult {
    std::string approach;
    std::string framework;
    std::string scenario;
    int run_index = 0;
    bool completed = false;
    long tp = 0;
    long fp = 0;
    long fn = 0;
    int interactions = 0;
    int conflicts_true = 0;
    int drift_events = 0;
    int escalations = 0;
    // Not part of the results CSV; used by the acceptance suite.
    int trap_count = 0;
    int trap_fps = 0;
};

struct RunOutput {
    RunResult result;
    std::string audit_head;
    bool audit_ok = false;
    bool audit_complete = false;
};

namespace detail {

struct Scorer {
    std::set<std::string> flagged;
    std::set<std::string> gt_entities;
    std::set<std::string> trap_entities;

    explicit Scorer(const GeneratedWorkflow& wf) {
        for (const auto& l : wf.ground_truth_conflicts) gt_entities.insert(l.entity_id);
        for (const auto& t : wf.traps) trap_entities.insert(t.entity_id);
    }

    void finalize(RunResult& r) const {
        for (const auto& e : flagged) {
            if (gt_entities.count(e))
                ++r.tp;
            else
                ++r.fp;
        }
        r.fn = static_cast<long>(gt_entities.size()) -
               static_cast<long>(r.tp);
        for (const auto& e : trap_entities)
            if (flagged.count(e)) ++r.trap_fps;
    }
};

inline nlohmann::json intent_payload(const IntentNode& n) {
    nlohmann::json entities = nlohmann::json::array();
    for (const auto& t : n.targets) entities.push_back(t.entity_id);
    return {{"id", n.id},       {"agent", n.agent_id}, {"role", n.role},
            {"action", n.action}, {"entities", entities}, {"timestamp", n.timestamp}};
}

// Shared scaffolding for the baseline approaches that do not run the graph.
struct FlatState {
    std::map<std::string, std::string> gt;
    AuditLog* audit;

    void apply_commit(const PlannedIntent& pi, const std::string& id) {
        for (const auto& p : pi.posts) gt[p.entity_id] = p.post_state;
        nlohmann::json entities = nlohmann::json::array();
        for (const auto& p : pi.posts) entities.push_back(p.entity_id);
        audit->append(AuditKind::Commit, {{"intent_id", id}, {"entities", entities}});
    }

    void register_intent(const PlannedIntent& pi, const std::string& id) {
        nlohmann::json entities = nlohmann::json::array();
        for (const auto& t : pi.targets) entities.push_back(t.entity_id);
        audit->append(AuditKind::IntentRegistered,
                      {{"id", id}, {"agent", pi.agent_id}, {"role", pi.role},
                       {"action", pi.action}, {"entities", entities}});
    }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Baselines
// ---------------------------------------------------------------------------

inline RunResult run_ungoverned(const GeneratedWorkflow& wf, AuditLog& audit) {
    RunResult r;
    detail::FlatState st{wf.initial_states, &audit};
    for (std::size_t i = 0; i < wf.intents.size(); ++i) {
        const std::string id = "i" + std::to_string(i);
        st.register_intent(wf.intents[i], id);
        st.apply_commit(wf.intents[i], id);
    }
    r.completed = wf.ground_truth_conflicts.empty();
    return r;
}

inline RunResult run_schema_only(const GeneratedWorkflow& wf, AuditLog& audit) {
    RunResult r;
    detail::FlatState st{wf.initial_states, &audit};
    std::map<int, const GtLabel*> blocked_slot;  // intent slot -> schema-visible label
    int visible = 0;
    for (const auto& l : wf.ground_truth_conflicts) {
        if (!l.schema_visible) continue;
        ++visible;
        for (int s : l.intent_slots) blocked_slot[s] = &l;
    }
    std::set<const GtLabel*> reported;
    for (std::size_t i = 0; i < wf.intents.size(); ++i) {
        const std::string id = "i" + std::to_string(i);
        st.register_intent(wf.intents[i], id);
        auto it = blocked_slot.find(static_cast<int>(i));
        if (it == blocked_slot.end()) {
            st.apply_commit(wf.intents[i], id);
            continue;
        }
        const GtLabel* l = it->second;
        if (!reported.count(l)) {
            reported.insert(l);
            const std::string cid = "schema-" + l->entity_id;
            audit.append(AuditKind::ConflictDetected,
                         {{"id", cid}, {"type", l->type}, {"entity_ids", {l->entity_id}}});
            audit.append(AuditKind::Resolution,
                         {{"conflict_id", cid}, {"method", "schema-block"}});
        }
        audit.append(AuditKind::Abort, {{"intent_id", id}, {"reason", "schema-block"}});
    }
    r.tp = visible;
    r.fp = 0;
    r.fn = static_cast<long>(wf.ground_truth_conflicts.size()) - visible;
    r.completed = r.fn == 0;
    return r;
}

inline RunResult run_judge_agent(const GeneratedWorkflow& wf, const CalibrationConfig& calib,
                                 std::uint64_t cell_seed, AuditLog& audit) {
    RunResult r;
    detail::FlatState st{wf.initial_states, &audit};
    // Separate stream so the judge's rolls can never perturb generation.
    std::uint64_t sm = cell_seed ^ 0xC2B2AE3D27D4EB4FULL;
    Rng judge(splitmix64(sm));

    for (std::size_t i = 0; i < wf.intents.size(); ++i) {
        const std::string id = "i" + std::to_string(i);
        st.register_intent(wf.intents[i], id);
        st.apply_commit(wf.intents[i], id);
    }
    bool all_repaired = true;
    int detected = 0;
    for (const auto& l : wf.ground_truth_conflicts) {
        if (!judge.bernoulli(calib.judge_recall)) {
            all_repaired = false;
            ++r.fn;
            continue;
        }
        ++detected;
        ++r.tp;
        const std::string cid = "judge-" + l.entity_id;
        audit.append(AuditKind::ConflictDetected,
                     {{"id", cid}, {"type", l.type}, {"entity_ids", {l.entity_id}}});
        const bool repaired = judge.bernoulli(calib.judge_repair_prob);
        audit.append(AuditKind::Resolution, {{"conflict_id", cid},
                                             {"method", "post-hoc-repair"},
                                             {"repaired", repaired}});
        if (!repaired) all_repaired = false;
    }
    // False alarms keep the measured precision at the calibrated level.
    const double ratio = calib.judge_precision <= 0.0
                             ? 0.0
                             : (1.0 - calib.judge_precision) / calib.judge_precision;
    const int alarms = judge.dither(ratio * detected);
    for (int a = 0; a < alarms; ++a) {
        const std::string cid = wf.workflow_id + "-fa" + std::to_string(a);
        audit.append(AuditKind::ConflictDetected,
                     {{"id", cid}, {"type", 1}, {"entity_ids", {cid}}});
        audit.append(AuditKind::Resolution, {{"conflict_id", cid},
                                             {"method", "post-hoc-repair"},
                                             {"repaired", true}});
        ++r.fp;
    }
    r.completed = all_repaired;
    return r;
}

// ---------------------------------------------------------------------------
// Governed middleware path (scf-full / scf-nopcl)
// ---------------------------------------------------------------------------

namespace detail {

class GovernedRun {
public:
    GovernedRun(const GeneratedWorkflow& wf, const ProcessModel& model,
                const CalibrationConfig& calib, bool pcl, AuditLog& audit)
        : wf_(wf), model_(model), calib_(calib), audit_(audit),
          graph_(wf.workflow_id, &model), scorer_(wf) {
        cfg_.pcl_enabled = pcl;
        cfg_.capacity_table = wf.capacity_table;
        gt_ = wf.initial_states;
        base_rate_sum_ = wf.confidence_midpoint;
        base_rate_n_ = 1;
        for (const auto& [agent, role] : spec_agents()) {
            AgentAuthority a;
            a.agent_id = agent;
            a.role = role;
            const auto& rd = model.role(role);
            a.rank = rd.rank;
            a.skills = rd.skills;
            authorities_[agent] = a;
        }
        graph_.set_status_hook([this](const IntentNode& n, IntentStatus) {
            if (n.status == IntentStatus::Committed)
                audit_.append(AuditKind::Commit, {{"intent_id", n.id}});
            else if (n.status == IntentStatus::Aborted)
                audit_.append(AuditKind::Abort,
                              {{"intent_id", n.id},
                               {"reason", abort_reason_.empty() ? "disposed" : abort_reason_}});
        });
    }

    RunResult run() {
        RunResult r;
        std::size_t next_intent = 0;
        for (int step = 0; step < wf_.interactions; ++step) {
            while (next_intent < wf_.intents.size() &&
                   wf_.intents[next_intent].step == step) {
                register_planned(static_cast<int>(next_intent));
                ++next_intent;
            }
            detect_and_resolve(r);
            settle(r);
            apply_noise(step);
            if ((step + 1) % calib_.drift_interval == 0) drift_check(r);
        }
        // Drain stragglers (gated or queued nodes from the final steps).
        settle(r);
        drift_check(r);
        settle(r);

        scorer_.finalize(r);
        r.completed = true;  // a breach throws out of the run
        return r;
    }

private:
    std::vector<std::pair<std::string, std::string>> spec_agents() const {
        std::vector<std::pair<std::string, std::string>> out;
        std::set<std::string> seen;
        for (const auto& pi : wf_.intents)
            if (seen.insert(pi.agent_id).second) out.emplace_back(pi.agent_id, pi.role);
        return out;
    }

    std::string resolve_state(const std::string& entity, const std::string& state) const {
        if (!cfg_.pcl_enabled) return state;
        auto it = wf_.entity_types.find(entity);
        if (it == wf_.entity_types.end()) return state;
        return canonicalize(model_, it->second, state).state;
    }

    void register_planned(int slot) {
        const PlannedIntent& pi = wf_.intents[static_cast<std::size_t>(slot)];
        IntentNode n;
        n.id = "i" + std::to_string(slot);
        n.agent_id = pi.agent_id;
        n.role = pi.role;
        n.action = pi.action;
        n.targets = pi.targets;
        n.postconditions = pi.posts;
        n.demands = pi.demands;
        n.confidence = pi.confidence;
        n.timestamp = graph_.max_timestamp() + 1;
        graph_.register_intent(n);
        slot_of_[n.id] = slot;
        for (const auto& [e, s] : pi.implicit_pres) implicit_[n.id].emplace_back(e, s);
        for (const auto& l : wf_.ground_truth_conflicts)
            for (int s : l.intent_slots)
                if (s == slot) label_nodes_[&l].push_back(n.id);
        audit_.append(AuditKind::IntentRegistered, intent_payload(graph_.node(n.id)));

        AgentContextView& v = views_[pi.agent_id];
        v.agent_id = pi.agent_id;
        v.role = pi.role;
        for (const auto& t : pi.targets)
            v.entity_beliefs[t.entity_id] = resolve_state(t.entity_id, t.pre_state);
        v.confidence = pi.confidence;
        if (!pi.posts.empty()) {
            const auto& p = pi.posts.front();
            const auto* t = graph_.node(n.id).target_for(p.entity_id);
            v.planned_action = PlannedAction{pi.action, p.entity_id,
                                             wf_.entity_types.count(p.entity_id)
                                                 ? wf_.entity_types.at(p.entity_id)
                                                 : "",
                                             t ? t->pre_state : "", p.post_state};
        } else {
            v.planned_action.reset();
        }
        latest_intent_[pi.agent_id] = n.id;
        base_rate_sum_ += pi.confidence;
        ++base_rate_n_;
    }

    bool is_true_conflict(const Conflict& c) const {
        for (const auto& e : c.entity_ids)
            if (scorer_.gt_entities.count(e)) return true;
        return false;
    }

    void detect_and_resolve(RunResult& r) {
        const auto conflicts = detect_all(graph_, model_, cfg_);
        for (const auto& c : conflicts) {
            bool live = true;
            for (const auto& id : c.node_ids)
                if (!is_live(graph_.node(id).status)) live = false;
            if (!live) continue;  // already handled via an earlier finding

            audit_.append(AuditKind::ConflictDetected, conflict_to_json(c));
            for (const auto& e : c.entity_ids) scorer_.flagged.insert(e);

            auto outcome = resolve(c, graph_, model_, authorities_);
            if (auto* res = std::get_if<Resolution>(&outcome)) {
                audit_.append(AuditKind::Resolution, resolution_to_json(*res));
                abort_reason_ = "resolution";
                apply_resolution(*res, graph_);
                abort_reason_.clear();
                for (const auto& [loser, disposition] : res->losers)
                    if (disposition == Disposition::Queued)
                        pending_requeue_[loser] = *res->winner;
                update_accuracy(authorities_.at(graph_.node(*res->winner).agent_id),
                                is_true_conflict(c));
            } else {
                const auto& report = std::get<ConflictReport>(outcome);
                audit_.append(AuditKind::Escalation,
                              {{"conflict_id", c.id}, {"report", report_to_json(report)}});
                ++r.escalations;
                abort_reason_ = "escalated";
                for (const auto& id : c.node_ids) {
                    if (graph_.node(id).status == IntentStatus::Registered)
                        graph_.set_status(id, IntentStatus::Blocked);
                    graph_.set_status(id, IntentStatus::Aborted);
                }
                abort_reason_.clear();
            }
        }
    }

    bool gated(const IntentNode& n) const {
        for (const auto& u : graph_.nodes()) {
            if (u.id == n.id || is_terminal(u.status) || u.timestamp >= n.timestamp) continue;
            bool related = graph_.any_edge_between(u.id, n.id);
            if (!related) {
                for (const auto& t : n.targets)
                    if (u.target_for(t.entity_id)) {
                        related = true;
                        break;
                    }
            }
            if (related) return true;
        }
        return false;
    }

    bool stale(const IntentNode& n) const {
        for (const auto& t : n.targets) {
            auto it = gt_.find(t.entity_id);
            if (it != gt_.end() && it->second != resolve_state(t.entity_id, t.pre_state))
                return true;
        }
        auto imp = implicit_.find(n.id);
        if (imp != implicit_.end()) {
            for (const auto& [e, s] : imp->second) {
                auto it = gt_.find(e);
                if (it != gt_.end() && it->second != resolve_state(e, s)) return true;
            }
        }
        for (const auto& d : n.demands) {
            auto cap = cfg_.capacity_table.find(d.entity_id);
            if (cap != cfg_.capacity_table.end() &&
                d.amount > cap->second - committed_amount_[d.entity_id])
                return true;
        }
        return false;
    }

    void commit(const IntentNode& n) {
        // Breach assertion: committing must never complete a ground-truth
        // conflicting set.
        for (const auto& l : wf_.ground_truth_conflicts) {
            const auto it = label_nodes_.find(&l);
            if (it == label_nodes_.end()) continue;
            bool mine = false;
            int committed = 0;
            for (const auto& id : it->second) {
                if (id == n.id) mine = true;
                else if (graph_.node(id).status == IntentStatus::Committed) ++committed;
            }
            if (mine && committed >= 1)
                throw InvariantBreach("ground-truth conflict pair committed on entity " +
                                      l.entity_id + " in " + wf_.workflow_id);
        }
        graph_.set_status(n.id, IntentStatus::Committed);
        AgentContextView& v = views_[n.agent_id];
        for (const auto& p : n.postconditions) {
            const std::string s = resolve_state(p.entity_id, p.post_state);
            gt_[p.entity_id] = s;
            v.entity_beliefs[p.entity_id] = s;
        }
        for (const auto& d : n.demands) committed_amount_[d.entity_id] += d.amount;
        if (latest_intent_[n.agent_id] == n.id) v.planned_action.reset();
    }

    void settle(RunResult&) {
        bool progress = true;
        while (progress) {
            progress = false;
            for (std::size_t i = 0; i < graph_.nodes().size(); ++i) {
                const IntentNode& n = graph_.nodes()[i];
                if (n.status == IntentStatus::Queued) {
                    auto w = pending_requeue_.find(n.id);
                    if (w == pending_requeue_.end()) continue;
                    const IntentStatus ws = graph_.node(w->second).status;
                    if (ws == IntentStatus::Aborted) {
                        // The winner itself was disposed elsewhere; release the
                        // loser instead of waiting forever.
                        abort_reason_ = "winner-aborted";
                        graph_.set_status(n.id, IntentStatus::Aborted);
                        abort_reason_.clear();
                        pending_requeue_.erase(w);
                        progress = true;
                        continue;
                    }
                    if (ws != IntentStatus::Committed) continue;
                    const std::string node_id = n.id;  // requeue reallocates nodes
                    const std::string winner_id = w->second;
                    std::map<std::string, std::string> updated;
                    for (const auto& t : n.targets) {
                        auto it = gt_.find(t.entity_id);
                        if (it != gt_.end()) updated[t.entity_id] = it->second;
                    }
                    std::map<std::string, double> remaining;
                    for (const auto& d : n.demands) {
                        auto cap = cfg_.capacity_table.find(d.entity_id);
                        if (cap != cfg_.capacity_table.end())
                            remaining[d.entity_id] =
                                cap->second - committed_amount_[d.entity_id];
                    }
                    const int slot = slot_of_.at(node_id);
                    abort_reason_ = "requeued";
                    const IntentNode repl =
                        requeue(graph_, node_id, winner_id, updated, remaining);
                    abort_reason_.clear();
                    pending_requeue_.erase(node_id);
                    slot_of_[repl.id] = slot;
                    audit_.append(AuditKind::IntentRegistered, intent_payload(repl));
                    progress = true;
                    continue;
                }
                if (n.status != IntentStatus::Registered && n.status != IntentStatus::Blocked)
                    continue;
                if (gated(n)) {
                    if (n.status == IntentStatus::Registered)
                        graph_.set_status(n.id, IntentStatus::Blocked);
                    continue;
                }
                if (stale(n)) {
                    abort_reason_ = "stale-preconditions";
                    if (n.status == IntentStatus::Registered)
                        graph_.set_status(n.id, IntentStatus::Blocked);
                    graph_.set_status(n.id, IntentStatus::Aborted);
                    abort_reason_.clear();
                } else {
                    commit(n);
                }
                progress = true;
            }
        }
    }

    void apply_noise(int step) {
        std::vector<std::string> active;
        for (const auto& [id, v] : views_) active.push_back(id);
        if (active.empty()) return;
        for (const auto& ev : wf_.noise) {
            if (ev.step != step) continue;
            AgentContextView& v =
                views_.at(active[static_cast<std::size_t>(ev.u_agent * active.size()) %
                                 active.size()]);
            if (!v.entity_beliefs.empty()) {
                auto it = v.entity_beliefs.begin();
                std::advance(it, static_cast<std::size_t>(ev.u_belief *
                                                          v.entity_beliefs.size()) %
                                     v.entity_beliefs.size());
                auto ty = wf_.entity_types.find(it->first);
                if (ty != wf_.entity_types.end()) {
                    const auto& states = model_.entity_type(ty->second).states;
                    std::size_t k =
                        static_cast<std::size_t>(ev.u_state * states.size()) % states.size();
                    if (states[k] == it->second) k = (k + 1) % states.size();
                    it->second = states[k];
                }
            }
            if (ev.corrupt_plan && v.planned_action) {
                // The agent's cached plan no longer matches any valid row.
                v.planned_action->from_state = v.planned_action->to_state;
            }
        }
    }

    void drift_check(RunResult& r) {
        if (views_.size() < 2) return;
        const double base_rate = base_rate_sum_ / base_rate_n_;
        auto events = check_and_resync(wf_.workflow_id, views_, gt_, model_, base_rate,
                                       calib_.theta, graph_.max_timestamp());
        for (const auto& ev : events) {
            audit_.append(AuditKind::DriftEvent,
                          {{"agent_a", ev.agent_a},
                           {"agent_b", ev.agent_b},
                           {"sas", ev.sas},
                           {"components",
                            {{"overlap", ev.components.overlap},
                             {"plan_validity", ev.components.plan_validity},
                             {"confidence_alignment", ev.components.confidence_alignment}}},
                           {"threshold", ev.threshold},
                           {"triggered_resync", ev.triggered_resync},
                           {"at", ev.at}});
            if (ev.triggered_resync) {
                audit_.append(AuditKind::Resync,
                              {{"agent_a", ev.agent_a}, {"agent_b", ev.agent_b}, {"at", ev.at}});
                ++r.drift_events;
                views_.at(ev.agent_a).planned_action.reset();
                views_.at(ev.agent_b).planned_action.reset();
            }
        }
    }

    const GeneratedWorkflow& wf_;
    const ProcessModel& model_;
    const CalibrationConfig& calib_;
    AuditLog& audit_;
    IntentGraph graph_;
    Scorer scorer_;
    DetectorConfig cfg_;
    std::map<std::string, std::string> gt_;
    std::map<std::string, double> committed_amount_;
    std::map<std::string, AgentContextView> views_;
    std::map<std::string, AgentAuthority> authorities_;
    std::map<std::string, std::string> latest_intent_;
    std::map<std::string, int> slot_of_;
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> implicit_;
    std::map<const GtLabel*, std::vector<std::string>> label_nodes_;
    std::map<std::string, std::string> pending_requeue_;  // loser -> winner
    std::string abort_reason_;
    double base_rate_sum_ = 0.5;
    int base_rate_n_ = 1;
};

}  // namespace detail

inline RunOutput run_pipeline(const GeneratedWorkflow& wf, Approach approach,
                              const ProcessModel& model, const CalibrationConfig& calib,
                              std::uint64_t cell_seed, const std::string& audit_path = "") {
    AuditLog audit(wf.workflow_id, audit_path);
    RunResult r;
    switch (approach) {
        case Approach::Ungoverned:
            r = run_ungoverned(wf, audit);
            break;
        case Approach::SchemaOnly:
            r = run_schema_only(wf, audit);
            break;
        case Approach::JudgeAgent:
            r = run_judge_agent(wf, calib, cell_seed, audit);
            break;
        case Approach::ScfNoPcl:
        case Approach::ScfFull: {
            detail::GovernedRun gov(wf, model, calib, approach == Approach::ScfFull, audit);
            r = gov.run();
            break;
        }
    }
    r.approach = to_string(approach);
    r.framework = wf.framework;
    r.scenario = wf.scenario;
    r.run_index = wf.run_index;
    r.interactions = wf.interactions;
    r.conflicts_true = static_cast<int>(wf.ground_truth_conflicts.size());
    r.trap_count = static_cast<int>(wf.traps.size());

    RunOutput out;
    out.result = r;
    out.audit_head = audit.head_hash();
    out.audit_ok = audit.verify().ok;
    out.audit_complete = audit_complete(audit.records());
    return out;
}

}  // namespace scf::sim
