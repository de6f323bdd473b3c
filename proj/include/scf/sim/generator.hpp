#pragma once

// Seeded workflow generator. Produces the full task stream for one run:
// interaction steps carrying 1-3 intents, injected conflict episodes with
// entity-level ground-truth labels, synonym traps and latent conflicts for
// adversarial streams, benign contention pairs, and a belief-noise schedule
// for the drift monitor. Everything is drawn from one Rng, so a workflow is
// a pure function of (profile, scenario, calibration, seed).

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "scf/intent_graph.hpp"
#include "scf/process_model.hpp"
#include "scf/rng.hpp"
#include "scf/sim/config.hpp"

namespace scf::sim {

inline std::uint64_t derive_cell_seed(std::uint64_t seed, const FrameworkProfile& profile,
                                      int scenario_index, int run_index) {
    return seed + static_cast<std::uint64_t>(profile.seed_offset) * 1000 +
           static_cast<std::uint64_t>(scenario_index) * 100 +
           static_cast<std::uint64_t>(run_index);
}

struct PlannedIntent {
    int step = 0;
    std::string agent_id;
    std::string role;
    std::string action;
    std::vector<TargetRef> targets;
    std::vector<PostCondition> posts;
    std::vector<Demand> demands;
    double confidence = 1.0;
    // Assumptions the intent holds but does not declare (latent coupling).
    std::vector<std::pair<std::string, std::string>> implicit_pres;
};

struct GtLabel {
    std::string entity_id;
    std::vector<int> intent_slots;  // indices into GeneratedWorkflow::intents
    int type = 0;
    bool schema_visible = false;
    bool latent = false;
};

struct TrapLabel {
    std::string entity_id;
    std::vector<int> intent_slots;
};

// Pre-drawn context-drift perturbation.
struct NoiseEvent {
    int step = 0;
    double u_agent = 0.0;
    double u_belief = 0.0;
    double u_state = 0.0;
    bool corrupt_plan = false;
};

struct GeneratedWorkflow {
    std::string workflow_id;
    std::string framework;
    std::string scenario;
    int run_index = 0;
    int interactions = 0;
    bool is_adversarial = false;
    double confidence_midpoint = 0.5;
    std::vector<PlannedIntent> intents;  // ordered by (step, registration order)
    std::vector<GtLabel> ground_truth_conflicts;
    std::vector<TrapLabel> traps;
    std::map<std::string, double> capacity_table;
    std::map<std::string, std::string> initial_states;  // entity -> canonical state
    std::map<std::string, std::string> entity_types;    // entity -> type name
    std::vector<NoiseEvent> noise;

    nlohmann::json to_json() const {
        nlohmann::json intents_j = nlohmann::json::array();
        for (const auto& it : intents) {
            nlohmann::json targets = nlohmann::json::array();
            for (const auto& t : it.targets)
                targets.push_back({t.entity_id, t.entity_type, t.pre_state});
            nlohmann::json posts = nlohmann::json::array();
            for (const auto& p : it.posts) posts.push_back({p.entity_id, p.post_state});
            nlohmann::json demands = nlohmann::json::array();
            for (const auto& d : it.demands) demands.push_back({d.entity_id, d.amount});
            intents_j.push_back({{"step", it.step},
                                 {"agent", it.agent_id},
                                 {"action", it.action},
                                 {"targets", targets},
                                 {"posts", posts},
                                 {"demands", demands},
                                 {"confidence", it.confidence},
                                 {"implicit", it.implicit_pres}});
        }
        nlohmann::json labels = nlohmann::json::array();
        for (const auto& l : ground_truth_conflicts)
            labels.push_back({{"entity", l.entity_id},
                              {"slots", l.intent_slots},
                              {"type", l.type},
                              {"schema_visible", l.schema_visible},
                              {"latent", l.latent}});
        return {{"workflow_id", workflow_id}, {"interactions", interactions},
                {"adversarial", is_adversarial}, {"intents", intents_j},
                {"labels", labels},             {"capacities", capacity_table},
                {"initial_states", initial_states}};
    }
    std::string digest() const { return to_json().dump(); }
};

namespace detail {

struct EpisodeIntent {
    std::string role;
    std::string action;
    std::vector<TargetRef> targets;
    std::vector<PostCondition> posts;
    std::vector<Demand> demands;
    std::vector<std::pair<std::string, std::string>> implicit_pres;
};

struct Episode {
    std::vector<EpisodeIntent> intents;
    int label_type = 0;  // 0 = no ground-truth conflict label
    std::string label_entity;
    std::map<std::string, std::string> initial_states;
    std::map<std::string, std::string> types;
    std::map<std::string, double> capacities;
    bool is_trap = false;
};

struct CaseStep {
    std::string role;
    std::string action;
    std::string from;
    std::string to;
};

// Scenario-specific realizations. Entity ids are fresh per episode so every
// label is unambiguous at entity level.
class ScenarioKit {
public:
    ScenarioKit(const ScenarioSpec& spec, Rng& rng) : spec_(spec), rng_(rng) {}

    std::string fresh(const std::string& prefix) {
        return prefix + std::to_string(counter_++);
    }

    std::string entity_type_of_case() const {
        if (spec_.name == "financial") return "transaction";
        if (spec_.name == "support") return "ticket";
        if (spec_.name == "supply_chain") return "order";
        return "change";
    }

    std::vector<CaseStep> case_path() const {
        if (spec_.name == "financial")
            return {{"fraud_detector", "begin_screening", "received", "screening"},
                    {"compliance_checker", "screen_pass", "screening", "cleared"},
                    {"transaction_approver", "approve_txn", "cleared", "approved"},
                    {"account_updater", "settle_txn", "approved", "settled"}};
        if (spec_.name == "support")
            return {{"ticket_classifier", "triage_ticket", "new", "triaged"},
                    {"resolution_agent", "start_work", "triaged", "in_progress"},
                    {"resolution_agent", "resolve_ticket", "in_progress", "resolved"},
                    {"qa_agent", "close_ticket", "resolved", "closed"}};
        if (spec_.name == "supply_chain")
            return {{"order_validator", "validate_order", "placed", "validated"},
                    {"payment_processor", "collect_payment", "validated", "payment_cleared"},
                    {"inventory_allocator", "assign_stock", "payment_cleared", "allocated"},
                    {"shipping_coordinator", "ship_order", "allocated", "shipped"},
                    {"customer_communicator", "confirm_delivery", "shipped", "delivered"}};
        return {{"code_generator", "submit_review", "draft", "in_review"},
                {"code_reviewer", "approve_change", "in_review", "approved"},
                {"code_generator", "merge_change", "approved", "merged"},
                {"test_runner", "start_tests", "merged", "tests_pending"},
                {"test_runner", "record_test_pass", "tests_pending", "tests_passed"},
                {"deployment_agent", "deploy_change", "tests_passed", "deployed"}};
    }

    Episode make_conflict(const std::string& pattern) {
        if (spec_.name == "financial") return financial(pattern);
        if (spec_.name == "support") return support(pattern);
        if (spec_.name == "supply_chain") return supply(pattern);
        return swdev(pattern);
    }

    // Two agents confirm the same canonical state using different aliases;
    // each intent's expected pre equals its post, so only raw-string
    // comparison (no PCL) sees a contradiction.
    Episode make_trap() {
        Episode ep;
        ep.is_trap = true;
        if (spec_.name == "financial") {
            const std::string e = fresh("trap_txn");
            seed(ep, e, "transaction", "approved");
            ep.intents.push_back(confirm("transaction_approver", e, "transaction", "approve"));
            ep.intents.push_back(confirm("notification_dispatcher", e, "transaction", "ok_to_pay"));
            ep.label_entity = e;
        } else if (spec_.name == "support") {
            const std::string e = fresh("trap_tkt");
            seed(ep, e, "ticket", "resolved");
            ep.intents.push_back(confirm("qa_agent", e, "ticket", "fixed"));
            ep.intents.push_back(confirm("resolution_agent", e, "ticket", "done"));
            ep.label_entity = e;
        } else if (spec_.name == "supply_chain") {
            const std::string e = fresh("trap_stock");
            seed(ep, e, "inventory", "available");
            ep.intents.push_back(confirm("inventory_allocator", e, "inventory", "in_stock"));
            ep.intents.push_back(confirm("order_validator", e, "inventory", "stocked"));
            ep.label_entity = e;
        } else {
            const std::string e = fresh("trap_chg");
            seed(ep, e, "change", "approved");
            ep.intents.push_back(confirm("code_reviewer", e, "change", "lgtm"));
            ep.intents.push_back(confirm("code_generator", e, "change", "ok"));
            ep.label_entity = e;
        }
        return ep;
    }

    // Healthy concurrency on one entity: shared pre-state, divergent but
    // non-exclusive next states. Ground truth: not a conflict. The
    // conservative detector flags it anyway (the engineered precision cost).
    Episode make_benign_pair() {
        Episode ep;
        if (spec_.name == "financial") {
            const std::string e = fresh("chk_txn");
            seed(ep, e, "transaction", "received");
            ep.intents.push_back(basic("fraud_detector", "begin_screening", e, "transaction",
                                       "received", "screening"));
            ep.intents.push_back(basic("transaction_approver", "expedite_review", e,
                                       "transaction", "received", "cleared"));
        } else if (spec_.name == "support") {
            const std::string e = fresh("chk_tkt");
            seed(ep, e, "ticket", "new");
            ep.intents.push_back(
                basic("ticket_classifier", "triage_ticket", e, "ticket", "new", "triaged"));
            ep.intents.push_back(basic("qa_agent", "fast_track", e, "ticket", "new", "in_progress"));
        } else if (spec_.name == "supply_chain") {
            const std::string e = fresh("chk_ord");
            seed(ep, e, "order", "placed");
            ep.intents.push_back(
                basic("order_validator", "validate_order", e, "order", "placed", "validated"));
            ep.intents.push_back(
                basic("exception_handler", "flag_exception", e, "order", "placed", "on_hold"));
        } else {
            const std::string e = fresh("chk_chg");
            seed(ep, e, "change", "in_review");
            ep.intents.push_back(
                basic("code_reviewer", "approve_change", e, "change", "in_review", "approved"));
            ep.intents.push_back(
                basic("test_runner", "queue_ci", e, "change", "in_review", "queued_ci"));
        }
        return ep;
    }

    // Cross-entity conflict invisible to the rule detectors: the reader's
    // undeclared assumption about the writer's entity breaks when the writer
    // commits. Label entity is the writer's.
    Episode make_latent() {
        Episode ep;
        ep.label_type = 3;
        if (spec_.name == "financial") {
            const std::string e1 = fresh("lat_txn");
            const std::string e2 = fresh("lat_txn");
            seed(ep, e1, "transaction", "cleared");
            seed(ep, e2, "transaction", "approved");
            ep.intents.push_back(
                basic("compliance_checker", "hold_txn", e1, "transaction", "cleared", "held"));
            auto reader =
                basic("account_updater", "settle_txn", e2, "transaction", "approved", "settled");
            reader.implicit_pres = {{e1, "cleared"}};
            ep.intents.push_back(std::move(reader));
            ep.label_entity = e1;
        } else if (spec_.name == "support") {
            const std::string e1 = fresh("lat_tkt");
            const std::string e2 = fresh("lat_tkt");
            seed(ep, e1, "ticket", "in_progress");
            seed(ep, e2, "ticket", "resolved");
            ep.intents.push_back(basic("escalation_agent", "escalate_ticket", e1, "ticket",
                                       "in_progress", "escalated"));
            auto reader = basic("resolution_agent", "close_ticket", e2, "ticket", "resolved",
                                "closed");
            reader.implicit_pres = {{e1, "in_progress"}};
            ep.intents.push_back(std::move(reader));
            ep.label_entity = e1;
        } else if (spec_.name == "supply_chain") {
            const std::string e1 = fresh("lat_stock");
            const std::string e2 = fresh("lat_shp");
            seed(ep, e1, "inventory", "reserved");
            seed(ep, e2, "shipment", "pending");
            ep.intents.push_back(basic("inventory_allocator", "commit_stock", e1, "inventory",
                                       "reserved", "committed"));
            auto reader = basic("shipping_coordinator", "schedule_shipment", e2, "shipment",
                                "pending", "scheduled");
            reader.implicit_pres = {{e1, "reserved"}};
            ep.intents.push_back(std::move(reader));
            ep.label_entity = e1;
        } else {
            const std::string e1 = fresh("lat_chg");
            const std::string e2 = fresh("lat_chg");
            seed(ep, e1, "change", "tests_pending");
            seed(ep, e2, "change", "tests_passed");
            ep.intents.push_back(basic("test_runner", "record_test_failure", e1, "change",
                                       "tests_pending", "tests_failed"));
            auto reader =
                basic("deployment_agent", "deploy_change", e2, "change", "tests_passed", "deployed");
            reader.implicit_pres = {{e1, "tests_pending"}};
            ep.intents.push_back(std::move(reader));
            ep.label_entity = e1;
        }
        return ep;
    }

private:
    static void seed(Episode& ep, const std::string& entity, const std::string& type,
                     const std::string& state) {
        ep.initial_states[entity] = state;
        ep.types[entity] = type;
    }

    static EpisodeIntent basic(const std::string& role, const std::string& action,
                               const std::string& entity, const std::string& type,
                               const std::string& pre, const std::string& post) {
        EpisodeIntent i;
        i.role = role;
        i.action = action;
        i.targets = {{entity, type, pre}};
        i.posts = {{entity, post}};
        return i;
    }

    static EpisodeIntent confirm(const std::string& role, const std::string& entity,
                                 const std::string& type, const std::string& alias) {
        EpisodeIntent i;
        i.role = role;
        i.action = "confirm_status";
        i.targets = {{entity, type, alias}};
        i.posts = {{entity, alias}};
        return i;
    }

    // Pure precondition check, no postcondition: the classic causal-violation
    // reader.
    static EpisodeIntent reader(const std::string& role, const std::string& action,
                                const std::string& entity, const std::string& type,
                                const std::string& pre) {
        EpisodeIntent i;
        i.role = role;
        i.action = action;
        i.targets = {{entity, type, pre}};
        return i;
    }

    Episode financial(const std::string& pattern) {
        Episode ep;
        if (pattern == "approve-vs-hold") {
            ep.label_type = 1;
            const std::string e = fresh("txn");
            seed(ep, e, "transaction", "cleared");
            ep.intents.push_back(
                basic("transaction_approver", "approve_txn", e, "transaction", "cleared", "approved"));
            ep.intents.push_back(
                basic("compliance_checker", "hold_txn", e, "transaction", "cleared", "held"));
            // Occasionally a third contradictory voice; exercises entity-level
            // grouping of a multi-node conflict.
            if (rng_.bernoulli(0.15))
                ep.intents.push_back(
                    basic("fraud_detector", "reject_txn", e, "transaction", "cleared", "rejected"));
            ep.label_entity = e;
        } else if (pattern == "balance-contention") {
            ep.label_type = 2;
            const std::string e = fresh("txn");
            seed(ep, e, "transaction", "approved");
            ep.intents.push_back(
                basic("account_updater", "settle_txn", e, "transaction", "approved", "settled"));
            ep.intents.push_back(
                basic("compliance_checker", "hold_funds", e, "transaction", "approved", "held"));
            ep.label_entity = e;
        } else {  // notify-vs-settle
            ep.label_type = 3;
            const std::string e = fresh("txn");
            seed(ep, e, "transaction", "approved");
            ep.intents.push_back(
                basic("account_updater", "settle_txn", e, "transaction", "approved", "settled"));
            ep.intents.push_back(
                reader("notification_dispatcher", "notify_approval", e, "transaction", "approved"));
            ep.label_entity = e;
        }
        return ep;
    }

    Episode support(const std::string& pattern) {
        Episode ep;
        if (pattern == "resolve-vs-escalate") {
            ep.label_type = 1;
            const std::string e = fresh("tkt");
            seed(ep, e, "ticket", "in_progress");
            ep.intents.push_back(
                basic("resolution_agent", "resolve_ticket", e, "ticket", "in_progress", "resolved"));
            ep.intents.push_back(
                basic("escalation_agent", "escalate_ticket", e, "ticket", "in_progress", "escalated"));
            ep.label_entity = e;
        } else if (pattern == "category-contention") {
            ep.label_type = 2;
            const std::string e = fresh("tkt");
            seed(ep, e, "ticket", "triaged");
            ep.intents.push_back(
                basic("resolution_agent", "start_work", e, "ticket", "triaged", "in_progress"));
            ep.intents.push_back(
                basic("ticket_classifier", "reclassify", e, "ticket", "triaged", "new"));
            ep.label_entity = e;
        } else if (pattern == "forbidden-pair") {
            ep.label_type = 1;
            const std::string e = fresh("tkt");
            seed(ep, e, "ticket", "in_progress");
            ep.intents.push_back(
                basic("resolution_agent", "force_close", e, "ticket", "in_progress", "closed"));
            ep.intents.push_back(
                basic("escalation_agent", "force_escalate", e, "ticket", "in_progress", "escalated"));
            ep.label_entity = e;
        } else {  // reopen-vs-close
            ep.label_type = 3;
            const std::string e = fresh("tkt");
            seed(ep, e, "ticket", "resolved");
            ep.intents.push_back(
                basic("resolution_agent", "close_ticket", e, "ticket", "resolved", "closed"));
            ep.intents.push_back(reader("qa_agent", "verify_resolution", e, "ticket", "resolved"));
            ep.label_entity = e;
        }
        return ep;
    }

    Episode supply(const std::string& pattern) {
        Episode ep;
        if (pattern == "over-allocation") {
            ep.label_type = 2;
            const std::string e = fresh("stock");
            seed(ep, e, "inventory", "available");
            ep.capacities[e] = 60.0;
            auto a = basic("inventory_allocator", "allocate_stock", e, "inventory", "available",
                           "allocated");
            a.demands = {{e, 50.0}};
            auto b = basic("inventory_allocator", "allocate_stock", e, "inventory", "available",
                           "allocated");
            b.demands = {{e, 40.0}};
            ep.intents.push_back(std::move(a));
            ep.intents.push_back(std::move(b));
            ep.label_entity = e;
        } else if (pattern == "duplicate-fulfill") {
            ep.label_type = 1;
            const std::string e = fresh("ord");
            seed(ep, e, "order", "allocated");
            ep.intents.push_back(
                basic("shipping_coordinator", "ship_order", e, "order", "allocated", "shipped"));
            ep.intents.push_back(
                basic("exception_handler", "cancel_order", e, "order", "allocated", "cancelled"));
            ep.label_entity = e;
        } else {  // schedule-vs-cancel
            ep.label_type = 3;
            const std::string e = fresh("ord");
            const std::string es = fresh("shp");
            seed(ep, e, "order", "validated");
            seed(ep, es, "shipment", "pending");
            ep.intents.push_back(
                basic("exception_handler", "cancel_order", e, "order", "validated", "cancelled"));
            EpisodeIntent sched;
            sched.role = "shipping_coordinator";
            sched.action = "schedule_shipment";
            sched.targets = {{e, "order", "validated"}, {es, "shipment", "pending"}};
            sched.posts = {{es, "scheduled"}};
            ep.intents.push_back(std::move(sched));
            ep.label_entity = e;
        }
        return ep;
    }

    Episode swdev(const std::string& pattern) {
        Episode ep;
        if (pattern == "merge-conflict") {
            ep.label_type = 1;
            const std::string e = fresh("chg");
            seed(ep, e, "change", "approved");
            ep.intents.push_back(
                basic("code_generator", "merge_change", e, "change", "approved", "merged"));
            ep.intents.push_back(
                basic("code_reviewer", "revert_change", e, "change", "approved", "reverted"));
            ep.label_entity = e;
        } else if (pattern == "review-contention") {
            ep.label_type = 2;
            const std::string e = fresh("chg");
            seed(ep, e, "change", "in_review");
            ep.intents.push_back(
                basic("code_reviewer", "approve_change", e, "change", "in_review", "approved"));
            ep.intents.push_back(
                basic("code_generator", "rework_change", e, "change", "in_review", "draft"));
            ep.label_entity = e;
        } else {  // deploy-failing
            ep.label_type = 3;
            const std::string e = fresh("chg");
            seed(ep, e, "change", "tests_pending");
            ep.intents.push_back(basic("test_runner", "record_test_failure", e, "change",
                                       "tests_pending", "tests_failed"));
            ep.intents.push_back(
                basic("deployment_agent", "deploy_change", e, "change", "tests_passed", "deployed"));
            ep.label_entity = e;
        }
        return ep;
    }

    const ScenarioSpec& spec_;
    Rng& rng_;
    int counter_ = 0;
};

}  // namespace detail

inline GeneratedWorkflow generate_workflow(const FrameworkProfile& profile,
                                           const ScenarioSpec& scenario,
                                           const CalibrationConfig& calib, Rng& rng,
                                           int run_index) {
    GeneratedWorkflow wf;
    wf.framework = profile.name;
    wf.scenario = scenario.name;
    wf.run_index = run_index;
    wf.workflow_id =
        profile.name + "_" + scenario.name + "_" + std::to_string(run_index);
    wf.confidence_midpoint = profile.confidence_midpoint();

    const int raw = rng.uniform_int(profile.interactions_min, profile.interactions_max);
    const int n = std::max(
        1, static_cast<int>(std::lround(raw * scenario.interaction_scale)));
    wf.interactions = n;
    wf.is_adversarial = rng.bernoulli(scenario.adversarial_rate);

    detail::ScenarioKit kit(scenario, rng);
    std::map<std::string, std::string> role_to_agent;
    for (const auto& [agent, role] : scenario.agents) role_to_agent[role] = agent;

    // Episode plan ------------------------------------------------------
    int k_base = 0;
    if (!rng.bernoulli(calib.p_zero_conflict_workflow)) {
        k_base = std::max(2, rng.dither(calib.conflict_intensity * n));
        const int reserve = wf.is_adversarial ? 2 : 0;  // latent + trap steps
        k_base = std::min(k_base, std::max(2, n - reserve));
    }
    const bool extra_latent = wf.is_adversarial && k_base > 0;
    const int k_total = k_base + (extra_latent ? 1 : 0);

    int latent_base = 0;
    if (k_base > 0) {
        const double want = extra_latent ? calib.latent_fraction * k_total - 1.0
                                         : calib.latent_fraction * k_total;
        latent_base = std::min(k_base, rng.dither(std::max(0.0, want)));
    }

    std::vector<detail::Episode> episodes;
    std::vector<bool> is_latent;
    for (int i = 0; i < k_base; ++i) {
        is_latent.push_back(i < latent_base);
    }
    // Shuffle latent flags over base episodes.
    for (std::size_t i = is_latent.size(); i > 1; --i)
        std::swap(is_latent[i - 1], is_latent[rng.next_u64() % i]);
    for (int i = 0; i < k_base; ++i) {
        episodes.push_back(is_latent[static_cast<std::size_t>(i)]
                               ? kit.make_latent()
                               : kit.make_conflict(rng.pick(scenario.conflict_patterns)));
    }
    if (extra_latent) {
        episodes.push_back(kit.make_latent());
        is_latent.push_back(true);
    }

    // Schema visibility over the non-latent episodes.
    std::vector<int> visible_idx;
    for (std::size_t i = 0; i < episodes.size(); ++i)
        if (!is_latent[i]) visible_idx.push_back(static_cast<int>(i));
    double p_sv = calib.schema_visible_fraction /
                  std::max(1e-9, 1.0 - calib.latent_fraction);
    p_sv = std::min(1.0, p_sv);
    int sv_count = std::min<int>(static_cast<int>(visible_idx.size()),
                                 rng.dither(p_sv * static_cast<double>(visible_idx.size())));
    for (std::size_t i = visible_idx.size(); i > 1; --i)
        std::swap(visible_idx[i - 1], visible_idx[rng.next_u64() % i]);
    std::set<int> sv_episodes(visible_idx.begin(),
                              visible_idx.begin() + sv_count);

    // Benign contention pairs scale with the conflict load so measured
    // precision is framework-independent.
    int benign = rng.dither(calib.benign_per_conflict * k_total);
    const int trap_count = wf.is_adversarial ? 1 : 0;
    benign = std::max(0, std::min(benign, n - k_total - trap_count));
    for (int i = 0; i < trap_count; ++i) episodes.push_back(kit.make_trap());
    for (int i = 0; i < benign; ++i) episodes.push_back(kit.make_benign_pair());
    // One episode per interaction step; degenerate tiny workflows shed the
    // optional load (benign first, then the trap) from the back.
    while (episodes.size() > static_cast<std::size_t>(n)) episodes.pop_back();

    // Step allocation ----------------------------------------------------
    std::vector<int> steps(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) steps[static_cast<std::size_t>(i)] = i;
    for (std::size_t i = steps.size(); i > 1; --i)
        std::swap(steps[i - 1], steps[rng.next_u64() % i]);
    // episode e occupies steps[e]; the rest carry the case flow
    std::map<int, int> step_to_episode;
    for (std::size_t e = 0; e < episodes.size(); ++e)
        step_to_episode[steps[e]] = static_cast<int>(e);

    // Materialize intents in step order ----------------------------------
    const auto path = kit.case_path();
    const std::string case_type = kit.entity_type_of_case();
    std::size_t case_pos = 0;
    std::string case_entity;
    std::map<int, std::vector<int>> episode_slots;

    for (int step = 0; step < n; ++step) {
        auto ep_it = step_to_episode.find(step);
        if (ep_it != step_to_episode.end()) {
            const auto& ep = episodes[static_cast<std::size_t>(ep_it->second)];
            for (const auto& src : ep.intents) {
                PlannedIntent pi;
                pi.step = step;
                pi.role = src.role;
                pi.agent_id = role_to_agent.at(src.role);
                pi.action = src.action;
                pi.targets = src.targets;
                pi.posts = src.posts;
                pi.demands = src.demands;
                pi.implicit_pres = src.implicit_pres;
                pi.confidence =
                    rng.uniform(profile.confidence_min, profile.confidence_max);
                episode_slots[ep_it->second].push_back(static_cast<int>(wf.intents.size()));
                wf.intents.push_back(std::move(pi));
            }
            for (const auto& [ent, st] : ep.initial_states) wf.initial_states[ent] = st;
            for (const auto& [ent, ty] : ep.types) wf.entity_types[ent] = ty;
            for (const auto& [ent, cap] : ep.capacities) wf.capacity_table[ent] = cap;
        } else {
            // Case flow single; start a fresh case entity when the previous
            // one reached its terminal state.
            if (case_pos == 0 || case_pos >= path.size()) {
                case_entity = kit.fresh("case");
                case_pos = 0;
                wf.initial_states[case_entity] = path.front().from;
                wf.entity_types[case_entity] = case_type;
            }
            const auto& cs = path[case_pos++];
            PlannedIntent pi;
            pi.step = step;
            pi.role = cs.role;
            pi.agent_id = role_to_agent.at(cs.role);
            pi.action = cs.action;
            pi.targets = {{case_entity, case_type, cs.from}};
            pi.posts = {{case_entity, cs.to}};
            pi.confidence = rng.uniform(profile.confidence_min, profile.confidence_max);
            wf.intents.push_back(std::move(pi));
        }
        // Belief-noise schedule: up to two perturbations per step.
        for (int d = 0; d < 2; ++d) {
            const bool hit = rng.bernoulli(calib.belief_noise_rate);
            const double ua = rng.u01();
            const double ub = rng.u01();
            const double us = rng.u01();
            const bool plan = rng.bernoulli(0.5);
            if (hit) wf.noise.push_back({step, ua, ub, us, plan});
        }
    }

    // Ground-truth labels -------------------------------------------------
    for (std::size_t e = 0; e < episodes.size(); ++e) {
        const auto& ep = episodes[e];
        if (ep.is_trap) {
            wf.traps.push_back({ep.label_entity, episode_slots[static_cast<int>(e)]});
        } else if (ep.label_type != 0) {
            GtLabel l;
            l.entity_id = ep.label_entity;
            l.intent_slots = episode_slots[static_cast<int>(e)];
            l.type = ep.label_type;
            l.latent = e < is_latent.size() && is_latent[e];
            l.schema_visible = sv_episodes.count(static_cast<int>(e)) > 0;
            wf.ground_truth_conflicts.push_back(std::move(l));
        }
    }
    return wf;
}

}  // namespace scf::sim
