#pragma once

// Framework interaction profiles, scenario rosters and calibration knobs for
// the simulation grid.

#include <string>
#include <vector>

namespace scf::sim {

struct FrameworkProfile {
    std::string name;
    int interactions_min = 1;
    int interactions_max = 1;
    double confidence_min = 0.5;
    double confidence_max = 1.0;
    int seed_offset = 0;

    double confidence_midpoint() const { return 0.5 * (confidence_min + confidence_max); }
};

inline std::vector<FrameworkProfile> default_profiles() {
    return {
        {"autogen", 10, 18, 0.65, 0.95, 1},
        {"crewai", 8, 14, 0.75, 1.00, 2},
        {"langgraph", 6, 12, 0.80, 1.00, 3},
    };
}

struct ScenarioSpec {
    std::string name;
    std::string model_file;
    std::vector<std::pair<std::string, std::string>> agents;  // (agent_id, role)
    std::vector<std::string> conflict_patterns;
    double adversarial_rate = 0.20;
    double interaction_scale = 1.0;  // aligns per-scenario mean interactions
};

inline std::vector<ScenarioSpec> default_scenarios() {
    std::vector<ScenarioSpec> out;
    {
        ScenarioSpec s;
        s.name = "financial";
        s.model_file = "financial.yaml";
        s.agents = {{"fin_compliance", "compliance_checker"},
                    {"fin_fraud", "fraud_detector"},
                    {"fin_approver", "transaction_approver"},
                    {"fin_updater", "account_updater"},
                    {"fin_notifier", "notification_dispatcher"}};
        s.conflict_patterns = {"approve-vs-hold", "balance-contention", "notify-vs-settle"};
        s.interaction_scale = 0.812;
        out.push_back(std::move(s));
    }
    {
        ScenarioSpec s;
        s.name = "support";
        s.model_file = "support.yaml";
        s.agents = {{"sup_classifier", "ticket_classifier"},
                    {"sup_resolver", "resolution_agent"},
                    {"sup_escalator", "escalation_agent"},
                    {"sup_qa", "qa_agent"}};
        s.conflict_patterns = {"resolve-vs-escalate", "category-contention", "reopen-vs-close",
                               "forbidden-pair"};
        s.interaction_scale = 0.741;
        out.push_back(std::move(s));
    }
    {
        ScenarioSpec s;
        s.name = "supply_chain";
        s.model_file = "supply_chain.yaml";
        s.agents = {{"sc_validator", "order_validator"},
                    {"sc_allocator", "inventory_allocator"},
                    {"sc_shipper", "shipping_coordinator"},
                    {"sc_payments", "payment_processor"},
                    {"sc_comms", "customer_communicator"},
                    {"sc_exceptions", "exception_handler"}};
        s.conflict_patterns = {"over-allocation", "schedule-vs-cancel", "duplicate-fulfill"};
        s.interaction_scale = 0.891;
        out.push_back(std::move(s));
    }
    {
        ScenarioSpec s;
        s.name = "swdev";
        s.model_file = "swdev.yaml";
        s.agents = {{"dev_generator", "code_generator"},
                    {"dev_reviewer", "code_reviewer"},
                    {"dev_tester", "test_runner"},
                    {"dev_deployer", "deployment_agent"}};
        s.conflict_patterns = {"merge-conflict", "review-contention", "deploy-failing"};
        s.interaction_scale = 0.777;
        out.push_back(std::move(s));
    }
    return out;
}

// Generator / baseline calibration. Defaults were tuned against Monte-Carlo
// runs of the default grid; every probability lives in [0,1].
struct CalibrationConfig {
    double p_zero_conflict_workflow = 0.005;
    double conflict_intensity = 0.20;      // target conflict episodes per interaction
    double latent_fraction = 0.35;         // share of true conflicts invisible to the rules
    double schema_visible_fraction = 0.214;  // share of true conflicts a schema check catches
    double benign_per_conflict = 1.5;      // benign contention pairs per conflict episode
    double judge_recall = 0.66;
    double judge_precision = 0.93;
    double judge_repair_prob = 0.83;
    double belief_noise_rate = 0.30;       // per-step chance an active agent's belief drifts
    double theta = 0.7;                    // drift resync threshold
    int drift_interval = 2;                // interaction steps between drift checks
};

enum class Approach { Ungoverned, SchemaOnly, JudgeAgent, ScfNoPcl, ScfFull };

inline const char* to_string(Approach a) {
    switch (a) {
        case Approach::Ungoverned: return "ungoverned";
        case Approach::SchemaOnly: return "schema-only";
        case Approach::JudgeAgent: return "judge-agent";
        case Approach::ScfNoPcl: return "scf-nopcl";
        case Approach::ScfFull: return "scf-full";
    }
    return "?";
}

inline std::vector<Approach> all_approaches() {
    return {Approach::Ungoverned, Approach::SchemaOnly, Approach::JudgeAgent, Approach::ScfNoPcl,
            Approach::ScfFull};
}

}  // namespace scf::sim
