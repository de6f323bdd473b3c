#pragma once

// Shared test fixtures: a compact inline process model plus loaders for the
// shipped scenario files.

#include <fstream>
#include <sstream>
#include <string>

#include "scf/intent_graph.hpp"
#include "scf/process_model.hpp"

namespace scf_test {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline const scf::ProcessModel& model_file(const std::string& name) {
    static std::map<std::string, scf::ProcessModel> cache;
    auto it = cache.find(name);
    if (it == cache.end())
        it = cache.emplace(name, scf::parse_model(read_file(std::string(SCF_MODELS_DIR) + "/" +
                                                            name)))
                 .first;
    return it->second;
}

// Two coupled entity types (shared action "ship"), a mutex pair, synonyms and
// one temporal rule. Small enough to reason about by hand.
inline const scf::ProcessModel& toy_model() {
    static const scf::ProcessModel m = scf::parse_model(R"(
name: toy
entity_types:
  - name: order
    states: [pending, confirmed, shipped, cancelled, delivered]
    synonyms: {ok: confirmed, sent: shipped, void: cancelled}
    terminal: [delivered, cancelled]
    mutex: [[shipped, cancelled]]
    transitions:
      - {from: pending, to: confirmed, action: confirm, roles: [clerk]}
      - {from: confirmed, to: shipped, action: ship, roles: [shipper]}
      - {from: confirmed, to: cancelled, action: cancel, roles: [manager]}
      - {from: shipped, to: delivered, action: deliver, roles: [shipper]}
  - name: stock
    states: [available, reserved, committed, depleted]
    synonyms: {in_stock: available}
    terminal: [depleted]
    mutex: []
    transitions:
      - {from: available, to: reserved, action: reserve, roles: [clerk]}
      - {from: reserved, to: committed, action: commit_stock, roles: [clerk]}
      - {from: committed, to: depleted, action: ship, roles: [shipper]}
roles:
  - {name: manager, rank: 1, skills: [order, management]}
  - {name: shipper, rank: 2, skills: [order, stock]}
  - {name: clerk, rank: 3, skills: [order]}
policies: []
temporal:
  - {before: confirm, after: ship}
)");
    return m;
}

struct NodeSpec {
    std::string id;
    std::uint64_t ts;
    std::string agent;
    std::string role;
    std::string action;
    std::vector<scf::TargetRef> targets;
    std::vector<scf::PostCondition> posts;
    std::vector<scf::Demand> demands = {};
    std::vector<std::string> deps = {};
};

inline scf::IntentNode make_node(const NodeSpec& s) {
    scf::IntentNode n;
    n.id = s.id;
    n.timestamp = s.ts;
    n.agent_id = s.agent;
    n.role = s.role;
    n.action = s.action;
    n.targets = s.targets;
    n.postconditions = s.posts;
    n.demands = s.demands;
    n.causal_deps = s.deps;
    n.confidence = 0.9;
    return n;
}

}  // namespace scf_test
