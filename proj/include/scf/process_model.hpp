#pragma once

// Process semantic model: the machine-readable union of entity states,
// transitions, mutual-exclusion sets, synonym vocabulary, role authority
// and temporal ordering that grounds every other component.
//
// A parsed ProcessModel is immutable after construction and may be shared
// across threads without synchronization.

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "scf/errors.hpp"

namespace scf {

struct Transition {
    std::string from;
    std::string to;
    std::string action;
    std::vector<std::string> roles;

    bool operator==(const Transition&) const = default;
};

struct EntityTypeDef {
    std::string name;
    std::vector<std::string> states;
    std::map<std::string, std::string> synonyms;  // alias -> canonical
    std::vector<std::string> terminal;
    std::vector<std::vector<std::string>> mutex;
    std::vector<Transition> transitions;

    bool operator==(const EntityTypeDef&) const = default;

    bool has_state(const std::string& s) const {
        return std::find(states.begin(), states.end(), s) != states.end();
    }
    bool is_terminal(const std::string& s) const {
        return std::find(terminal.begin(), terminal.end(), s) != terminal.end();
    }
};

struct RoleDef {
    std::string name;
    int rank = 0;  // 1 = highest authority
    std::vector<std::string> skills;

    bool operator==(const RoleDef&) const = default;
};

// Tier-1 resolution rule. Lives in the model file; consumed by resolve().
struct PolicyWhen {
    std::optional<int> conflict_type;
    std::optional<std::string> entity_type;
    std::vector<std::string> actions;  // empty = unconstrained
    std::vector<std::string> roles;

    bool operator==(const PolicyWhen&) const = default;
    bool empty() const {
        return !conflict_type && !entity_type && actions.empty() && roles.empty();
    }
};

enum class PolicyOutcomeKind { PreferRole, PreferAction, ForbidAction };

struct PolicyOutcome {
    PolicyOutcomeKind kind = PolicyOutcomeKind::PreferRole;
    std::string value;

    bool operator==(const PolicyOutcome&) const = default;
};

struct PolicyRule {
    std::string id;
    int priority = 0;  // higher wins among matching rules
    PolicyWhen when;
    PolicyOutcome outcome;

    bool operator==(const PolicyRule&) const = default;
};

// Model-wide strict ordering between two action types.
struct TemporalRule {
    std::string before;
    std::string after;

    bool operator==(const TemporalRule&) const = default;
};

struct ProcessModel {
    std::string name;
    std::vector<EntityTypeDef> entity_types;
    std::vector<RoleDef> roles;
    std::vector<PolicyRule> policies;
    std::vector<TemporalRule> temporal;

    bool operator==(const ProcessModel&) const = default;

    const EntityTypeDef* find_entity_type(const std::string& t) const {
        for (const auto& e : entity_types)
            if (e.name == t) return &e;
        return nullptr;
    }
    const EntityTypeDef& entity_type(const std::string& t) const {
        if (const auto* e = find_entity_type(t)) return *e;
        throw UnknownEntityType("unknown entity type: " + t);
    }
    const RoleDef* find_role(const std::string& r) const {
        for (const auto& x : roles)
            if (x.name == r) return &x;
        return nullptr;
    }
    const RoleDef& role(const std::string& r) const {
        if (const auto* x = find_role(r)) return *x;
        throw UnknownRole("unknown role: " + r);
    }
};

struct CanonicalState {
    std::string state;
    bool known = true;  // false: state is neither canonical nor a registered alias
};

// Resolves aliases to canonical form. Unknown vocabulary passes through
// flagged rather than erroring: adversarial streams deliberately emit
// out-of-model strings and detection must keep going.
inline CanonicalState canonicalize(const ProcessModel& model, const std::string& entity_type,
                                   const std::string& state) {
    const auto& et = model.entity_type(entity_type);
    if (et.has_state(state)) return {state, true};
    if (auto it = et.synonyms.find(state); it != et.synonyms.end()) return {it->second, true};
    return {state, false};
}

inline bool mutually_exclusive(const ProcessModel& model, const std::string& entity_type,
                               const std::string& state_a, const std::string& state_b) {
    const auto& et = model.entity_type(entity_type);
    const std::string a = canonicalize(model, entity_type, state_a).state;
    const std::string b = canonicalize(model, entity_type, state_b).state;
    if (a == b) return false;
    for (const auto& set : et.mutex) {
        const bool has_a = std::find(set.begin(), set.end(), a) != set.end();
        const bool has_b = std::find(set.begin(), set.end(), b) != set.end();
        if (has_a && has_b) return true;
    }
    return false;
}

inline bool valid_transition(const ProcessModel& model, const std::string& entity_type,
                             const std::string& from_state, const std::string& to_state,
                             const std::string& action, const std::string& role) {
    const auto& et = model.entity_type(entity_type);
    const std::string from = canonicalize(model, entity_type, from_state).state;
    const std::string to = canonicalize(model, entity_type, to_state).state;
    for (const auto& t : et.transitions) {
        if (t.from == from && t.to == to && t.action == action &&
            std::find(t.roles.begin(), t.roles.end(), role) != t.roles.end())
            return true;
    }
    return false;
}

// Two entity types are coupled when they are the same type or some action
// name appears in transition rows of both (a composite operation spanning
// them). Drives causal-chain edge construction.
inline bool types_coupled(const ProcessModel& model, const std::string& t1,
                          const std::string& t2) {
    if (t1 == t2) return model.find_entity_type(t1) != nullptr;
    const auto* a = model.find_entity_type(t1);
    const auto* b = model.find_entity_type(t2);
    if (!a || !b) return false;
    for (const auto& ta : a->transitions)
        for (const auto& tb : b->transitions)
            if (ta.action == tb.action) return true;
    return false;
}

// The per-role slice of the model an agent is initialized with. The synonym
// vocabulary is never scoped: it is the shared vocabulary everyone speaks.
struct ScopedContext {
    std::string role;
    std::vector<std::string> entity_types;                       // types with >=1 permitted transition
    std::vector<std::pair<std::string, Transition>> transitions; // (entity type, row)
    std::vector<PolicyRule> policies;
    std::map<std::string, std::map<std::string, std::string>> vocabulary;  // type -> synonyms
};

inline ScopedContext scoped_context(const ProcessModel& model, const std::string& role_name) {
    model.role(role_name);  // throws UnknownRole
    ScopedContext ctx;
    ctx.role = role_name;
    for (const auto& et : model.entity_types) {
        bool any = false;
        for (const auto& t : et.transitions) {
            if (std::find(t.roles.begin(), t.roles.end(), role_name) != t.roles.end()) {
                ctx.transitions.emplace_back(et.name, t);
                any = true;
            }
        }
        if (any) ctx.entity_types.push_back(et.name);
        ctx.vocabulary[et.name] = et.synonyms;
    }
    for (const auto& p : model.policies) {
        if (p.when.roles.empty() ||
            std::find(p.when.roles.begin(), p.when.roles.end(), role_name) != p.when.roles.end())
            ctx.policies.push_back(p);
    }
    return ctx;
}

namespace detail {

inline std::string idx(const std::string& base, std::size_t i) {
    return base + "[" + std::to_string(i) + "]";
}

// Every non-terminal state must reach at least one terminal state through
// the transition relation.
inline void check_reachability(const EntityTypeDef& et, const std::string& path,
                               std::vector<Violation>& out) {
    std::set<std::string> reaches_terminal(et.terminal.begin(), et.terminal.end());
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& t : et.transitions) {
            if (reaches_terminal.count(t.to) && !reaches_terminal.count(t.from)) {
                reaches_terminal.insert(t.from);
                changed = true;
            }
        }
    }
    for (const auto& s : et.states) {
        if (!et.is_terminal(s) && !reaches_terminal.count(s))
            out.push_back({path + ".states", "non-terminal state '" + s +
                                                 "' cannot reach any terminal state"});
    }
}

inline void validate_entity_type(const EntityTypeDef& et, const std::string& path,
                                 std::vector<Violation>& out) {
    if (et.name.empty()) out.push_back({path + ".name", "entity type name is empty"});
    if (et.states.empty()) out.push_back({path + ".states", "entity type has no states"});
    std::set<std::string> seen;
    for (std::size_t i = 0; i < et.states.size(); ++i) {
        if (!seen.insert(et.states[i]).second)
            out.push_back({idx(path + ".states", i), "duplicate state '" + et.states[i] + "'"});
    }
    for (std::size_t i = 0; i < et.terminal.size(); ++i) {
        if (!et.has_state(et.terminal[i]))
            out.push_back({idx(path + ".terminal", i),
                           "terminal state '" + et.terminal[i] + "' is not a declared state"});
    }
    if (et.terminal.empty())
        out.push_back({path + ".terminal", "entity type has no terminal state"});
    for (const auto& [alias, canon] : et.synonyms) {
        const std::string p = path + ".synonyms." + alias;
        if (et.has_state(alias))
            out.push_back({p, "alias '" + alias + "' is itself a canonical state"});
        if (!et.has_state(canon))
            out.push_back({p, "alias '" + alias + "' maps to unknown state '" + canon + "'"});
    }
    for (std::size_t i = 0; i < et.mutex.size(); ++i) {
        const auto& set = et.mutex[i];
        const std::string p = idx(path + ".mutex", i);
        if (set.size() < 2) out.push_back({p, "mutex set has fewer than 2 members"});
        for (const auto& s : set) {
            if (!et.has_state(s))
                out.push_back({p, "mutex member '" + s + "' is not a canonical state"});
        }
    }
    for (std::size_t i = 0; i < et.transitions.size(); ++i) {
        const auto& t = et.transitions[i];
        const std::string p = idx(path + ".transitions", i);
        if (!et.has_state(t.from))
            out.push_back({p + ".from", "unknown state '" + t.from + "'"});
        if (!et.has_state(t.to)) out.push_back({p + ".to", "unknown state '" + t.to + "'"});
        if (t.action.empty()) out.push_back({p + ".action", "transition has no action"});
        if (t.roles.empty()) out.push_back({p + ".roles", "transition permits no roles"});
    }
    if (!et.states.empty()) check_reachability(et, path, out);
}

inline void validate_model(const ProcessModel& m, std::vector<Violation>& out) {
    if (m.name.empty()) out.push_back({"name", "model name is empty"});
    if (m.entity_types.empty()) out.push_back({"entity_types", "no entity types defined"});
    for (std::size_t i = 0; i < m.entity_types.size(); ++i)
        validate_entity_type(m.entity_types[i], idx("entity_types", i), out);

    std::set<std::string> role_names;
    std::set<int> ranks;
    std::set<std::string> actions;
    for (const auto& et : m.entity_types)
        for (const auto& t : et.transitions) actions.insert(t.action);

    for (std::size_t i = 0; i < m.roles.size(); ++i) {
        const auto& r = m.roles[i];
        const std::string p = idx("roles", i);
        if (!role_names.insert(r.name).second)
            out.push_back({p + ".name", "duplicate role '" + r.name + "'"});
        if (r.rank < 1)
            out.push_back({p + ".rank", "rank must be a positive integer"});
        else if (!ranks.insert(r.rank).second)
            out.push_back({p + ".rank", "duplicate rank " + std::to_string(r.rank)});
    }
    // roles named in transitions must exist
    for (std::size_t i = 0; i < m.entity_types.size(); ++i) {
        const auto& et = m.entity_types[i];
        for (std::size_t j = 0; j < et.transitions.size(); ++j)
            for (const auto& role : et.transitions[j].roles)
                if (!role_names.count(role))
                    out.push_back({idx(idx("entity_types", i) + ".transitions", j) + ".roles",
                                   "unknown role '" + role + "'"});
    }
    for (std::size_t i = 0; i < m.policies.size(); ++i) {
        const auto& pr = m.policies[i];
        const std::string p = idx("policies", i);
        if (pr.id.empty()) out.push_back({p + ".id", "policy has no id"});
        if (pr.when.empty()) out.push_back({p + ".when", "policy has an empty match predicate"});
        if (pr.when.entity_type && !m.find_entity_type(*pr.when.entity_type))
            out.push_back({p + ".when.entity_type",
                           "unknown entity type '" + *pr.when.entity_type + "'"});
        for (const auto& a : pr.when.actions)
            if (!actions.count(a))
                out.push_back({p + ".when.actions", "unknown action '" + a + "'"});
        for (const auto& r : pr.when.roles)
            if (!role_names.count(r))
                out.push_back({p + ".when.roles", "unknown role '" + r + "'"});
        switch (pr.outcome.kind) {
            case PolicyOutcomeKind::PreferRole:
                if (!role_names.count(pr.outcome.value))
                    out.push_back({p + ".outcome", "prefer_role names unknown role '" +
                                                       pr.outcome.value + "'"});
                break;
            case PolicyOutcomeKind::PreferAction:
            case PolicyOutcomeKind::ForbidAction:
                if (!actions.count(pr.outcome.value))
                    out.push_back({p + ".outcome", "outcome names unknown action '" +
                                                       pr.outcome.value + "'"});
                break;
        }
    }
    for (std::size_t i = 0; i < m.temporal.size(); ++i) {
        const auto& t = m.temporal[i];
        const std::string p = idx("temporal", i);
        if (!actions.count(t.before))
            out.push_back({p + ".before", "unknown action '" + t.before + "'"});
        if (!actions.count(t.after))
            out.push_back({p + ".after", "unknown action '" + t.after + "'"});
    }
}

inline std::vector<std::string> as_string_list(const YAML::Node& n) {
    std::vector<std::string> out;
    if (!n) return out;
    for (const auto& x : n) out.push_back(x.as<std::string>());
    return out;
}

}  // namespace detail

// Parses YAML text into a validated model. Throws SyntaxError on malformed
// YAML and ValidationError listing every violated invariant (not just the
// first) otherwise.
inline ProcessModel parse_model(const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(source);
    } catch (const YAML::Exception& e) {
        throw SyntaxError(std::string("malformed YAML: ") + e.what());
    }

    ProcessModel m;
    std::vector<Violation> violations;
    try {
        if (root["name"]) m.name = root["name"].as<std::string>();
        std::size_t et_index = 0;
        for (const auto& etn : root["entity_types"]) {
            EntityTypeDef et;
            et.name = etn["name"] ? etn["name"].as<std::string>() : "";
            et.states = detail::as_string_list(etn["states"]);
            if (etn["synonyms"]) {
                for (const auto& kv : etn["synonyms"]) {
                    const auto alias = kv.first.as<std::string>();
                    const auto canon = kv.second.as<std::string>();
                    auto [it, fresh] = et.synonyms.emplace(alias, canon);
                    if (!fresh && it->second != canon)
                        violations.push_back(
                            {detail::idx("entity_types", et_index) + ".synonyms." + alias,
                             "alias '" + alias + "' maps to both '" + it->second + "' and '" +
                                 canon + "' (synonym mapping must be a function)"});
                }
            }
            et.terminal = detail::as_string_list(etn["terminal"]);
            if (etn["mutex"])
                for (const auto& set : etn["mutex"])
                    et.mutex.push_back(detail::as_string_list(set));
            if (etn["transitions"]) {
                for (const auto& tn : etn["transitions"]) {
                    Transition t;
                    t.from = tn["from"] ? tn["from"].as<std::string>() : "";
                    t.to = tn["to"] ? tn["to"].as<std::string>() : "";
                    t.action = tn["action"] ? tn["action"].as<std::string>() : "";
                    t.roles = detail::as_string_list(tn["roles"]);
                    et.transitions.push_back(std::move(t));
                }
            }
            m.entity_types.push_back(std::move(et));
            ++et_index;
        }
        for (const auto& rn : root["roles"]) {
            RoleDef r;
            r.name = rn["name"] ? rn["name"].as<std::string>() : "";
            r.rank = rn["rank"] ? rn["rank"].as<int>() : 0;
            r.skills = detail::as_string_list(rn["skills"]);
            m.roles.push_back(std::move(r));
        }
        if (root["policies"]) {
            for (const auto& pn : root["policies"]) {
                PolicyRule p;
                p.id = pn["id"] ? pn["id"].as<std::string>() : "";
                p.priority = pn["priority"] ? pn["priority"].as<int>() : 0;
                if (const auto& wn = pn["when"]) {
                    if (wn["conflict_type"]) p.when.conflict_type = wn["conflict_type"].as<int>();
                    if (wn["entity_type"]) p.when.entity_type = wn["entity_type"].as<std::string>();
                    p.when.actions = detail::as_string_list(wn["actions"]);
                    p.when.roles = detail::as_string_list(wn["roles"]);
                }
                if (const auto& on = pn["outcome"]) {
                    if (on["prefer_role"]) {
                        p.outcome = {PolicyOutcomeKind::PreferRole,
                                     on["prefer_role"].as<std::string>()};
                    } else if (on["prefer_action"]) {
                        p.outcome = {PolicyOutcomeKind::PreferAction,
                                     on["prefer_action"].as<std::string>()};
                    } else if (on["forbid_action"]) {
                        p.outcome = {PolicyOutcomeKind::ForbidAction,
                                     on["forbid_action"].as<std::string>()};
                    } else {
                        violations.push_back({"policies", "policy '" + p.id +
                                                              "' has no recognized outcome"});
                    }
                }
                m.policies.push_back(std::move(p));
            }
        }
        if (root["temporal"]) {
            for (const auto& tn : root["temporal"]) {
                TemporalRule t;
                t.before = tn["before"] ? tn["before"].as<std::string>() : "";
                t.after = tn["after"] ? tn["after"].as<std::string>() : "";
                m.temporal.push_back(std::move(t));
            }
        }
    } catch (const YAML::Exception& e) {
        throw SyntaxError(std::string("malformed YAML structure: ") + e.what());
    }

    detail::validate_model(m, violations);
    if (!violations.empty()) throw ValidationError(std::move(violations));
    return m;
}

// Round-trippable emission: parse_model(serialize_model(m)) == m.
inline std::string serialize_model(const ProcessModel& m) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << m.name;
    out << YAML::Key << "entity_types" << YAML::Value << YAML::BeginSeq;
    for (const auto& et : m.entity_types) {
        out << YAML::BeginMap;
        out << YAML::Key << "name" << YAML::Value << et.name;
        out << YAML::Key << "states" << YAML::Value << YAML::Flow << et.states;
        out << YAML::Key << "synonyms" << YAML::Value << YAML::BeginMap;
        for (const auto& [a, c] : et.synonyms) out << YAML::Key << a << YAML::Value << c;
        out << YAML::EndMap;
        out << YAML::Key << "terminal" << YAML::Value << YAML::Flow << et.terminal;
        out << YAML::Key << "mutex" << YAML::Value << YAML::BeginSeq;
        for (const auto& s : et.mutex) out << YAML::Flow << s;
        out << YAML::EndSeq;
        out << YAML::Key << "transitions" << YAML::Value << YAML::BeginSeq;
        for (const auto& t : et.transitions) {
            out << YAML::BeginMap;
            out << YAML::Key << "from" << YAML::Value << t.from;
            out << YAML::Key << "to" << YAML::Value << t.to;
            out << YAML::Key << "action" << YAML::Value << t.action;
            out << YAML::Key << "roles" << YAML::Value << YAML::Flow << t.roles;
            out << YAML::EndMap;
        }
        out << YAML::EndSeq << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "roles" << YAML::Value << YAML::BeginSeq;
    for (const auto& r : m.roles) {
        out << YAML::BeginMap;
        out << YAML::Key << "name" << YAML::Value << r.name;
        out << YAML::Key << "rank" << YAML::Value << r.rank;
        out << YAML::Key << "skills" << YAML::Value << YAML::Flow << r.skills;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "policies" << YAML::Value << YAML::BeginSeq;
    for (const auto& p : m.policies) {
        out << YAML::BeginMap;
        out << YAML::Key << "id" << YAML::Value << p.id;
        out << YAML::Key << "priority" << YAML::Value << p.priority;
        out << YAML::Key << "when" << YAML::Value << YAML::BeginMap;
        if (p.when.conflict_type)
            out << YAML::Key << "conflict_type" << YAML::Value << *p.when.conflict_type;
        if (p.when.entity_type)
            out << YAML::Key << "entity_type" << YAML::Value << *p.when.entity_type;
        if (!p.when.actions.empty())
            out << YAML::Key << "actions" << YAML::Value << YAML::Flow << p.when.actions;
        if (!p.when.roles.empty())
            out << YAML::Key << "roles" << YAML::Value << YAML::Flow << p.when.roles;
        out << YAML::EndMap;
        out << YAML::Key << "outcome" << YAML::Value << YAML::BeginMap;
        switch (p.outcome.kind) {
            case PolicyOutcomeKind::PreferRole:
                out << YAML::Key << "prefer_role" << YAML::Value << p.outcome.value;
                break;
            case PolicyOutcomeKind::PreferAction:
                out << YAML::Key << "prefer_action" << YAML::Value << p.outcome.value;
                break;
            case PolicyOutcomeKind::ForbidAction:
                out << YAML::Key << "forbid_action" << YAML::Value << p.outcome.value;
                break;
        }
        out << YAML::EndMap << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "temporal" << YAML::Value << YAML::BeginSeq;
    for (const auto& t : m.temporal) {
        out << YAML::BeginMap;
        out << YAML::Key << "before" << YAML::Value << t.before;
        out << YAML::Key << "after" << YAML::Value << t.after;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace scf
