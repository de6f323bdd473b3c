#include <doctest.h>

#include <algorithm>
#include <set>

#include "../support/fixtures.hpp"
#include "scf/intent_graph.hpp"

using namespace scf;
using scf_test::make_node;
using scf_test::toy_model;

namespace {

IntentGraph toy_graph() { return IntentGraph("wf", &toy_model()); }

}  // namespace

TEST_CASE("first intent registers with no edges") {
    auto g = toy_graph();
    g.register_intent(make_node({"a", 1, "ag1", "shipper", "ship",
                                 {{"o1", "order", "confirmed"}},
                                 {{"o1", "shipped"}}}));
    CHECK(g.nodes().size() == 1);
    CHECK(g.edges().empty());
    CHECK(g.node("a").status == IntentStatus::Registered);
}

TEST_CASE("same entity with different postconditions yields a potential-conflict edge") {
    auto g = toy_graph();
    g.register_intent(make_node({"a", 1, "ag1", "shipper", "ship",
                                 {{"o1", "order", "confirmed"}},
                                 {{"o1", "shipped"}}}));
    g.register_intent(make_node({"b", 2, "ag2", "manager", "cancel",
                                 {{"o1", "order", "confirmed"}},
                                 {{"o1", "cancelled"}}}));
    CHECK(g.has_edge("a", "b", EdgeKind::PotentialConflict));
    CHECK_FALSE(g.has_edge("b", "a", EdgeKind::PotentialConflict));  // earlier -> later
    CHECK(g.edges().size() == 1);
}

TEST_CASE("explicit causal dependency yields exactly one dependency edge") {
    auto g = toy_graph();
    g.register_intent(make_node({"a", 1, "ag1", "clerk", "confirm",
                                 {{"o1", "order", "pending"}},
                                 {{"o1", "confirmed"}}}));
    g.register_intent(make_node({"b", 2, "ag2", "shipper", "ship",
                                 {{"o2", "order", "confirmed"}},
                                 {{"o2", "shipped"}},
                                 {},
                                 {"a"}}));
    CHECK(g.edges().size() == 1);
    CHECK(g.has_edge("a", "b", EdgeKind::Dependency));
}

TEST_CASE("pre-state matching an earlier postcondition implies dependency, not conflict") {
    auto g = toy_graph();
    g.register_intent(make_node({"a", 1, "ag1", "clerk", "confirm",
                                 {{"o1", "order", "pending"}},
                                 {{"o1", "confirmed"}}}));
    g.register_intent(make_node({"b", 2, "ag2", "shipper", "ship",
                                 {{"o1", "order", "confirmed"}},
                                 {{"o1", "shipped"}}}));
    CHECK(g.has_edge("a", "b", EdgeKind::Dependency));
    CHECK_FALSE(g.has_edge("a", "b", EdgeKind::PotentialConflict));
}

TEST_CASE("cancel-then-ship with mismatched pre-state is a potential conflict") {
    auto g = toy_graph();
    g.register_intent(make_node({"cancel", 1, "ag1", "manager", "cancel",
                                 {{"o1", "order", "confirmed"}},
                                 {{"o1", "cancelled"}}}));
    g.register_intent(make_node({"ship", 2, "ag2", "shipper", "ship",
                                 {{"o1", "order", "confirmed"}},
                                 {{"o1", "shipped"}}}));
    // cancelled != confirmed, so no dependency; entity overlap stands.
    CHECK(g.has_edge("cancel", "ship", EdgeKind::PotentialConflict));
}

TEST_CASE("coupled cross-entity write/read yields a causal-chain edge") {
    auto g = toy_graph();
    // allocator commits stock; scheduler assumes an order pre-state. The toy
    // types share the "ship" action, so they are coupled.
    g.register_intent(make_node({"alloc", 1, "ag1", "clerk", "commit_stock",
                                 {{"s1", "stock", "reserved"}},
                                 {{"s1", "committed"}}}));
    g.register_intent(make_node({"sched", 2, "ag2", "shipper", "ship",
                                 {{"o1", "order", "confirmed"}},
                                 {{"o1", "shipped"}}}));
    CHECK(g.has_edge("alloc", "sched", EdgeKind::CausalChain));
    CHECK_FALSE(g.has_edge("alloc", "sched", EdgeKind::PotentialConflict));
}

TEST_CASE("disjoint entities without coupling or deps yield zero edges") {
    ProcessModel lonely = toy_model();
    lonely.entity_types[0].transitions[1].action = "ship_order";  // break the coupling
    IntentGraph g("wf", &lonely);
    g.register_intent(make_node({"a", 1, "ag1", "clerk", "reserve",
                                 {{"s1", "stock", "available"}},
                                 {{"s1", "reserved"}}}));
    g.register_intent(make_node({"b", 2, "ag2", "clerk", "confirm",
                                 {{"o1", "order", "pending"}},
                                 {{"o1", "confirmed"}}}));
    CHECK(g.edges().empty());
}

TEST_CASE("duplicate ids and non-monotonic timestamps are rejected") {
    auto g = toy_graph();
    g.register_intent(make_node({"a", 5, "ag1", "clerk", "confirm",
                                 {{"o1", "order", "pending"}},
                                 {{"o1", "confirmed"}}}));
    CHECK_THROWS_AS(g.register_intent(make_node({"a", 6, "x", "clerk", "confirm", {}, {}})),
                    DuplicateId);
    CHECK_THROWS_AS(g.register_intent(make_node({"b", 5, "x", "clerk", "confirm", {}, {}})),
                    NonMonotonicTimestamp);
    CHECK_THROWS_AS(g.register_intent(make_node({"c", 4, "x", "clerk", "confirm", {}, {}})),
                    NonMonotonicTimestamp);
}

TEST_CASE("status transitions follow the lifecycle table") {
    auto g = toy_graph();
    g.register_intent(make_node({"a", 1, "ag1", "clerk", "confirm",
                                 {{"o1", "order", "pending"}},
                                 {{"o1", "confirmed"}}}));
    g.set_status("a", IntentStatus::Committed);
    CHECK(g.node("a").status == IntentStatus::Committed);
    CHECK_THROWS_AS(g.set_status("a", IntentStatus::Aborted), IllegalStatusTransition);

    g.register_intent(make_node({"b", 2, "ag1", "clerk", "confirm",
                                 {{"o2", "order", "pending"}},
                                 {{"o2", "confirmed"}}}));
    g.set_status("b", IntentStatus::Blocked);
    g.set_status("b", IntentStatus::Queued);
    CHECK(g.node("b").status == IntentStatus::Queued);
    CHECK_THROWS_AS(g.set_status("b", IntentStatus::Committed), IllegalStatusTransition);

    int hooks = 0;
    g.set_status_hook([&](const IntentNode&, IntentStatus) { ++hooks; });
    g.set_status("b", IntentStatus::Aborted);
    CHECK(hooks == 1);
}

TEST_CASE("terminal nodes acquire no new edges") {
    auto g = toy_graph();
    g.register_intent(make_node({"a", 1, "ag1", "shipper", "ship",
                                 {{"o1", "order", "confirmed"}},
                                 {{"o1", "shipped"}}}));
    g.set_status("a", IntentStatus::Committed);
    g.register_intent(make_node({"b", 2, "ag2", "manager", "cancel",
                                 {{"o1", "order", "confirmed"}},
                                 {{"o1", "cancelled"}}}));
    CHECK(g.edges().empty());
}

TEST_CASE("conflict subgraph is induced plus one dependency/causal hop") {
    auto g = toy_graph();
    g.register_intent(make_node({"root", 1, "ag0", "clerk", "confirm",
                                 {{"o1", "order", "pending"}},
                                 {{"o1", "confirmed"}}}));
    g.register_intent(make_node({"ship", 2, "ag1", "shipper", "ship",
                                 {{"o1", "order", "confirmed"}},
                                 {{"o1", "shipped"}}}));
    g.register_intent(make_node({"cancel", 3, "ag2", "manager", "cancel",
                                 {{"o1", "order", "confirmed"}},
                                 {{"o1", "cancelled"}}}));
    // ship depends on root; ship/cancel plus that predecessor => 3 nodes
    const auto sub = g.conflict_subgraph({"ship", "cancel"});
    CHECK(sub.nodes().size() == 3);
    CHECK(sub.contains("root"));

    const auto again = sub.conflict_subgraph({"ship", "cancel"});
    CHECK(again.nodes().size() == sub.nodes().size());

    auto g2 = toy_graph();
    g2.register_intent(make_node({"x", 1, "a", "clerk", "confirm",
                                  {{"o1", "order", "pending"}},
                                  {{"o1", "confirmed"}}}));
    g2.register_intent(make_node({"y", 2, "b", "manager", "cancel",
                                  {{"o1", "order", "pending"}},
                                  {{"o1", "cancelled"}}}));
    CHECK(g2.conflict_subgraph({"x", "y"}).nodes().size() == 2);
    CHECK_THROWS_AS(g2.conflict_subgraph({"missing"}), UnknownNode);
}

TEST_CASE("edge construction is permutation invariant up to direction") {
    // No pre/post pair of these nodes matches, so no asymmetric dependency
    // rule can fire; the undirected relation must not depend on arrival order.
    std::vector<scf_test::NodeSpec> specs = {
        {"ship", 0, "a1", "shipper", "ship", {{"o1", "order", "confirmed"}}, {{"o1", "shipped"}}},
        {"cancel", 0, "a2", "manager", "cancel", {{"o1", "order", "confirmed"}},
         {{"o1", "cancelled"}}},
        {"alloc", 0, "a3", "clerk", "commit_stock", {{"s1", "stock", "reserved"}},
         {{"s1", "committed"}}},
    };
    auto run_order = [&](std::vector<int> order) {
        IntentGraph g("wf", &toy_model());
        std::uint64_t ts = 0;
        for (int idx : order) {
            auto s = specs[static_cast<std::size_t>(idx)];
            s.ts = ++ts;
            g.register_intent(make_node(s));
        }
        std::set<std::tuple<std::string, std::string, int>> undirected;
        for (const auto& e : g.edges()) {
            auto a = std::min(e.from, e.to);
            auto b = std::max(e.from, e.to);
            undirected.insert({a, b, static_cast<int>(e.kind)});
            // direction must follow timestamps
            CHECK(g.node(e.from).timestamp < g.node(e.to).timestamp);
        }
        return undirected;
    };
    const auto base = run_order({0, 1, 2});
    CHECK(run_order({2, 1, 0}) == base);
    CHECK(run_order({1, 2, 0}) == base);
    CHECK(run_order({2, 0, 1}) == base);
}

TEST_CASE("build_edges re-derives exactly the stored edges for each node") {
    auto g = toy_graph();
    g.register_intent(make_node({"a", 1, "x", "clerk", "confirm",
                                 {{"o1", "order", "pending"}},
                                 {{"o1", "confirmed"}}}));
    g.register_intent(make_node({"b", 2, "y", "shipper", "ship",
                                 {{"o1", "order", "confirmed"}},
                                 {{"o1", "shipped"}}}));
    g.register_intent(make_node({"c", 3, "z", "manager", "cancel",
                                 {{"o1", "order", "confirmed"}},
                                 {{"o1", "cancelled"}}}));
    for (const auto& n : g.nodes()) {
        auto derived = g.build_edges(n);
        std::set<std::tuple<std::string, std::string, int>> derived_set, stored;
        for (const auto& e : derived)
            derived_set.insert({e.from, e.to, static_cast<int>(e.kind)});
        for (const auto& e : g.edges())
            if (e.from == n.id || e.to == n.id)
                stored.insert({e.from, e.to, static_cast<int>(e.kind)});
        CHECK(derived_set == stored);
    }
}

TEST_CASE("dependency plus causal-chain subgraph stays acyclic after each registration") {
    auto g = toy_graph();
    std::vector<scf_test::NodeSpec> specs = {
        {"a", 1, "x", "clerk", "confirm", {{"o1", "order", "pending"}}, {{"o1", "confirmed"}}},
        {"b", 2, "y", "shipper", "ship", {{"o1", "order", "confirmed"}}, {{"o1", "shipped"}}},
        {"c", 3, "z", "clerk", "commit_stock", {{"s1", "stock", "reserved"}},
         {{"s1", "committed"}}},
        {"d", 4, "w", "manager", "cancel", {{"o2", "order", "confirmed"}}, {{"o2", "cancelled"}}},
    };
    for (const auto& s : specs) {
        g.register_intent(make_node(s));
        for (const auto& e : g.edges()) {
            if (e.kind == EdgeKind::PotentialConflict) continue;
            CHECK(g.node(e.from).timestamp < g.node(e.to).timestamp);
        }
    }
}

TEST_CASE("graph exports nodes and edges as json") {
    auto g = toy_graph();
    g.register_intent(make_node({"a", 1, "ag1", "shipper", "ship",
                                 {{"o1", "order", "confirmed"}},
                                 {{"o1", "shipped"}}}));
    const auto j = g.to_json();
    CHECK(j["workflow_id"] == "wf");
    CHECK(j["nodes"].size() == 1);
    CHECK(j["nodes"][0]["status"] == "registered");
}
