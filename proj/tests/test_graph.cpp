#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "xylokit/graph.hpp"
#include "xylokit/prng.hpp"

using namespace xylokit;

namespace {

LifParams lif_params(int n, double threshold = 1.0) {
    LifParams p;
    p.tau_mem = Eigen::VectorXd::Constant(n, 0.002);
    p.tau_syn[0] = Eigen::VectorXd::Constant(n, 0.002);
    p.threshold = Eigen::VectorXd::Constant(n, threshold);
    p.bias = Eigen::VectorXd::Zero(n);
    return p;
}

ModuleId add_linear(Graph& g, int rows, int cols) {
    return make_linear(g, Eigen::MatrixXd::Constant(rows, cols, 0.5));
}

// All topological orders of the module DAG derived from node source/sink
// lists; the brute-force oracle for traversal order.
void all_topo_orders(const std::map<ModuleId, std::set<ModuleId>>& succ,
                     std::map<ModuleId, int>& indeg, std::vector<ModuleId>& prefix,
                     std::set<std::vector<ModuleId>>& out) {
    bool any = false;
    for (auto& [m, d] : indeg) {
        if (d != 0) continue;
        any = true;
        d = -1;
        prefix.push_back(m);
        for (ModuleId s : succ.at(m)) --indeg[s];
        all_topo_orders(succ, indeg, prefix, out);
        for (ModuleId s : succ.at(m)) ++indeg[s];
        prefix.pop_back();
        d = 0;
    }
    if (!any && prefix.size() == indeg.size()) out.insert(prefix);
}

std::set<std::vector<ModuleId>> topo_oracle(const Graph& g, ModuleId root) {
    const auto comp = g.component(root);
    std::map<ModuleId, std::set<ModuleId>> succ;
    std::map<ModuleId, int> indeg;
    for (ModuleId m : comp.modules) {
        succ[m];
        indeg[m] = 0;
    }
    for (ModuleId m : comp.modules)
        for (NodeId n : g.resolved_inputs(m))
            for (ModuleId p : g.node(n).source_modules)
                if (succ[p].insert(m).second) ++indeg[m];
    std::vector<ModuleId> prefix;
    std::set<std::vector<ModuleId>> out;
    all_topo_orders(succ, indeg, prefix, out);
    return out;
}

std::vector<ModuleId> order_of(const std::vector<TraversalEntry>& t) {
    std::vector<ModuleId> out;
    for (const auto& e : t) out.push_back(e.module);
    return out;
}

}  // namespace

TEST_CASE("make_linear creates nodes matching the matrix shape") {
    Graph g;
    const ModuleId m = make_linear(g, Eigen::MatrixXd::Zero(2, 3));
    CHECK(g.module(m).input_nodes.size() == 2);
    CHECK(g.module(m).output_nodes.size() == 3);
    CHECK(g.module(m).kind == ModuleKind::LinearWeights);
    g.audit();

    const ModuleId tiny = make_linear(g, Eigen::MatrixXd::Zero(1, 1));
    CHECK(g.module(tiny).input_nodes.size() == 1);

    CHECK_THROWS_AS(make_linear(g, Eigen::MatrixXd(0, 0)), ConstructionError);
}

TEST_CASE("make_lif arity follows the synapse channel count") {
    Graph g;
    const ModuleId one = make_lif(g, lif_params(4), 4, 1);
    CHECK(g.module(one).input_nodes.size() == 4);
    CHECK(g.module(one).output_nodes.size() == 4);

    const ModuleId two = make_lif(g, lif_params(4), 4, 2);
    CHECK(g.module(two).input_nodes.size() == 8);
    CHECK(g.module(two).output_nodes.size() == 4);
    g.audit();

    CHECK_THROWS_AS(make_lif(g, lif_params(4, 0.0), 4, 1), ConstructionError);
    CHECK_THROWS_AS(make_lif(g, lif_params(3), 4, 1), ConstructionError);
    CHECK_THROWS_AS(make_lif(g, lif_params(4), 4, 3), ConstructionError);
    LifParams bad_tau = lif_params(4);
    bad_tau.tau_mem(2) = -1.0;
    CHECK_THROWS_AS(make_lif(g, bad_tau, 4, 1), ConstructionError);
    LifParams bad_rec = lif_params(4);
    bad_rec.w_rec = Eigen::MatrixXd::Zero(4, 3);
    CHECK_THROWS_AS(make_lif(g, bad_rec, 4, 1), ConstructionError);
}

TEST_CASE("connect_modules merges nodes pairwise") {
    Graph g;
    const ModuleId lin = add_linear(g, 2, 3);
    const ModuleId lif = make_lif(g, lif_params(3), 3, 1);
    connect_modules(g, lin, lif);
    g.audit();
    CHECK(g.resolved_outputs(lin) == g.resolved_inputs(lif));
    const NodeId shared = g.resolved_outputs(lin)[0];
    CHECK(g.node(shared).source_modules == std::vector<ModuleId>{lin});
    CHECK(g.node(shared).sink_modules == std::vector<ModuleId>{lif});
}

TEST_CASE("connect_modules rejects arity mismatch naming both modules") {
    Graph g;
    const ModuleId lin = make_linear(g, Eigen::MatrixXd::Zero(2, 3), "enc");
    const ModuleId lif = make_lif(g, lif_params(4), 4, 1, "pool");
    try {
        connect_modules(g, lin, lif);
        FAIL("expected ConnectionError");
    } catch (const ConnectionError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("enc") != std::string::npos);
        CHECK(msg.find("pool") != std::string::npos);
        CHECK(msg.find("3") != std::string::npos);
        CHECK(msg.find("4") != std::string::npos);
    }
}

TEST_CASE("chained modules form one weakly connected graph") {
    Graph g;
    const ModuleId l1 = add_linear(g, 2, 3);
    const ModuleId f1 = make_lif(g, lif_params(3), 3, 1);
    const ModuleId l2 = add_linear(g, 3, 2);
    const ModuleId f2 = make_lif(g, lif_params(2), 2, 1);
    connect_modules(g, l1, f1);
    connect_modules(g, f1, l2);
    connect_modules(g, l2, f2);
    g.audit();

    const auto t = traverse(g, l1);
    REQUIRE(t.size() == 4);  // reachable-module oracle: all four in one component
    CHECK(order_of(t) == std::vector<ModuleId>{l1, f1, l2, f2});
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(t[i].depth == static_cast<int>(i));
}

TEST_CASE("holder is transparent to traversal") {
    Graph g;
    const ModuleId lin = add_linear(g, 2, 3);
    const ModuleId holder = as_graph_holder(g, g.module(lin).input_nodes,
                                            g.module(lin).output_nodes);
    CHECK(order_of(traverse(g, holder)) == order_of(traverse(g, lin)));

    const ModuleId l1 = add_linear(g, 4, 3);
    const ModuleId f1 = make_lif(g, lif_params(3), 3, 1);
    connect_modules(g, l1, f1);
    const ModuleId chain = as_graph_holder(g, g.module(l1).input_nodes,
                                           g.module(f1).output_nodes);
    // end-to-end arity of the composed chain
    CHECK(g.module(chain).input_nodes.size() == 4);
    CHECK(g.module(chain).output_nodes.size() == 3);
    CHECK(order_of(traverse(g, chain)) == std::vector<ModuleId>{l1, f1});
}

TEST_CASE("as_graph_holder requires reachable outputs") {
    Graph g;
    const ModuleId lin = add_linear(g, 2, 2);
    const ModuleId stray = add_linear(g, 1, 1);
    std::vector<NodeId> outs = g.module(lin).output_nodes;
    outs.push_back(g.module(stray).output_nodes[0]);
    CHECK_THROWS_AS(as_graph_holder(g, g.module(lin).input_nodes, outs),
                    EncapsulationError);
}

TEST_CASE("compose_sequential wires a stack and reports the failing stage") {
    Graph g;
    const ModuleId l1 = add_linear(g, 16, 8);
    const ModuleId f1 = make_lif(g, lif_params(8), 8, 1);
    const ModuleId l2 = add_linear(g, 8, 8);
    const ModuleId f2 = make_lif(g, lif_params(8), 8, 1);
    const ModuleId holder = compose_sequential(g, {l1, f1, l2, f2});
    CHECK(g.module(holder).input_nodes.size() == 16);
    CHECK(g.module(holder).output_nodes.size() == 8);
    CHECK(order_of(traverse(g, holder)) == std::vector<ModuleId>{l1, f1, l2, f2});

    Graph g2;
    const ModuleId single = add_linear(g2, 2, 2);
    const ModuleId wrapped = compose_sequential(g2, {single});
    CHECK(order_of(traverse(g2, wrapped)) == std::vector<ModuleId>{single});

    Graph g3;
    const ModuleId a = add_linear(g3, 4, 3);
    const ModuleId b = make_lif(g3, lif_params(3), 3, 1);
    const ModuleId c = add_linear(g3, 5, 2);  // arity break connecting into stage 2
    try {
        compose_sequential(g3, {a, b, c});
        FAIL("expected ConnectionError");
    } catch (const ConnectionError& e) {
        CHECK(std::string(e.what()).find("stage 2") != std::string::npos);
    }
}

TEST_CASE("compose_residual records one skip pair per boundary index") {
    Graph g;
    LifParams p = lif_params(8);
    p.w_rec = Eigen::MatrixXd::Zero(8, 8);
    const ModuleId body = make_lif(g, p, 8, 1);
    const ModuleId holder = compose_residual(g, body);
    const auto& pairs = g.module(holder).holder().skip_pairs;
    REQUIRE(pairs.size() == 8);
    for (int i = 0; i < 8; ++i) {
        CHECK(g.canonical(pairs[i].first) == g.resolved_inputs(body)[i]);
        CHECK(g.canonical(pairs[i].second) == g.resolved_outputs(body)[i]);
    }

    CHECK_THROWS_AS(compose_residual(g, add_linear(g, 8, 4)), ConstructionError);
}

TEST_CASE("nested residuals record two skip layers") {
    Graph g;
    const ModuleId body = make_lif(g, lif_params(4), 4, 1);
    const ModuleId inner = compose_residual(g, body);
    const ModuleId outer = compose_residual(g, inner);
    g.finalize();

    const auto comp = g.component(outer);
    int holders_with_skips = 0;
    for (ModuleId h : g.holders_in(comp))
        if (!g.module(h).holder().skip_pairs.empty()) ++holders_with_skips;
    CHECK(holders_with_skips == 2);
    CHECK(order_of(traverse(g, outer)) == std::vector<ModuleId>{body});
}

TEST_CASE("diamond fan-out keeps both branches at equal depth") {
    Graph g;
    const ModuleId root = add_linear(g, 2, 2);
    const ModuleId a = add_linear(g, 2, 3);
    const ModuleId b = add_linear(g, 2, 3);
    connect_modules(g, root, a);
    connect_modules(g, root, b);
    g.audit();

    const auto t = traverse(g, root);
    REQUIRE(t.size() == 3);
    CHECK(t[0].module == root);
    CHECK(t[1].module == a);  // creation-id tie break
    CHECK(t[2].module == b);
    CHECK(t[1].depth == t[2].depth);

    const auto valid_orders = topo_oracle(g, root);
    CHECK(valid_orders.count(order_of(t)) == 1);
}

TEST_CASE("a two-module cycle raises CycleError with members") {
    Graph g;
    const ModuleId a = add_linear(g, 2, 2);
    const ModuleId b = add_linear(g, 2, 2);
    connect_modules(g, a, b);
    connect_modules(g, b, a);
    try {
        traverse(g, a);
        FAIL("expected CycleError");
    } catch (const CycleError& e) {
        const std::string msg = e.what();
        CHECK(msg.find(g.module(a).name) != std::string::npos);
        CHECK(msg.find(g.module(b).name) != std::string::npos);
    }
}

TEST_CASE("connect order does not change the composed graph") {
    auto signature = [](const Graph& g, ModuleId root) {
        std::vector<std::tuple<ModuleKind, std::size_t, std::size_t, int>> sig;
        for (const auto& e : traverse(g, root)) {
            const GraphModule& m = g.module(e.module);
            sig.emplace_back(m.kind, m.input_nodes.size(), m.output_nodes.size(), e.depth);
        }
        return sig;
    };

    Graph g1;  // (A -> B) then -> C
    ModuleId a1 = add_linear(g1, 2, 3), b1 = add_linear(g1, 3, 4), c1 = add_linear(g1, 4, 5);
    connect_modules(g1, a1, b1);
    connect_modules(g1, b1, c1);

    Graph g2;  // A -> (B -> C)
    ModuleId a2 = add_linear(g2, 2, 3), b2 = add_linear(g2, 3, 4), c2 = add_linear(g2, 4, 5);
    connect_modules(g2, b2, c2);
    connect_modules(g2, a2, b2);

    CHECK(signature(g1, a1) == signature(g2, a2));
    g1.audit();
    g2.audit();
}

TEST_CASE("referential integrity holds after random construction sequences") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        SplitMix64 rng(seed);
        Graph g;
        std::vector<ModuleId> stages;
        int width = 1 + static_cast<int>(rng.next() % 8);
        const int depth = 2 + static_cast<int>(rng.next() % 4);
        for (int d = 0; d < depth; ++d) {
            const int next = 1 + static_cast<int>(rng.next() % 8);
            stages.push_back(add_linear(g, width, next));
            ModuleId lif = make_lif(g, lif_params(next), next, 1);
            if (rng.next() % 3 == 0) {
                stages.push_back(lif);
                stages.push_back(compose_residual(
                    g, compose_sequential(g, {add_linear(g, next, next),
                                              make_lif(g, lif_params(next), next, 1)})));
            } else {
                stages.push_back(lif);
            }
            width = next;
        }
        const ModuleId root = compose_sequential(g, stages);
        g.finalize();
        g.audit();
        CHECK(!traverse(g, root).empty());
    }
}

TEST_CASE("identical construction sequences traverse identically") {
    auto build = [] {
        Graph g;
        const ModuleId l1 = add_linear(g, 3, 5);
        const ModuleId f1 = make_lif(g, lif_params(5), 5, 1);
        const ModuleId l2 = add_linear(g, 5, 2);
        const ModuleId f2 = make_lif(g, lif_params(2), 2, 1);
        const ModuleId root = compose_sequential(g, {l1, f1, l2, f2});
        std::vector<std::pair<ModuleId, int>> out;
        for (const auto& e : traverse(g, root)) out.emplace_back(e.module, e.depth);
        return out;
    };
    CHECK(build() == build());
}

TEST_CASE("construction is rejected after finalize") {
    Graph g;
    const ModuleId a = add_linear(g, 2, 2);
    const ModuleId b = add_linear(g, 2, 2);
    g.finalize();
    CHECK_THROWS_AS(connect_modules(g, a, b), ConstructionError);
    CHECK_THROWS_AS(add_linear(g, 1, 1), ConstructionError);
}
