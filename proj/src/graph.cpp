#include "xylokit/graph.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace xylokit {

const char* to_string(ModuleKind kind) {
    switch (kind) {
        case ModuleKind::LinearWeights: return "LinearWeights";
        case ModuleKind::LIFNeurons: return "LIFNeurons";
        case ModuleKind::Holder: return "Holder";
    }
    return "?";
}

const GraphModule& Graph::module(ModuleId m) const {
    if (m < 0 || static_cast<std::size_t>(m) >= modules_.size())
        throw InternalError("module id out of range: " + std::to_string(m));
    return modules_[m];
}

NodeId Graph::canonical(NodeId n) const {
    if (n < 0 || static_cast<std::size_t>(n) >= nodes_.size())
        throw InternalError("node id out of range: " + std::to_string(n));
    while (nodes_[n].parent != n) n = nodes_[n].parent;
    return n;
}

const GraphNode& Graph::node(NodeId n) const { return nodes_[canonical(n)]; }

std::vector<NodeId> Graph::resolved_inputs(ModuleId m) const {
    std::vector<NodeId> out;
    out.reserve(module(m).input_nodes.size());
    for (NodeId n : module(m).input_nodes) out.push_back(canonical(n));
    return out;
}

std::vector<NodeId> Graph::resolved_outputs(ModuleId m) const {
    std::vector<NodeId> out;
    out.reserve(module(m).output_nodes.size());
    for (NodeId n : module(m).output_nodes) out.push_back(canonical(n));
    return out;
}

NodeId Graph::new_node() {
    GraphNode n;
    n.id = static_cast<NodeId>(nodes_.size());
    n.parent = n.id;
    nodes_.push_back(std::move(n));
    return nodes_.back().id;
}

ModuleId Graph::add_module(GraphModule m) {
    m.id = static_cast<ModuleId>(modules_.size());
    if (m.name.empty()) {
        std::string base;
        switch (m.kind) {
            case ModuleKind::LinearWeights: base = "linear"; break;
            case ModuleKind::LIFNeurons: base = "lif"; break;
            case ModuleKind::Holder: base = "holder"; break;
        }
        m.name = base + std::to_string(m.id);
    }
    modules_.push_back(std::move(m));
    return modules_.back().id;
}

void Graph::require_mutable(const char* op) const {
    if (finalized_)
        throw ConstructionError(std::string(op) + ": graph is finalized");
}

void Graph::merge_nodes(NodeId into, NodeId from) {
    into = canonical(into);
    from = canonical(from);
    if (into == from) return;
    GraphNode& a = nodes_[into];
    GraphNode& b = nodes_[from];
    a.source_modules.insert(a.source_modules.end(), b.source_modules.begin(),
                            b.source_modules.end());
    a.sink_modules.insert(a.sink_modules.end(), b.sink_modules.begin(),
                          b.sink_modules.end());
    b.source_modules.clear();
    b.sink_modules.clear();
    b.parent = into;
}

void Graph::audit() const {
    auto contains = [](const std::vector<NodeId>& v, NodeId n) {
        return std::find(v.begin(), v.end(), n) != v.end();
    };
    for (const GraphNode& n : nodes_) {
        if (n.parent != n.id) continue;  // merged away
        for (ModuleId m : n.sink_modules)
            if (!contains(resolved_inputs(m), n.id))
                throw InternalError("node " + std::to_string(n.id) + " lists sink " +
                                    module(m).name + " which does not list it as input");
        for (ModuleId m : n.source_modules)
            if (!contains(resolved_outputs(m), n.id))
                throw InternalError("node " + std::to_string(n.id) + " lists source " +
                                    module(m).name + " which does not list it as output");
    }
    auto lists = [&](const std::vector<ModuleId>& v, ModuleId m) {
        return std::find(v.begin(), v.end(), m) != v.end();
    };
    for (const GraphModule& m : modules_) {
        if (m.kind == ModuleKind::Holder) continue;  // boundary-only references
        for (NodeId n : resolved_inputs(m.id))
            if (!lists(node(n).sink_modules, m.id))
                throw InternalError("module " + m.name + " reads node " +
                                    std::to_string(n) + " which does not list it as sink");
        for (NodeId n : resolved_outputs(m.id))
            if (!lists(node(n).source_modules, m.id))
                throw InternalError("module " + m.name + " writes node " +
                                    std::to_string(n) + " which does not list it as source");
    }
}

bool Graph::Component::contains_module(ModuleId m) const {
    return std::binary_search(modules.begin(), modules.end(), m);
}

bool Graph::Component::contains_node(NodeId n) const {
    return std::binary_search(nodes.begin(), nodes.end(), n);
}

Graph::Component Graph::component(ModuleId root) const {
    std::set<ModuleId> mods;
    std::set<NodeId> seen_nodes;
    std::queue<NodeId> node_queue;
    std::queue<ModuleId> module_queue;

    auto push_node = [&](NodeId n) {
        n = canonical(n);
        if (seen_nodes.insert(n).second) node_queue.push(n);
    };
    auto push_module = [&](ModuleId m) {
        if (module(m).kind == ModuleKind::Holder) return;
        if (mods.insert(m).second) module_queue.push(m);
    };

    const GraphModule& r = module(root);
    if (r.kind == ModuleKind::Holder) {
        for (NodeId n : r.input_nodes) push_node(n);
        for (NodeId n : r.output_nodes) push_node(n);
    } else {
        push_module(root);
    }

    while (!node_queue.empty() || !module_queue.empty()) {
        while (!module_queue.empty()) {
            ModuleId m = module_queue.front();
            module_queue.pop();
            for (NodeId n : module(m).input_nodes) push_node(n);
            for (NodeId n : module(m).output_nodes) push_node(n);
        }
        while (!node_queue.empty()) {
            NodeId n = node_queue.front();
            node_queue.pop();
            for (ModuleId m : nodes_[n].source_modules) push_module(m);
            for (ModuleId m : nodes_[n].sink_modules) push_module(m);
        }
    }

    Component c;
    c.modules.assign(mods.begin(), mods.end());
    c.nodes.assign(seen_nodes.begin(), seen_nodes.end());
    return c;
}

std::vector<ModuleId> Graph::holders_in(const Component& c) const {
    std::vector<ModuleId> out;
    for (const GraphModule& m : modules_) {
        if (m.kind != ModuleKind::Holder) continue;
        bool inside = !m.input_nodes.empty() || !m.output_nodes.empty();
        for (NodeId n : m.input_nodes)
            if (!c.contains_node(canonical(n))) inside = false;
        for (NodeId n : m.output_nodes)
            if (!c.contains_node(canonical(n))) inside = false;
        if (inside) out.push_back(m.id);
    }
    return out;
}

ModuleId make_linear(Graph& g, const Eigen::MatrixXd& weights, std::string name) {
    g.require_mutable("make_linear");
    if (weights.rows() == 0 || weights.cols() == 0)
        throw ConstructionError("linear weights must be a non-empty matrix");
    if (!weights.allFinite())
        throw ConstructionError("linear weights must be finite");

    GraphModule m;
    m.kind = ModuleKind::LinearWeights;
    m.name = std::move(name);
    m.payload = LinearPayload{weights};
    for (Eigen::Index r = 0; r < weights.rows(); ++r) m.input_nodes.push_back(g.new_node());
    for (Eigen::Index c = 0; c < weights.cols(); ++c) m.output_nodes.push_back(g.new_node());
    ModuleId id = g.add_module(std::move(m));
    for (NodeId n : g.modules_[id].input_nodes) g.nodes_[n].sink_modules.push_back(id);
    for (NodeId n : g.modules_[id].output_nodes) g.nodes_[n].source_modules.push_back(id);
    return id;
}

ModuleId make_lif(Graph& g, const LifParams& params, int n, int synapse_channels,
                  std::string name) {
    g.require_mutable("make_lif");
    if (n <= 0) throw ConstructionError("LIF neuron count must be positive");
    if (synapse_channels != 1 && synapse_channels != 2)
        throw ConstructionError("LIF synapse channels must be 1 or 2");

    auto expect_len = [n](const Eigen::VectorXd& v, const char* what) {
        if (v.size() != n)
            throw ConstructionError(std::string("LIF parameter ") + what + " has length " +
                                    std::to_string(v.size()) + ", expected " +
                                    std::to_string(n));
    };
    expect_len(params.tau_mem, "tau_mem");
    expect_len(params.threshold, "threshold");
    expect_len(params.bias, "bias");
    expect_len(params.tau_syn[0], "tau_syn[0]");

    LifParams p = params;
    if (synapse_channels == 2) {
        if (p.tau_syn[1].size() == 0) p.tau_syn[1] = p.tau_syn[0];
        expect_len(p.tau_syn[1], "tau_syn[1]");
    } else if (p.tau_syn[1].size() != 0) {
        expect_len(p.tau_syn[1], "tau_syn[1]");
    }

    if ((p.tau_mem.array() <= 0.0).any())
        throw ConstructionError("LIF tau_mem must be strictly positive");
    for (int s = 0; s < synapse_channels; ++s)
        if ((p.tau_syn[s].array() <= 0.0).any())
            throw ConstructionError("LIF tau_syn must be strictly positive");
    if ((p.threshold.array() <= 0.0).any())
        throw ConstructionError("LIF threshold must be strictly positive");
    if (!p.tau_mem.allFinite() || !p.threshold.allFinite() || !p.bias.allFinite())
        throw ConstructionError("LIF parameters must be finite");
    if (p.w_rec) {
        if (p.w_rec->rows() != n || p.w_rec->cols() != Eigen::Index(n) * synapse_channels)
            throw ConstructionError("LIF recurrent weights must be N x (N*channels), got " +
                                    std::to_string(p.w_rec->rows()) + "x" +
                                    std::to_string(p.w_rec->cols()));
        if (!p.w_rec->allFinite())
            throw ConstructionError("LIF recurrent weights must be finite");
    }

    GraphModule m;
    m.kind = ModuleKind::LIFNeurons;
    m.name = std::move(name);
    LifPayload payload;
    payload.params = std::move(p);
    payload.neurons = n;
    payload.channels = synapse_channels;
    m.payload = std::move(payload);
    for (int i = 0; i < n * synapse_channels; ++i) m.input_nodes.push_back(g.new_node());
    for (int i = 0; i < n; ++i) m.output_nodes.push_back(g.new_node());
    ModuleId id = g.add_module(std::move(m));
    for (NodeId nd : g.modules_[id].input_nodes) g.nodes_[nd].sink_modules.push_back(id);
    for (NodeId nd : g.modules_[id].output_nodes) g.nodes_[nd].source_modules.push_back(id);
    return id;
}

void connect_modules(Graph& g, ModuleId src, ModuleId dst) {
    g.require_mutable("connect_modules");
    const auto outs = g.resolved_outputs(src);
    const auto ins = g.resolved_inputs(dst);
    if (outs.size() != ins.size()) {
        std::ostringstream msg;
        msg << "cannot connect '" << g.module(src).name << "' (" << outs.size()
            << " outputs) to '" << g.module(dst).name << "' (" << ins.size() << " inputs)";
        throw ConnectionError(msg.str());
    }
    for (std::size_t k = 0; k < outs.size(); ++k) g.merge_nodes(outs[k], ins[k]);
}

namespace {

// Canonical nodes reachable from `from` by following sink modules forward.
std::set<NodeId> forward_reachable(const Graph& g, const std::vector<NodeId>& from) {
    std::set<NodeId> seen;
    std::queue<NodeId> work;
    for (NodeId n : from) {
        NodeId c = g.canonical(n);
        if (seen.insert(c).second) work.push(c);
    }
    while (!work.empty()) {
        NodeId n = work.front();
        work.pop();
        for (ModuleId m : g.node(n).sink_modules)
            for (NodeId out : g.resolved_outputs(m)) {
                if (seen.insert(out).second) work.push(out);
            }
    }
    return seen;
}

}  // namespace

ModuleId as_graph_holder(Graph& g, std::vector<NodeId> input_nodes,
                         std::vector<NodeId> output_nodes, std::string name) {
    g.require_mutable("as_graph_holder");
    if (input_nodes.empty() || output_nodes.empty())
        throw EncapsulationError("holder boundary must be non-empty");
    const std::set<NodeId> reach = forward_reachable(g, input_nodes);
    for (NodeId n : output_nodes)
        if (!reach.count(g.canonical(n)))
            throw EncapsulationError("holder output node " + std::to_string(n) +
                                     " is not reachable from the input nodes");
    GraphModule m;
    m.kind = ModuleKind::Holder;
    m.name = std::move(name);
    m.input_nodes = std::move(input_nodes);
    m.output_nodes = std::move(output_nodes);
    m.payload = HolderPayload{};
    return g.add_module(std::move(m));
}

ModuleId compose_sequential(Graph& g, const std::vector<ModuleId>& stages,
                            std::string name) {
    if (stages.empty()) throw ConstructionError("compose_sequential: empty module list");
    for (std::size_t i = 1; i < stages.size(); ++i) {
        try {
            connect_modules(g, stages[i - 1], stages[i]);
        } catch (const ConnectionError& e) {
            throw ConnectionError("stage " + std::to_string(i) + ": " + e.what());
        }
    }
    return as_graph_holder(g, g.module(stages.front()).input_nodes,
                           g.module(stages.back()).output_nodes, std::move(name));
}

ModuleId compose_residual(Graph& g, ModuleId body, std::string name) {
    const auto ins = g.resolved_inputs(body);
    const auto outs = g.resolved_outputs(body);
    if (ins.size() != outs.size())
        throw ConstructionError("compose_residual: body arity mismatch (" +
                                std::to_string(ins.size()) + " inputs vs " +
                                std::to_string(outs.size()) + " outputs)");
    ModuleId holder = as_graph_holder(g, g.module(body).input_nodes,
                                      g.module(body).output_nodes, std::move(name));
    HolderPayload payload;
    for (std::size_t i = 0; i < ins.size(); ++i) payload.skip_pairs.emplace_back(ins[i], outs[i]);
    g.modules_[holder].payload = std::move(payload);
    return holder;
}

std::vector<TraversalEntry> traverse(const Graph& g, ModuleId root) {
    const Graph::Component comp = g.component(root);

    // Unique dependency edges p -> m via m's input nodes.
    std::unordered_map<ModuleId, std::set<ModuleId>> succ;
    std::unordered_map<ModuleId, int> indegree;
    for (ModuleId m : comp.modules) indegree[m] = 0;
    for (ModuleId m : comp.modules)
        for (NodeId n : g.resolved_inputs(m))
            for (ModuleId p : g.node(n).source_modules)
                if (comp.contains_module(p) && succ[p].insert(m).second) ++indegree[m];

    std::priority_queue<ModuleId, std::vector<ModuleId>, std::greater<>> ready;
    std::unordered_map<ModuleId, int> depth;
    for (ModuleId m : comp.modules)
        if (indegree[m] == 0) {
            ready.push(m);
            depth[m] = 0;
        }

    std::vector<TraversalEntry> order;
    while (!ready.empty()) {
        ModuleId m = ready.top();
        ready.pop();
        order.push_back({m, depth[m]});
        for (ModuleId s : succ[m]) {
            auto it = depth.find(s);
            int d = depth[m] + 1;
            if (it == depth.end() || it->second < d) depth[s] = d;
            if (--indegree[s] == 0) ready.push(s);
        }
    }

    if (order.size() != comp.modules.size()) {
        std::ostringstream msg;
        msg << "cycle among modules:";
        for (ModuleId m : comp.modules)
            if (indegree[m] > 0) msg << " " << g.module(m).name;
        throw CycleError(msg.str());
    }
    return order;
}

}  // namespace xylokit
