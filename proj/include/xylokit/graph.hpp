#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "xylokit/errors.hpp"

namespace xylokit {

using ModuleId = std::int32_t;
using NodeId = std::int32_t;

enum class ModuleKind { LinearWeights, LIFNeurons, Holder };

const char* to_string(ModuleKind kind);

/// Per-neuron LIF parameters. tau_syn holds one vector per synapse channel;
/// the second vector may be left empty for single-channel layers. w_rec, when
/// present, has shape N x (N * channels) with columns blocked by channel:
/// column s*N + i is the weight into channel s of neuron i.
struct LifParams {
    Eigen::VectorXd tau_mem;
    std::array<Eigen::VectorXd, 2> tau_syn;
    Eigen::VectorXd threshold;
    Eigen::VectorXd bias;
    std::optional<Eigen::MatrixXd> w_rec;
};

struct LinearPayload {
    Eigen::MatrixXd weights;  // rows = input nodes, cols = output nodes
};

struct LifPayload {
    LifParams params;
    int neurons = 0;
    int channels = 1;
};

struct HolderPayload {
    // (input node, output node) pairs recorded by compose_residual. The
    // mapper lowers each pair to a hardware alias.
    std::vector<std::pair<NodeId, NodeId>> skip_pairs;
};

/// Connectivity tissue between modules. Nodes are merged (never copied) when
/// modules are connected; a merged node forwards to its canonical node via
/// `parent`, so stored NodeIds stay valid across connections.
struct GraphNode {
    NodeId id = -1;
    NodeId parent = -1;  // union-find parent; == id when canonical
    std::vector<ModuleId> source_modules;
    std::vector<ModuleId> sink_modules;
};

struct GraphModule {
    ModuleId id = -1;
    ModuleKind kind = ModuleKind::Holder;
    std::string name;
    std::vector<NodeId> input_nodes;   // as created; resolve through Graph
    std::vector<NodeId> output_nodes;
    std::variant<LinearPayload, LifPayload, HolderPayload> payload;

    const LinearPayload& linear() const { return std::get<LinearPayload>(payload); }
    const LifPayload& lif() const { return std::get<LifPayload>(payload); }
    const HolderPayload& holder() const { return std::get<HolderPayload>(payload); }
};

struct TraversalEntry {
    ModuleId module;
    int depth;
};

/// Arena owning every module and node of one network graph.
///
/// Construction is the only mutation phase; after finalize() the graph is an
/// immutable value that can be shared freely between threads. Module ids are
/// creation-ordered, which is what makes traversal deterministic.
class Graph {
public:
    const GraphModule& module(ModuleId m) const;
    std::size_t module_count() const { return modules_.size(); }

    /// Resolves node merges; the canonical id is the one carrying the
    /// source/sink lists.
    NodeId canonical(NodeId n) const;
    const GraphNode& node(NodeId n) const;  // node(canonical(n))

    std::vector<NodeId> resolved_inputs(ModuleId m) const;
    std::vector<NodeId> resolved_outputs(ModuleId m) const;

    bool finalized() const { return finalized_; }
    void finalize() { finalized_ = true; }

    /// Full-graph referential-integrity audit; throws InternalError on any
    /// node<->module inconsistency.
    void audit() const;

    /// Non-holder modules and canonical nodes weakly connected to `root`
    /// (for a holder, to its boundary nodes). Both lists ascending by id.
    struct Component {
        std::vector<ModuleId> modules;
        std::vector<NodeId> nodes;
        bool contains_module(ModuleId m) const;
        bool contains_node(NodeId n) const;
    };
    Component component(ModuleId root) const;

    /// Holder modules whose (resolved) boundary lies inside `c`.
    std::vector<ModuleId> holders_in(const Component& c) const;

private:
    std::vector<GraphModule> modules_;
    std::vector<GraphNode> nodes_;
    bool finalized_ = false;

    NodeId new_node();
    ModuleId add_module(GraphModule m);
    void require_mutable(const char* op) const;
    void merge_nodes(NodeId into, NodeId from);

    friend ModuleId make_linear(Graph&, const Eigen::MatrixXd&, std::string);
    friend ModuleId make_lif(Graph&, const LifParams&, int, int, std::string);
    friend void connect_modules(Graph&, ModuleId, ModuleId);
    friend ModuleId as_graph_holder(Graph&, std::vector<NodeId>, std::vector<NodeId>,
                                    std::string);
    friend ModuleId compose_residual(Graph&, ModuleId, std::string);
};

/// Creates a LinearWeights module with fresh input/output nodes matching the
/// matrix shape (rows in, cols out). Throws ConstructionError on an empty or
/// non-finite matrix.
ModuleId make_linear(Graph& g, const Eigen::MatrixXd& weights, std::string name = {});

/// Creates a LIFNeurons module with n*synapse_channels input nodes and n
/// output nodes. Input nodes are channel-blocked: node s*n + i feeds channel
/// s of neuron i. Throws ConstructionError on bad parameters.
ModuleId make_lif(Graph& g, const LifParams& params, int n, int synapse_channels,
                  std::string name = {});

/// Merges src's output nodes pairwise into dst's input nodes. Throws
/// ConnectionError (naming both modules and arities) on a mismatch.
void connect_modules(Graph& g, ModuleId src, ModuleId dst);

/// Encapsulates the subgraph between the given boundary nodes. Throws
/// EncapsulationError if some output node is unreachable from the inputs.
ModuleId as_graph_holder(Graph& g, std::vector<NodeId> input_nodes,
                         std::vector<NodeId> output_nodes, std::string name = {});

/// connect_modules applied pairwise in order, wrapped in a holder. A
/// ConnectionError at stage i (the connection into stages[i]) is rethrown
/// with "stage i" prepended.
ModuleId compose_sequential(Graph& g, const std::vector<ModuleId>& stages,
                            std::string name = {});

/// Wraps body in a holder recording the skip pairing input i <-> output i.
/// The skip path is lowered to hardware aliases by the mapper. Throws
/// ConstructionError if body input and output arities differ.
ModuleId compose_residual(Graph& g, ModuleId body, std::string name = {});

/// Deterministic topological order over the non-holder modules weakly
/// connected to `root`, ties broken by ascending creation id. Depth is the
/// longest-path distance from the entry modules. Recurrent LIF payloads are
/// not edges; a cycle between distinct modules throws CycleError listing the
/// members.
std::vector<TraversalEntry> traverse(const Graph& g, ModuleId root);

}  // namespace xylokit
