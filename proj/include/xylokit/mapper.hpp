#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

#include "xylokit/graph.hpp"

namespace xylokit {

/// Mapped, pre-quantization network: dense weight tensors plus per-neuron
/// parameters, laid out against the hardware's single global hidden weight
/// matrix. Weight tensors always carry two synapse-channel slices; slice 1 is
/// all-zero when synapse_channels == 1 so every consumer sees one layout.
struct FloatSpecification {
    double dt = 0.0;
    int input_channels = 0;    // <= 16
    int hidden = 0;            // <= 1000
    int outputs = 0;           // <= 8
    int synapse_channels = 1;  // 1 or 2

    std::array<Eigen::MatrixXd, 2> w_in;   // each input_channels x hidden
    std::array<Eigen::MatrixXd, 2> w_rec;  // each hidden x hidden
    Eigen::MatrixXd w_out;                 // hidden x outputs

    Eigen::VectorXd tau_mem_hid;
    std::array<Eigen::VectorXd, 2> tau_syn_hid;
    Eigen::VectorXd threshold_hid;
    Eigen::VectorXd bias_hid;

    Eigen::VectorXd tau_mem_out;
    Eigen::VectorXd tau_syn_out;
    Eigen::VectorXd threshold_out;
    Eigen::VectorXd bias_out;

    std::vector<int> aliases;  // length hidden; -1 = none, else target index
};

struct DesignRuleViolation {
    std::string rule;     // R1..R6
    std::string message;
    std::string where;    // offending module / neuron
};

struct DesignRuleReport {
    std::vector<DesignRuleViolation> violations;
    bool ok() const { return violations.empty(); }
    std::string to_string() const;
};

/// Checks that the finalized graph can be lowered: alternation of
/// LinearWeights/LIFNeurons along every path (R1), input width (R2), hidden
/// and output neuron budgets (R3, R4), synapse-channel limits (R5) and skip
/// pair / alias legality (R6). All problems are report entries; nothing
/// throws.
DesignRuleReport check_design_rules(const Graph& g, ModuleId root);

/// Lowers a rule-clean graph to a FloatSpecification: hidden neurons are
/// numbered in traversal order, inter-layer linears become blocks of the
/// global hidden matrix, per-layer recurrences fill the diagonal blocks, the
/// entry linear becomes w_in, the final linear w_out, and residual skip
/// pairs become aliases. Throws MappingError if the rule report is
/// non-empty or a hardware budget is exceeded.
FloatSpecification map_graph(const Graph& g, ModuleId root, double dt);

/// Canonical JSON codec (stable key order, shortest round-trip numbers).
std::string serialize_spec(const FloatSpecification& spec);
FloatSpecification parse_spec(const std::string& text);

}  // namespace xylokit
