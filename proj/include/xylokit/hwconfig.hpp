#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "xylokit/quantize.hpp"
#include "xylokit/raster.hpp"
#include "xylokit/recording.hpp"

namespace xylokit {

/// One validation rule per hardware limit. The first sixteen correspond one
/// to one with the device limit table; BiasRange is derived from the 16-bit
/// membrane state the bias is added into.
enum class Rule {
    InputChannels,
    InputSpikesPerStep,
    HiddenNeurons,
    HiddenSpikesPerStep,
    SynapsesPerHidden,
    AliasTargets,
    OutputNeurons,
    OutputSpikesPerStep,
    SynapsesPerOutput,
    WeightRange,
    SynapticStateRange,
    MembraneStateRange,
    ThresholdRange,
    DashBitDepth,
    DashMax,
    LongestTimeConstant,
    BiasRange,
};

struct RuleInfo {
    Rule id;
    const char* key;       // stable machine-readable id
    const char* row_name;  // human-readable limit name used in messages
    bool device_table;     // part of the published device limit table
};

/// All validation rules, in a fixed order.
const std::array<RuleInfo, 17>& rule_table();
const RuleInfo& rule_info(Rule r);

struct Violation {
    Rule rule;
    std::string observed;
    std::string allowed;
    std::string where;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    bool has(Rule r) const;
    std::string to_string() const;  // one line per violation, names the row
};

/// Register-level network view: everything the integer simulator needs, all
/// integral except dt. The seal is granted only by successful validation and
/// is recomputed (never trusted) when a config is deserialized.
class HardwareConfig {
public:
    double dt = 0.0;
    int input_channels = 0;
    int hidden = 0;
    int outputs = 0;
    int hidden_synapse_channels = 1;
    int output_synapse_channels = 1;

    std::array<MatrixXi32, 2> w_in;
    std::array<MatrixXi32, 2> w_rec;
    MatrixXi32 w_out;

    VectorXi32 threshold_hid, bias_hid;
    VectorXi32 threshold_out, bias_out;
    VectorXi32 dash_mem_hid;
    std::array<VectorXi32, 2> dash_syn_hid;
    VectorXi32 dash_mem_out, dash_syn_out;

    std::vector<std::pair<int, int>> alias_pairs;  // (source, target), source ascending

    // Optional initial state; empty vectors mean all-zero.
    VectorXi32 initial_v_mem_hid;
    std::array<VectorXi32, 2> initial_i_syn_hid;
    VectorXi32 initial_v_mem_out;
    VectorXi32 initial_i_syn_out;

    bool sealed() const { return sealed_; }

private:
    bool sealed_ = false;
    friend bool try_seal(HardwareConfig&);
};

/// Validates and seals; returns whether the config is now sealed.
bool try_seal(HardwareConfig& config);

struct ConfigResult {
    HardwareConfig config;
    bool valid = false;
    std::string message;  // empty when valid, else one line per violation
};

/// Builds the register view of a quantized specification and validates it.
/// Validity is reported in-band; the config is returned either way.
ConfigResult config_from_specification(const QuantizedSpecification& qspec);

/// Every hardware limit checkable on a config, one rule per limit.
ValidationReport validate_config(const HardwareConfig& config);

/// Input-side limit: event counts within [0, 15].
ValidationReport validate_raster(const InputRaster& raster);

/// Recording-side limits: spike-count clamps and 16-bit state ranges.
ValidationReport validate_recording(const SimulationRecording& recording);

/// Canonical JSON codec (.xcfg.json). dt is stored as a decimal string so
/// the file format has no float-formatting drift.
std::string serialize_config(const HardwareConfig& config);
HardwareConfig deserialize_config(const std::string& text);

}  // namespace xylokit
