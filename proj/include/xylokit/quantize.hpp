#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "xylokit/mapper.hpp"

namespace xylokit {

using MatrixXi32 = Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXi32 = Eigen::Matrix<std::int32_t, Eigen::Dynamic, 1>;

/// Scale factors applied during quantization, kept so integer recordings can
/// be unscaled back into float units. `hidden`/`output` hold one entry for
/// the global method and one entry per neuron for the channel method.
struct QuantizationScales {
    std::string method;  // "global" | "channel"
    std::vector<double> hidden;
    std::vector<double> output;

    double hidden_scale(int neuron) const {
        return hidden.size() == 1 ? hidden[0] : hidden.at(neuron);
    }
    double output_scale(int neuron) const {
        return output.size() == 1 ? output[0] : output.at(neuron);
    }
};

/// Integer network parameters in the chip's bit depths: weights in
/// [-127, 127], thresholds in [1, 32767], biases in 16-bit, bit-shift decay
/// parameters in [0, 15].
struct QuantizedSpecification {
    double dt = 0.0;
    int input_channels = 0;
    int hidden = 0;
    int outputs = 0;
    int synapse_channels = 1;

    std::array<MatrixXi32, 2> w_in;   // input_channels x hidden
    std::array<MatrixXi32, 2> w_rec;  // hidden x hidden
    MatrixXi32 w_out;                 // hidden x outputs

    VectorXi32 threshold_hid, bias_hid;
    VectorXi32 threshold_out, bias_out;
    VectorXi32 dash_mem_hid;
    std::array<VectorXi32, 2> dash_syn_hid;
    VectorXi32 dash_mem_out, dash_syn_out;

    std::vector<int> aliases;  // length hidden; -1 = none
    QuantizationScales scales;
};

struct QuantizeResult {
    QuantizedSpecification spec;
    // In-band diagnostics, e.g. a scaled threshold that had to be clamped.
    std::vector<std::string> warnings;
};

/// Bit-shift decay parameter for a time constant: round(log2(tau/dt))
/// clamped to [0, 15]. Throws DomainError on non-positive inputs.
int tau_to_dash(double tau, double dt);

/// Symmetric rounding used for every quantized value.
std::int64_t round_half_away(double x);

/// One scale for input+recurrent weights, one for output weights; thresholds
/// and biases follow their group's scale.
QuantizeResult quantize_global(const FloatSpecification& spec);

/// One scale per target neuron over all of its incoming weights (both
/// synapse channels, input and recurrent); output neurons use their w_out
/// column.
QuantizeResult quantize_channel(const FloatSpecification& spec);

/// Canonical JSON codec.
std::string serialize_qspec(const QuantizedSpecification& spec);
QuantizedSpecification parse_qspec(const std::string& text);

}  // namespace xylokit
