#pragma once

#include "xylokit/hwconfig.hpp"
#include "xylokit/raster.hpp"
#include "xylokit/recording.hpp"

namespace xylokit {

/// One bit-shift decay step: v - sign(v) * max(|v| >> dash, 1 for v != 0).
/// The floor of 1 is the linear-decay regime that lets small states reach
/// zero; the result never crosses zero. v must be a 16-bit state, dash in
/// [0, 15].
int bitshift_decay(int v, int dash);

/// Mutable simulation state for one evolution run.
struct SimState {
    VectorXi32 v_mem_hid;
    std::array<VectorXi32, 2> i_syn_hid;
    VectorXi32 v_mem_out;
    VectorXi32 i_syn_out;
    VectorXi32 routed_prev;  // post-alias hidden spikes from the previous step
};

SimState initial_state(const HardwareConfig& config);

struct StepOutput {
    VectorXi32 hidden_spikes;  // post-alias routed counts, 0..31
    VectorXi32 output_spikes;  // 0..1
};

/// Advances one timestep. Per hidden neuron and synapse channel, in order:
/// decay i_syn, integrate input and recurrent events, saturate; decay v_mem,
/// integrate synaptic currents and bias, saturate; fire
/// min(31, floor(v/threshold)) spikes with subtractive reset; route alias
/// sources into their targets (clamped at 31). Output neurons integrate the
/// routed counts through w_out the same way, clamped to one spike.
/// Recurrent input uses the previous step's routed counts.
StepOutput step(const HardwareConfig& config, SimState& state,
                const Eigen::VectorXi& input_counts);

/// Runs the raster from the configured initial state (zero unless the config
/// carries one). With record=false only output spikes are retained. Throws
/// UnsealedConfigError for unsealed configs, ShapeError on a channel-count
/// mismatch and DomainError if the raster violates the input clamp.
SimulationRecording evolve(const HardwareConfig& config, const InputRaster& raster,
                           bool record = true);

}  // namespace xylokit
