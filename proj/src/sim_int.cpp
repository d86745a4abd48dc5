#include "xylokit/sim_int.hpp"

#include <algorithm>

namespace xylokit {

namespace {

constexpr int kStateMin = -32768;
constexpr int kStateMax = 32767;
constexpr int kHiddenSpikeMax = 31;

inline std::int32_t sat16(std::int64_t v) {
    return static_cast<std::int32_t>(std::clamp<std::int64_t>(v, kStateMin, kStateMax));
}

}  // namespace

int bitshift_decay(int v, int dash) {
    if (v == 0) return 0;
    const int magnitude = v < 0 ? -v : v;  // |kStateMin| fits in int
    int step = magnitude >> dash;
    if (step == 0) step = 1;  // linear-decay floor
    return v < 0 ? v + step : v - step;
}

SimState initial_state(const HardwareConfig& c) {
    SimState s;
    s.v_mem_hid = c.initial_v_mem_hid.size() ? c.initial_v_mem_hid
                                             : VectorXi32::Zero(c.hidden);
    for (int ch = 0; ch < 2; ++ch)
        s.i_syn_hid[ch] = c.initial_i_syn_hid[ch].size() ? c.initial_i_syn_hid[ch]
                                                         : VectorXi32::Zero(c.hidden);
    s.v_mem_out = c.initial_v_mem_out.size() ? c.initial_v_mem_out
                                             : VectorXi32::Zero(c.outputs);
    s.i_syn_out = c.initial_i_syn_out.size() ? c.initial_i_syn_out
                                             : VectorXi32::Zero(c.outputs);
    s.routed_prev = VectorXi32::Zero(c.hidden);
    return s;
}

StepOutput step(const HardwareConfig& c, SimState& state,
                const Eigen::VectorXi& input_counts) {
    if (!c.sealed()) throw UnsealedConfigError("step: configuration is not sealed");
    if (input_counts.size() != c.input_channels)
        throw ShapeError("step: input has " + std::to_string(input_counts.size()) +
                         " channels, config expects " + std::to_string(c.input_channels));

    const int H = c.hidden;
    const int O = c.outputs;
    const VectorXi32 in = input_counts.cast<std::int32_t>();

    // Synaptic currents: decay, then integrate this step's input events and
    // the previous step's routed hidden spikes. All products stay far below
    // int32 limits (|w| <= 128, counts <= 31, H <= 1000).
    for (int ch = 0; ch < c.hidden_synapse_channels; ++ch) {
        const VectorXi32 decayed = state.i_syn_hid[ch].binaryExpr(
            c.dash_syn_hid[ch],
            [](std::int32_t v, std::int32_t d) { return bitshift_decay(v, d); });
        const VectorXi32 contrib =
            c.w_in[ch].transpose() * in + c.w_rec[ch].transpose() * state.routed_prev;
        for (int i = 0; i < H; ++i)
            state.i_syn_hid[ch](i) =
                sat16(static_cast<std::int64_t>(decayed(i)) + contrib(i));
    }

    // Membrane: decay, integrate synaptic currents and bias, saturate, fire.
    VectorXi32 spikes(H);
    for (int i = 0; i < H; ++i) {
        std::int64_t v = bitshift_decay(state.v_mem_hid(i), c.dash_mem_hid(i));
        for (int ch = 0; ch < c.hidden_synapse_channels; ++ch) v += state.i_syn_hid[ch](i);
        v += c.bias_hid(i);
        std::int32_t vm = sat16(v);
        const std::int32_t th = c.threshold_hid(i);
        std::int32_t n = 0;
        if (vm >= th) {
            n = std::min<std::int32_t>(kHiddenSpikeMax, vm / th);
            vm -= n * th;
        }
        spikes(i) = n;
        state.v_mem_hid(i) = vm;
    }

    // Alias routing: source counts are added into the target's routed count
    // after firing; the source's own count still routes.
    VectorXi32 routed = spikes;
    for (const auto& [source, target] : c.alias_pairs)
        routed(target) = std::min<std::int32_t>(kHiddenSpikeMax,
                                                routed(target) + spikes(source));

    // Output neurons integrate this step's routed counts, one spike max,
    // subtractive reset of one threshold.
    VectorXi32 out_spikes(O);
    const VectorXi32 out_contrib = c.w_out.transpose() * routed;
    for (int o = 0; o < O; ++o) {
        state.i_syn_out(o) = sat16(
            static_cast<std::int64_t>(bitshift_decay(state.i_syn_out(o), c.dash_syn_out(o))) +
            out_contrib(o));
        std::int32_t vm = sat16(
            static_cast<std::int64_t>(bitshift_decay(state.v_mem_out(o), c.dash_mem_out(o))) +
            state.i_syn_out(o) + c.bias_out(o));
        std::int32_t n = 0;
        if (vm >= c.threshold_out(o)) {
            n = 1;
            vm -= c.threshold_out(o);
        }
        out_spikes(o) = n;
        state.v_mem_out(o) = vm;
    }

    state.routed_prev = routed;
    return {std::move(routed), std::move(out_spikes)};
}

SimulationRecording evolve(const HardwareConfig& c, const InputRaster& raster, bool record) {
    if (!c.sealed()) throw UnsealedConfigError("evolve: configuration is not sealed");
    if (raster.channels() != c.input_channels)
        throw ShapeError("evolve: raster has " + std::to_string(raster.channels()) +
                         " channels, config expects " + std::to_string(c.input_channels));
    const ValidationReport raster_report = validate_raster(raster);
    if (!raster_report.ok())
        throw DomainError("evolve: invalid raster:\n" + raster_report.to_string());

    const int steps = raster.steps();
    SimulationRecording rec;
    rec.synapse_channels = c.hidden_synapse_channels;
    rec.full = record;
    if (record) {
        rec.v_mem_hid.setZero(steps, c.hidden);
        rec.i_syn_hid[0].setZero(steps, c.hidden);
        rec.i_syn_hid[1].setZero(steps, c.hidden);
        rec.spikes_hid.setZero(steps, c.hidden);
        rec.v_mem_out.setZero(steps, c.outputs);
        rec.i_syn_out.setZero(steps, c.outputs);
    }
    rec.spikes_out.setZero(steps, c.outputs);

    SimState state = initial_state(c);
    for (int t = 0; t < steps; ++t) {
        const StepOutput out = step(c, state, raster.counts.row(t).transpose());
        if (record) {
            rec.v_mem_hid.row(t) = state.v_mem_hid.transpose();
            for (int ch = 0; ch < c.hidden_synapse_channels; ++ch)
                rec.i_syn_hid[ch].row(t) = state.i_syn_hid[ch].transpose();
            rec.spikes_hid.row(t) = out.hidden_spikes.transpose();
            rec.v_mem_out.row(t) = state.v_mem_out.transpose();
            rec.i_syn_out.row(t) = state.i_syn_out.transpose();
        }
        rec.spikes_out.row(t) = out.output_spikes.transpose();
    }
    return rec;
}

}  // namespace xylokit
