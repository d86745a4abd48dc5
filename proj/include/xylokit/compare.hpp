#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <vector>

#include "xylokit/quantize.hpp"
#include "xylokit/recording.hpp"

namespace xylokit {

/// Divergence metrics between two recordings of identical shape.
/// Spike-count differences are a minus b per neuron; the relative totals are
/// |sum(a) - sum(b)| / max(1, sum(a), sum(b)).
struct ComparisonReport {
    bool exact_match = false;
    std::optional<int> first_divergence_step;

    double max_abs_diff_v_mem_hid = 0.0;
    double max_abs_diff_i_syn_hid = 0.0;
    double max_abs_diff_v_mem_out = 0.0;
    double max_abs_diff_i_syn_out = 0.0;

    std::vector<long> hidden_spike_count_diff;
    std::vector<long> output_spike_count_diff;
    double relative_spike_diff_hidden = 0.0;
    double relative_spike_diff_output = 0.0;
};

/// Element-wise comparison; throws ShapeError unless the recordings have
/// identical shape (steps, neurons, channels and fullness).
ComparisonReport compare_recordings(const FloatRecording& a, const FloatRecording& b);
ComparisonReport compare_recordings(const SimulationRecording& a,
                                    const SimulationRecording& b);

/// Divides the integer traces by the recorded quantization scales so they
/// share units with the float reference. Spike counts are left untouched.
FloatRecording unscale_recording(const SimulationRecording& rec,
                                 const QuantizationScales& scales);

nlohmann::json report_to_json(const ComparisonReport& report);

}  // namespace xylokit
