#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <array>
#include <string>

#include "xylokit/errors.hpp"

namespace xylokit {

/// Per-timestep state traces, one row per step. The same layout carries the
/// integer golden model (Scalar = int) and the float reference
/// (Scalar = double) so recordings can be compared directly.
///
/// Hidden spike counts are the post-alias routed counts: what the recurrent
/// path and the output stage actually see. When `full` is false only the
/// output spikes are retained.
template <typename Scalar>
struct RecordingT {
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    int synapse_channels = 1;
    bool full = true;

    Mat v_mem_hid;                   // steps x hidden
    std::array<Mat, 2> i_syn_hid;    // steps x hidden per used channel
    Eigen::MatrixXi spikes_hid;      // steps x hidden, 0..31
    Mat v_mem_out;                   // steps x outputs
    Mat i_syn_out;                   // steps x outputs
    Eigen::MatrixXi spikes_out;      // steps x outputs, 0..1

    int steps() const { return static_cast<int>(spikes_out.rows()); }
    int hidden() const {
        return static_cast<int>(full ? v_mem_hid.cols() : spikes_hid.cols());
    }
    int outputs() const { return static_cast<int>(spikes_out.cols()); }
};

using SimulationRecording = RecordingT<int>;
using FloatRecording = RecordingT<double>;

FloatRecording to_float_recording(const SimulationRecording& rec);

/// CSV codec, schema `t,kind,index,channel,v_mem,i_syn,spikes`. Hidden
/// neurons emit one row per synapse channel (v_mem and spikes repeated);
/// spike-only recordings leave the state columns empty. Doubles are written
/// as shortest round-trip decimals, so write/read is lossless and writing is
/// byte-deterministic.
std::string write_recording_csv(const SimulationRecording& rec);
std::string write_recording_csv(const FloatRecording& rec);
SimulationRecording read_recording_csv_int(const std::string& text);
FloatRecording read_recording_csv_float(const std::string& text);

/// JSON summary: total spikes and first spike time (-1 if never) per neuron.
nlohmann::json summarize_recording(const SimulationRecording& rec);
nlohmann::json summarize_recording(const FloatRecording& rec);

}  // namespace xylokit
