#include "xylokit/compare.hpp"

#include <algorithm>
#include <cmath>

namespace xylokit {

namespace {

void check_same_shape(const FloatRecording& a, const FloatRecording& b) {
    if (a.full != b.full) throw ShapeError("compare: one recording is spike-only");
    if (a.steps() != b.steps() || a.outputs() != b.outputs())
        throw ShapeError("compare: step/output shape mismatch");
    if (a.full && (a.hidden() != b.hidden() || a.synapse_channels != b.synapse_channels))
        throw ShapeError("compare: hidden shape mismatch");
}

// Max |a-b| over one trace pair, tracking the earliest differing step.
void scan(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double& max_diff,
          std::optional<int>& first_step) {
    for (Eigen::Index t = 0; t < a.rows(); ++t)
        for (Eigen::Index i = 0; i < a.cols(); ++i) {
            const double d = std::abs(a(t, i) - b(t, i));
            if (d > 0.0 && (!first_step || t < *first_step)) first_step = static_cast<int>(t);
            max_diff = std::max(max_diff, d);
        }
}

void scan_spikes(const Eigen::MatrixXi& a, const Eigen::MatrixXi& b,
                 std::optional<int>& first_step) {
    for (Eigen::Index t = 0; t < a.rows(); ++t)
        for (Eigen::Index i = 0; i < a.cols(); ++i)
            if (a(t, i) != b(t, i) && (!first_step || t < *first_step))
                first_step = static_cast<int>(t);
}

std::vector<long> column_totals_diff(const Eigen::MatrixXi& a, const Eigen::MatrixXi& b) {
    std::vector<long> diff(a.cols());
    for (Eigen::Index i = 0; i < a.cols(); ++i)
        diff[i] = a.col(i).cast<long>().sum() - b.col(i).cast<long>().sum();
    return diff;
}

double relative_total_diff(const Eigen::MatrixXi& a, const Eigen::MatrixXi& b) {
    const double ta = a.cast<double>().sum();
    const double tb = b.cast<double>().sum();
    return std::abs(ta - tb) / std::max({1.0, ta, tb});
}

}  // namespace

ComparisonReport compare_recordings(const FloatRecording& a, const FloatRecording& b) {
    check_same_shape(a, b);
    ComparisonReport report;
    std::optional<int>& first = report.first_divergence_step;

    if (a.full) {
        scan(a.v_mem_hid, b.v_mem_hid, report.max_abs_diff_v_mem_hid, first);
        for (int ch = 0; ch < a.synapse_channels; ++ch)
            scan(a.i_syn_hid[ch], b.i_syn_hid[ch], report.max_abs_diff_i_syn_hid, first);
        scan(a.v_mem_out, b.v_mem_out, report.max_abs_diff_v_mem_out, first);
        scan(a.i_syn_out, b.i_syn_out, report.max_abs_diff_i_syn_out, first);
        scan_spikes(a.spikes_hid, b.spikes_hid, first);
        report.hidden_spike_count_diff = column_totals_diff(a.spikes_hid, b.spikes_hid);
        report.relative_spike_diff_hidden = relative_total_diff(a.spikes_hid, b.spikes_hid);
    }
    scan_spikes(a.spikes_out, b.spikes_out, first);
    report.output_spike_count_diff = column_totals_diff(a.spikes_out, b.spikes_out);
    report.relative_spike_diff_output = relative_total_diff(a.spikes_out, b.spikes_out);

    report.exact_match = !first.has_value();
    return report;
}

ComparisonReport compare_recordings(const SimulationRecording& a,
                                    const SimulationRecording& b) {
    return compare_recordings(to_float_recording(a), to_float_recording(b));
}

FloatRecording unscale_recording(const SimulationRecording& rec,
                                 const QuantizationScales& scales) {
    FloatRecording out = to_float_recording(rec);
    if (!rec.full) return out;
    for (Eigen::Index i = 0; i < out.v_mem_hid.cols(); ++i) {
        const double s = scales.hidden_scale(static_cast<int>(i));
        out.v_mem_hid.col(i) /= s;
        out.i_syn_hid[0].col(i) /= s;
        out.i_syn_hid[1].col(i) /= s;
    }
    for (Eigen::Index o = 0; o < out.v_mem_out.cols(); ++o) {
        const double s = scales.output_scale(static_cast<int>(o));
        out.v_mem_out.col(o) /= s;
        out.i_syn_out.col(o) /= s;
    }
    return out;
}

nlohmann::json report_to_json(const ComparisonReport& r) {
    nlohmann::json j;
    j["exact_match"] = r.exact_match;
    if (r.first_divergence_step)
        j["first_divergence_step"] = *r.first_divergence_step;
    else
        j["first_divergence_step"] = nullptr;
    j["max_abs_diff"] = {{"v_mem_hid", r.max_abs_diff_v_mem_hid},
                         {"i_syn_hid", r.max_abs_diff_i_syn_hid},
                         {"v_mem_out", r.max_abs_diff_v_mem_out},
                         {"i_syn_out", r.max_abs_diff_i_syn_out}};
    j["hidden_spike_count_diff"] = r.hidden_spike_count_diff;
    j["output_spike_count_diff"] = r.output_spike_count_diff;
    j["relative_spike_diff_hidden"] = r.relative_spike_diff_hidden;
    j["relative_spike_diff_output"] = r.relative_spike_diff_output;
    return j;
}

}  // namespace xylokit
