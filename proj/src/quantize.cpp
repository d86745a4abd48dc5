#include "xylokit/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json_util.hpp"

namespace xylokit {

namespace {

constexpr int kWeightMax = 127;
constexpr int kThresholdMax = 32767;
constexpr int kBiasMin = -32768;
constexpr int kBiasMax = 32767;

void check_shapes(const FloatSpecification& s) {
    const auto bad = [](const std::string& what) {
        throw ShapeError("quantize: inconsistent specification: " + what);
    };
    if (s.dt <= 0.0) throw DomainError("quantize: dt must be positive");
    if (s.w_in[0].rows() != s.input_channels || s.w_in[0].cols() != s.hidden ||
        s.w_in[1].rows() != s.input_channels || s.w_in[1].cols() != s.hidden)
        bad("w_in shape");
    if (s.w_rec[0].rows() != s.hidden || s.w_rec[0].cols() != s.hidden ||
        s.w_rec[1].rows() != s.hidden || s.w_rec[1].cols() != s.hidden)
        bad("w_rec shape");
    if (s.w_out.rows() != s.hidden || s.w_out.cols() != s.outputs) bad("w_out shape");
    if (s.tau_mem_hid.size() != s.hidden || s.tau_syn_hid[0].size() != s.hidden ||
        s.tau_syn_hid[1].size() != s.hidden || s.threshold_hid.size() != s.hidden ||
        s.bias_hid.size() != s.hidden)
        bad("hidden parameter length");
    if (s.tau_mem_out.size() != s.outputs || s.tau_syn_out.size() != s.outputs ||
        s.threshold_out.size() != s.outputs || s.bias_out.size() != s.outputs)
        bad("output parameter length");
    if (static_cast<int>(s.aliases.size()) != s.hidden) bad("aliases length");
}

std::int32_t quantize_weight(double w, double scale) {
    const std::int64_t q = round_half_away(w * scale);
    return static_cast<std::int32_t>(std::clamp<std::int64_t>(q, -kWeightMax, kWeightMax));
}

std::int32_t quantize_threshold(double t, double scale, const std::string& what,
                                std::vector<std::string>& warnings) {
    const double scaled = t * scale;
    if (scaled > static_cast<double>(kThresholdMax)) {
        std::ostringstream msg;
        msg << "ScaleOverflow: " << what << " scales to " << scaled
            << ", clamped to " << kThresholdMax;
        warnings.push_back(msg.str());
    }
    const std::int64_t q = round_half_away(scaled);
    return static_cast<std::int32_t>(std::clamp<std::int64_t>(q, 1, kThresholdMax));
}

std::int32_t quantize_bias(double b, double scale, const std::string& what,
                           std::vector<std::string>& warnings) {
    const double scaled = b * scale;
    if (scaled > static_cast<double>(kBiasMax) || scaled < static_cast<double>(kBiasMin)) {
        std::ostringstream msg;
        msg << "ScaleOverflow: " << what << " scales to " << scaled << ", clamped";
        warnings.push_back(msg.str());
    }
    const std::int64_t q = round_half_away(scaled);
    return static_cast<std::int32_t>(std::clamp<std::int64_t>(q, kBiasMin, kBiasMax));
}

// Copies structure and converts time constants; weights/thresholds/biases
// are filled in by the caller.
QuantizedSpecification skeleton(const FloatSpecification& s) {
    QuantizedSpecification q;
    q.dt = s.dt;
    q.input_channels = s.input_channels;
    q.hidden = s.hidden;
    q.outputs = s.outputs;
    q.synapse_channels = s.synapse_channels;
    q.aliases = s.aliases;

    const int H = s.hidden;
    const int O = s.outputs;
    for (int sl = 0; sl < 2; ++sl) {
        q.w_in[sl].setZero(s.input_channels, H);
        q.w_rec[sl].setZero(H, H);
        q.dash_syn_hid[sl].resize(H);
    }
    q.w_out.setZero(H, O);
    q.threshold_hid.resize(H);
    q.bias_hid.resize(H);
    q.dash_mem_hid.resize(H);
    q.threshold_out.resize(O);
    q.bias_out.resize(O);
    q.dash_mem_out.resize(O);
    q.dash_syn_out.resize(O);

    for (int i = 0; i < H; ++i) {
        q.dash_mem_hid(i) = tau_to_dash(s.tau_mem_hid(i), s.dt);
        q.dash_syn_hid[0](i) = tau_to_dash(s.tau_syn_hid[0](i), s.dt);
        q.dash_syn_hid[1](i) = tau_to_dash(s.tau_syn_hid[1](i), s.dt);
    }
    for (int o = 0; o < O; ++o) {
        q.dash_mem_out(o) = tau_to_dash(s.tau_mem_out(o), s.dt);
        q.dash_syn_out(o) = tau_to_dash(s.tau_syn_out(o), s.dt);
    }
    return q;
}

double max_abs_or_zero(std::initializer_list<const Eigen::MatrixXd*> mats) {
    double m = 0.0;
    for (const Eigen::MatrixXd* mat : mats)
        if (mat->size() > 0) m = std::max(m, mat->cwiseAbs().maxCoeff());
    return m;
}

}  // namespace

std::int64_t round_half_away(double x) { return std::llround(x); }

int tau_to_dash(double tau, double dt) {
    if (!(tau > 0.0)) throw DomainError("tau_to_dash: tau must be positive");
    if (!(dt > 0.0)) throw DomainError("tau_to_dash: dt must be positive");
    const long d = std::lround(std::log2(tau / dt));
    return static_cast<int>(std::clamp(d, 0L, 15L));
}

QuantizeResult quantize_global(const FloatSpecification& s) {
    check_shapes(s);
    QuantizeResult result;
    QuantizedSpecification& q = result.spec;
    q = skeleton(s);

    const double max_hidden =
        max_abs_or_zero({&s.w_in[0], &s.w_in[1], &s.w_rec[0], &s.w_rec[1]});
    const double max_out = max_abs_or_zero({&s.w_out});
    const double s_hidden = max_hidden > 0.0 ? kWeightMax / max_hidden : 1.0;
    const double s_out = max_out > 0.0 ? kWeightMax / max_out : 1.0;
    q.scales.method = "global";
    q.scales.hidden = {s_hidden};
    q.scales.output = {s_out};

    for (int sl = 0; sl < 2; ++sl) {
        for (int c = 0; c < s.input_channels; ++c)
            for (int i = 0; i < s.hidden; ++i)
                q.w_in[sl](c, i) = quantize_weight(s.w_in[sl](c, i), s_hidden);
        for (int j = 0; j < s.hidden; ++j)
            for (int i = 0; i < s.hidden; ++i)
                q.w_rec[sl](j, i) = quantize_weight(s.w_rec[sl](j, i), s_hidden);
    }
    for (int j = 0; j < s.hidden; ++j)
        for (int o = 0; o < s.outputs; ++o)
            q.w_out(j, o) = quantize_weight(s.w_out(j, o), s_out);

    for (int i = 0; i < s.hidden; ++i) {
        q.threshold_hid(i) = quantize_threshold(
            s.threshold_hid(i), s_hidden, "hidden threshold " + std::to_string(i),
            result.warnings);
        q.bias_hid(i) = quantize_bias(s.bias_hid(i), s_hidden,
                                      "hidden bias " + std::to_string(i), result.warnings);
    }
    for (int o = 0; o < s.outputs; ++o) {
        q.threshold_out(o) = quantize_threshold(
            s.threshold_out(o), s_out, "output threshold " + std::to_string(o),
            result.warnings);
        q.bias_out(o) = quantize_bias(s.bias_out(o), s_out,
                                      "output bias " + std::to_string(o), result.warnings);
    }
    return result;
}

QuantizeResult quantize_channel(const FloatSpecification& s) {
    check_shapes(s);
    QuantizeResult result;
    QuantizedSpecification& q = result.spec;
    q = skeleton(s);
    q.scales.method = "channel";
    q.scales.hidden.resize(s.hidden);
    q.scales.output.resize(s.outputs);

    for (int i = 0; i < s.hidden; ++i) {
        double incoming_max = 0.0;
        for (int sl = 0; sl < 2; ++sl) {
            if (s.input_channels > 0)
                incoming_max = std::max(incoming_max, s.w_in[sl].col(i).cwiseAbs().maxCoeff());
            if (s.hidden > 0)
                incoming_max = std::max(incoming_max, s.w_rec[sl].col(i).cwiseAbs().maxCoeff());
        }
        const double scale = incoming_max > 0.0 ? kWeightMax / incoming_max : 1.0;
        q.scales.hidden[i] = scale;
        for (int sl = 0; sl < 2; ++sl) {
            for (int c = 0; c < s.input_channels; ++c)
                q.w_in[sl](c, i) = quantize_weight(s.w_in[sl](c, i), scale);
            for (int j = 0; j < s.hidden; ++j)
                q.w_rec[sl](j, i) = quantize_weight(s.w_rec[sl](j, i), scale);
        }
        q.threshold_hid(i) = quantize_threshold(
            s.threshold_hid(i), scale, "hidden threshold " + std::to_string(i),
            result.warnings);
        q.bias_hid(i) = quantize_bias(s.bias_hid(i), scale,
                                      "hidden bias " + std::to_string(i), result.warnings);
    }

    for (int o = 0; o < s.outputs; ++o) {
        const double incoming_max =
            s.hidden > 0 ? s.w_out.col(o).cwiseAbs().maxCoeff() : 0.0;
        const double scale = incoming_max > 0.0 ? kWeightMax / incoming_max : 1.0;
        q.scales.output[o] = scale;
        for (int j = 0; j < s.hidden; ++j)
            q.w_out(j, o) = quantize_weight(s.w_out(j, o), scale);
        q.threshold_out(o) = quantize_threshold(
            s.threshold_out(o), scale, "output threshold " + std::to_string(o),
            result.warnings);
        q.bias_out(o) = quantize_bias(s.bias_out(o), scale,
                                      "output bias " + std::to_string(o), result.warnings);
    }
    return result;
}

std::string serialize_qspec(const QuantizedSpecification& q) {
    using jsonu::json;
    json j;
    j["format"] = "xylokit-qspec-1";
    j["dt"] = q.dt;
    j["input_channels"] = q.input_channels;
    j["hidden_neurons"] = q.hidden;
    j["output_neurons"] = q.outputs;
    j["synapse_channels"] = q.synapse_channels;
    j["w_in"] = jsonu::slices_to_json(q.w_in);
    j["w_rec"] = jsonu::slices_to_json(q.w_rec);
    j["w_out"] = jsonu::matrix_to_json(q.w_out);
    j["threshold_hid"] = jsonu::vector_to_json(q.threshold_hid);
    j["bias_hid"] = jsonu::vector_to_json(q.bias_hid);
    j["threshold_out"] = jsonu::vector_to_json(q.threshold_out);
    j["bias_out"] = jsonu::vector_to_json(q.bias_out);
    j["dash_mem_hid"] = jsonu::vector_to_json(q.dash_mem_hid);
    j["dash_syn_hid"] = json::array({jsonu::vector_to_json(q.dash_syn_hid[0]),
                                     jsonu::vector_to_json(q.dash_syn_hid[1])});
    j["dash_mem_out"] = jsonu::vector_to_json(q.dash_mem_out);
    j["dash_syn_out"] = jsonu::vector_to_json(q.dash_syn_out);
    j["aliases"] = q.aliases;
    j["scales"] = {{"method", q.scales.method},
                   {"hidden", q.scales.hidden},
                   {"output", q.scales.output}};
    return j.dump(2) + "\n";
}

QuantizedSpecification parse_qspec(const std::string& text) {
    using jsonu::json;
    const json j = jsonu::parse_text(text);
    jsonu::expect_format(j, "xylokit-qspec-1");
    QuantizedSpecification q;
    q.dt = jsonu::get_number<double>(j, "dt");
    if (!(q.dt > 0.0)) throw ParseError("dt must be positive");
    q.input_channels = jsonu::get_int(j, "input_channels");
    q.hidden = jsonu::get_int(j, "hidden_neurons");
    q.outputs = jsonu::get_int(j, "output_neurons");
    q.synapse_channels = jsonu::get_int(j, "synapse_channels");
    q.w_in = jsonu::slices_from_json<std::int32_t>(jsonu::require(j, "w_in"), "w_in");
    q.w_rec = jsonu::slices_from_json<std::int32_t>(jsonu::require(j, "w_rec"), "w_rec");
    q.w_out = jsonu::matrix_from_json<std::int32_t>(jsonu::require(j, "w_out"), "w_out");
    q.threshold_hid = jsonu::vector_from_json<std::int32_t>(
        jsonu::require(j, "threshold_hid"), "threshold_hid");
    q.bias_hid =
        jsonu::vector_from_json<std::int32_t>(jsonu::require(j, "bias_hid"), "bias_hid");
    q.threshold_out = jsonu::vector_from_json<std::int32_t>(
        jsonu::require(j, "threshold_out"), "threshold_out");
    q.bias_out =
        jsonu::vector_from_json<std::int32_t>(jsonu::require(j, "bias_out"), "bias_out");
    q.dash_mem_hid = jsonu::vector_from_json<std::int32_t>(
        jsonu::require(j, "dash_mem_hid"), "dash_mem_hid");
    const json& ds = jsonu::require(j, "dash_syn_hid");
    if (!ds.is_array() || ds.size() != 2)
        throw ParseError("dash_syn_hid: expected two channel arrays");
    q.dash_syn_hid[0] = jsonu::vector_from_json<std::int32_t>(ds[0], "dash_syn_hid[0]");
    q.dash_syn_hid[1] = jsonu::vector_from_json<std::int32_t>(ds[1], "dash_syn_hid[1]");
    q.dash_mem_out = jsonu::vector_from_json<std::int32_t>(
        jsonu::require(j, "dash_mem_out"), "dash_mem_out");
    q.dash_syn_out = jsonu::vector_from_json<std::int32_t>(
        jsonu::require(j, "dash_syn_out"), "dash_syn_out");
    const json& al = jsonu::require(j, "aliases");
    if (!al.is_array()) throw ParseError("aliases: expected an array");
    for (const auto& v : al) {
        if (!v.is_number_integer()) throw ParseError("aliases: non-integer entry");
        q.aliases.push_back(v.get<int>());
    }
    const json& sc = jsonu::require(j, "scales");
    q.scales.method = jsonu::require(sc, "method").get<std::string>();
    if (q.scales.method != "global" && q.scales.method != "channel")
        throw ParseError("scales.method must be 'global' or 'channel'");
    for (const auto& v : jsonu::require(sc, "hidden")) q.scales.hidden.push_back(v.get<double>());
    for (const auto& v : jsonu::require(sc, "output")) q.scales.output.push_back(v.get<double>());

    const auto expect = [](bool ok, const std::string& what) {
        if (!ok) throw ParseError("inconsistent quantized specification: " + what);
    };
    expect(q.w_in[0].rows() == q.input_channels && q.w_in[0].cols() == q.hidden,
           "w_in shape");
    expect(q.w_rec[0].rows() == q.hidden && q.w_rec[0].cols() == q.hidden, "w_rec shape");
    expect(q.w_out.rows() == q.hidden && q.w_out.cols() == q.outputs, "w_out shape");
    expect(q.threshold_hid.size() == q.hidden && q.bias_hid.size() == q.hidden &&
               q.dash_mem_hid.size() == q.hidden && q.dash_syn_hid[0].size() == q.hidden &&
               q.dash_syn_hid[1].size() == q.hidden,
           "hidden parameter length");
    expect(q.threshold_out.size() == q.outputs && q.bias_out.size() == q.outputs &&
               q.dash_mem_out.size() == q.outputs && q.dash_syn_out.size() == q.outputs,
           "output parameter length");
    expect(static_cast<int>(q.aliases.size()) == q.hidden, "aliases length");
    const std::size_t h = static_cast<std::size_t>(q.hidden);
    const std::size_t o = static_cast<std::size_t>(q.outputs);
    expect(q.scales.hidden.size() == 1 || q.scales.hidden.size() == h, "hidden scales length");
    expect(q.scales.output.size() == 1 || q.scales.output.size() == o, "output scales length");
    return q;
}

}  // namespace xylokit
