#include "xylokit/hwconfig.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <map>
#include <sstream>

#include "json_util.hpp"

namespace xylokit {

namespace {

constexpr int kStateMin = -32768;
constexpr int kStateMax = 32767;
constexpr int kWeightMin = -128;  // hand-written configs may use the full 8-bit range
constexpr int kWeightMax = 127;

const std::array<RuleInfo, 17> kRules = {{
    {Rule::InputChannels, "input_channels", "Max. input channels", true},
    {Rule::InputSpikesPerStep, "input_spikes_per_step", "Max. input spikes per time step",
     true},
    {Rule::HiddenNeurons, "hidden_neurons", "Max. hidden LIF neurons", true},
    {Rule::HiddenSpikesPerStep, "hidden_spikes_per_step",
     "Max. hidden neuron spikes per time step", true},
    {Rule::SynapsesPerHidden, "synapses_per_hidden", "Max. input synapses per hidden neuron",
     true},
    {Rule::AliasTargets, "alias_targets", "Max. alias targets (hidden neurons only)", true},
    {Rule::OutputNeurons, "output_neurons", "Max. output LIF neurons", true},
    {Rule::OutputSpikesPerStep, "output_spikes_per_step",
     "Max. output neuron spikes per time step", true},
    {Rule::SynapsesPerOutput, "synapses_per_output", "Max. input synapses per output neuron",
     true},
    {Rule::WeightRange, "weight_range", "Weight bit-depth", true},
    {Rule::SynapticStateRange, "synaptic_state_range", "Synaptic state bit-depth", true},
    {Rule::MembraneStateRange, "membrane_state_range", "Membrane state bit-depth", true},
    {Rule::ThresholdRange, "threshold_range", "Threshold bit-depth", true},
    {Rule::DashBitDepth, "dash_bit_depth", "Bit-shift decay parameter bit-depth", true},
    {Rule::DashMax, "dash_max", "Max. bit-shift decay value", true},
    {Rule::LongestTimeConstant, "longest_time_constant", "Longest effective time-constant",
     true},
    {Rule::BiasRange, "bias_range", "Bias value range", false},
}};

void add(ValidationReport& r, Rule rule, std::string observed, std::string allowed,
         std::string where) {
    r.violations.push_back({rule, std::move(observed), std::move(allowed), std::move(where)});
}

void check_shapes(const HardwareConfig& c) {
    const auto bad = [](const std::string& what) {
        throw ShapeError("hardware config: inconsistent shape: " + what);
    };
    const int C = c.input_channels, H = c.hidden, O = c.outputs;
    if (C < 0 || H < 0 || O < 0) bad("negative dimension");
    for (int s = 0; s < 2; ++s) {
        if (c.w_in[s].rows() != C || c.w_in[s].cols() != H) bad("w_in");
        if (c.w_rec[s].rows() != H || c.w_rec[s].cols() != H) bad("w_rec");
        if (c.dash_syn_hid[s].size() != H) bad("dash_syn_hid");
    }
    if (c.w_out.rows() != H || c.w_out.cols() != O) bad("w_out");
    if (c.threshold_hid.size() != H || c.bias_hid.size() != H || c.dash_mem_hid.size() != H)
        bad("hidden parameters");
    if (c.threshold_out.size() != O || c.bias_out.size() != O ||
        c.dash_mem_out.size() != O || c.dash_syn_out.size() != O)
        bad("output parameters");
    if (c.initial_v_mem_hid.size() != 0 && c.initial_v_mem_hid.size() != H)
        bad("initial_v_mem_hid");
    for (int s = 0; s < 2; ++s)
        if (c.initial_i_syn_hid[s].size() != 0 && c.initial_i_syn_hid[s].size() != H)
            bad("initial_i_syn_hid");
    if (c.initial_v_mem_out.size() != 0 && c.initial_v_mem_out.size() != O)
        bad("initial_v_mem_out");
    if (c.initial_i_syn_out.size() != 0 && c.initial_i_syn_out.size() != O)
        bad("initial_i_syn_out");
}

void check_weights(ValidationReport& report, const MatrixXi32& w, const std::string& name) {
    for (Eigen::Index r = 0; r < w.rows(); ++r)
        for (Eigen::Index c = 0; c < w.cols(); ++c)
            if (w(r, c) < kWeightMin || w(r, c) > kWeightMax)
                add(report, Rule::WeightRange, std::to_string(w(r, c)),
                    "[-128, 127]", name + "(" + std::to_string(r) + "," +
                                       std::to_string(c) + ")");
}

void check_dash(ValidationReport& report, const VectorXi32& dash, double dt,
                const std::string& name) {
    for (Eigen::Index i = 0; i < dash.size(); ++i) {
        const int d = dash(i);
        const std::string where = name + "[" + std::to_string(i) + "]";
        if (d < 0 || d > 15)
            add(report, Rule::DashBitDepth, std::to_string(d), "[0, 15]", where);
        if (d > 15) {
            add(report, Rule::DashMax, std::to_string(d), "15", where);
            std::ostringstream observed;
            observed << "2^" << d << " * dt (dt = " << dt << ")";
            add(report, Rule::LongestTimeConstant, observed.str(), "32768 * dt", where);
        }
    }
}

void check_state_vector(ValidationReport& report, Rule rule, const VectorXi32& v,
                        const std::string& name) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (v(i) < kStateMin || v(i) > kStateMax)
            add(report, rule, std::to_string(v(i)), "[-32768, 32767]",
                name + "[" + std::to_string(i) + "]");
}

}  // namespace

const std::array<RuleInfo, 17>& rule_table() { return kRules; }

const RuleInfo& rule_info(Rule r) {
    for (const RuleInfo& info : kRules)
        if (info.id == r) return info;
    throw InternalError("unknown rule");
}

bool ValidationReport::has(Rule r) const {
    return std::any_of(violations.begin(), violations.end(),
                       [r](const Violation& v) { return v.rule == r; });
}

std::string ValidationReport::to_string() const {
    std::ostringstream out;
    for (const Violation& v : violations) {
        const RuleInfo& info = rule_info(v.rule);
        out << info.key << ": " << info.row_name << ": observed " << v.observed
            << ", allowed " << v.allowed;
        if (!v.where.empty()) out << " (" << v.where << ")";
        out << "\n";
    }
    return out.str();
}

ValidationReport validate_config(const HardwareConfig& c) {
    check_shapes(c);
    ValidationReport report;

    if (c.input_channels > 16)
        add(report, Rule::InputChannels, std::to_string(c.input_channels), "16", "");
    if (c.hidden > 1000)
        add(report, Rule::HiddenNeurons, std::to_string(c.hidden), "1000", "");
    if (c.outputs > 8)
        add(report, Rule::OutputNeurons, std::to_string(c.outputs), "8", "");
    if (c.hidden_synapse_channels < 1 || c.hidden_synapse_channels > 2)
        add(report, Rule::SynapsesPerHidden, std::to_string(c.hidden_synapse_channels), "2",
            "");
    if (c.output_synapse_channels != 1)
        add(report, Rule::SynapsesPerOutput, std::to_string(c.output_synapse_channels), "1",
            "");

    check_weights(report, c.w_in[0], "w_in[0]");
    check_weights(report, c.w_in[1], "w_in[1]");
    check_weights(report, c.w_rec[0], "w_rec[0]");
    check_weights(report, c.w_rec[1], "w_rec[1]");
    check_weights(report, c.w_out, "w_out");

    for (Eigen::Index i = 0; i < c.threshold_hid.size(); ++i)
        if (c.threshold_hid(i) < 1 || c.threshold_hid(i) > kStateMax)
            add(report, Rule::ThresholdRange, std::to_string(c.threshold_hid(i)),
                "[1, 32767]", "hidden neuron " + std::to_string(i));
    for (Eigen::Index o = 0; o < c.threshold_out.size(); ++o)
        if (c.threshold_out(o) < 1 || c.threshold_out(o) > kStateMax)
            add(report, Rule::ThresholdRange, std::to_string(c.threshold_out(o)),
                "[1, 32767]", "output neuron " + std::to_string(o));

    for (Eigen::Index i = 0; i < c.bias_hid.size(); ++i)
        if (c.bias_hid(i) < kStateMin || c.bias_hid(i) > kStateMax)
            add(report, Rule::BiasRange, std::to_string(c.bias_hid(i)), "[-32768, 32767]",
                "hidden neuron " + std::to_string(i));
    for (Eigen::Index o = 0; o < c.bias_out.size(); ++o)
        if (c.bias_out(o) < kStateMin || c.bias_out(o) > kStateMax)
            add(report, Rule::BiasRange, std::to_string(c.bias_out(o)), "[-32768, 32767]",
                "output neuron " + std::to_string(o));

    check_dash(report, c.dash_mem_hid, c.dt, "dash_mem_hid");
    check_dash(report, c.dash_syn_hid[0], c.dt, "dash_syn_hid[0]");
    check_dash(report, c.dash_syn_hid[1], c.dt, "dash_syn_hid[1]");
    check_dash(report, c.dash_mem_out, c.dt, "dash_mem_out");
    check_dash(report, c.dash_syn_out, c.dt, "dash_syn_out");

    std::map<int, int> aliases_per_source;
    for (const auto& [source, target] : c.alias_pairs) {
        const std::string where =
            "alias " + std::to_string(source) + " -> " + std::to_string(target);
        if (source < 0 || source >= c.hidden)
            add(report, Rule::AliasTargets, "source " + std::to_string(source),
                "hidden neuron in [0, " + std::to_string(c.hidden) + ")", where);
        if (target < 0 || target >= c.hidden)
            add(report, Rule::AliasTargets, "target " + std::to_string(target),
                "hidden neuron in [0, " + std::to_string(c.hidden) + ")", where);
        if (++aliases_per_source[source] == 2)
            add(report, Rule::AliasTargets,
                "multiple aliases on neuron " + std::to_string(source), "1", where);
    }

    check_state_vector(report, Rule::MembraneStateRange, c.initial_v_mem_hid,
                       "initial_v_mem_hid");
    check_state_vector(report, Rule::MembraneStateRange, c.initial_v_mem_out,
                       "initial_v_mem_out");
    check_state_vector(report, Rule::SynapticStateRange, c.initial_i_syn_hid[0],
                       "initial_i_syn_hid[0]");
    check_state_vector(report, Rule::SynapticStateRange, c.initial_i_syn_hid[1],
                       "initial_i_syn_hid[1]");
    check_state_vector(report, Rule::SynapticStateRange, c.initial_i_syn_out,
                       "initial_i_syn_out");

    return report;
}

ValidationReport validate_raster(const InputRaster& raster) {
    ValidationReport report;
    for (int t = 0; t < raster.steps(); ++t)
        for (int c = 0; c < raster.channels(); ++c) {
            const int v = raster.counts(t, c);
            if (v < 0 || v > 15)
                add(report, Rule::InputSpikesPerStep, std::to_string(v), "[0, 15]",
                    "step " + std::to_string(t) + ", channel " + std::to_string(c));
        }
    return report;
}

ValidationReport validate_recording(const SimulationRecording& rec) {
    ValidationReport report;
    for (int t = 0; t < rec.steps(); ++t) {
        if (rec.full) {
            for (int i = 0; i < rec.hidden(); ++i) {
                const std::string where =
                    "step " + std::to_string(t) + ", hidden neuron " + std::to_string(i);
                if (rec.spikes_hid(t, i) < 0 || rec.spikes_hid(t, i) > 31)
                    add(report, Rule::HiddenSpikesPerStep,
                        std::to_string(rec.spikes_hid(t, i)), "[0, 31]", where);
                if (rec.v_mem_hid(t, i) < kStateMin || rec.v_mem_hid(t, i) > kStateMax)
                    add(report, Rule::MembraneStateRange,
                        std::to_string(rec.v_mem_hid(t, i)), "[-32768, 32767]", where);
                for (int s = 0; s < rec.synapse_channels; ++s)
                    if (rec.i_syn_hid[s](t, i) < kStateMin ||
                        rec.i_syn_hid[s](t, i) > kStateMax)
                        add(report, Rule::SynapticStateRange,
                            std::to_string(rec.i_syn_hid[s](t, i)), "[-32768, 32767]",
                            where);
            }
        }
        for (int o = 0; o < rec.outputs(); ++o) {
            const std::string where =
                "step " + std::to_string(t) + ", output neuron " + std::to_string(o);
            if (rec.spikes_out(t, o) < 0 || rec.spikes_out(t, o) > 1)
                add(report, Rule::OutputSpikesPerStep, std::to_string(rec.spikes_out(t, o)),
                    "[0, 1]", where);
            if (rec.full) {
                if (rec.v_mem_out(t, o) < kStateMin || rec.v_mem_out(t, o) > kStateMax)
                    add(report, Rule::MembraneStateRange,
                        std::to_string(rec.v_mem_out(t, o)), "[-32768, 32767]", where);
                if (rec.i_syn_out(t, o) < kStateMin || rec.i_syn_out(t, o) > kStateMax)
                    add(report, Rule::SynapticStateRange,
                        std::to_string(rec.i_syn_out(t, o)), "[-32768, 32767]", where);
            }
        }
    }
    return report;
}

bool try_seal(HardwareConfig& config) {
    config.sealed_ = validate_config(config).ok();
    return config.sealed_;
}

ConfigResult config_from_specification(const QuantizedSpecification& q) {
    ConfigResult result;
    HardwareConfig& c = result.config;
    c.dt = q.dt;
    c.input_channels = q.input_channels;
    c.hidden = q.hidden;
    c.outputs = q.outputs;
    c.hidden_synapse_channels = q.synapse_channels;
    c.output_synapse_channels = 1;
    c.w_in = q.w_in;
    c.w_rec = q.w_rec;
    c.w_out = q.w_out;
    c.threshold_hid = q.threshold_hid;
    c.bias_hid = q.bias_hid;
    c.threshold_out = q.threshold_out;
    c.bias_out = q.bias_out;
    c.dash_mem_hid = q.dash_mem_hid;
    c.dash_syn_hid = q.dash_syn_hid;
    c.dash_mem_out = q.dash_mem_out;
    c.dash_syn_out = q.dash_syn_out;
    for (std::size_t i = 0; i < q.aliases.size(); ++i)
        if (q.aliases[i] >= 0) c.alias_pairs.emplace_back(static_cast<int>(i), q.aliases[i]);
    std::sort(c.alias_pairs.begin(), c.alias_pairs.end());

    const ValidationReport report = validate_config(c);
    result.valid = report.ok();
    result.message = report.to_string();
    if (result.valid) try_seal(c);
    return result;
}

namespace {

std::string dt_to_string(double dt) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), dt);
    return std::string(buf, p);
}

}  // namespace

std::string serialize_config(const HardwareConfig& c) {
    using jsonu::json;
    json j;
    j["format"] = "xylokit-xcfg-1";
    j["dt"] = dt_to_string(c.dt);
    j["input_channels"] = c.input_channels;
    j["hidden_neurons"] = c.hidden;
    j["output_neurons"] = c.outputs;
    j["hidden_synapse_channels"] = c.hidden_synapse_channels;
    j["output_synapse_channels"] = c.output_synapse_channels;
    j["w_in"] = jsonu::slices_to_json(c.w_in);
    j["w_rec"] = jsonu::slices_to_json(c.w_rec);
    j["w_out"] = jsonu::matrix_to_json(c.w_out);
    j["threshold_hid"] = jsonu::vector_to_json(c.threshold_hid);
    j["bias_hid"] = jsonu::vector_to_json(c.bias_hid);
    j["threshold_out"] = jsonu::vector_to_json(c.threshold_out);
    j["bias_out"] = jsonu::vector_to_json(c.bias_out);
    j["dash_mem_hid"] = jsonu::vector_to_json(c.dash_mem_hid);
    j["dash_syn_hid"] = json::array({jsonu::vector_to_json(c.dash_syn_hid[0]),
                                     jsonu::vector_to_json(c.dash_syn_hid[1])});
    j["dash_mem_out"] = jsonu::vector_to_json(c.dash_mem_out);
    j["dash_syn_out"] = jsonu::vector_to_json(c.dash_syn_out);
    json pairs = json::array();
    for (const auto& [s, t] : c.alias_pairs) pairs.push_back(json::array({s, t}));
    j["alias_pairs"] = std::move(pairs);
    j["initial_v_mem_hid"] = jsonu::vector_to_json(c.initial_v_mem_hid);
    j["initial_i_syn_hid"] = json::array({jsonu::vector_to_json(c.initial_i_syn_hid[0]),
                                          jsonu::vector_to_json(c.initial_i_syn_hid[1])});
    j["initial_v_mem_out"] = jsonu::vector_to_json(c.initial_v_mem_out);
    j["initial_i_syn_out"] = jsonu::vector_to_json(c.initial_i_syn_out);
    return j.dump(2) + "\n";
}

HardwareConfig deserialize_config(const std::string& text) {
    using jsonu::json;
    const json j = jsonu::parse_text(text);
    jsonu::expect_format(j, "xylokit-xcfg-1");
    HardwareConfig c;

    const json& dt_field = jsonu::require(j, "dt");
    if (!dt_field.is_string()) throw ParseError("dt must be a decimal string");
    {
        const std::string s = dt_field.get<std::string>();
        char* end = nullptr;
        c.dt = std::strtod(s.c_str(), &end);
        if (s.empty() || end != s.c_str() + s.size())
            throw ParseError("dt: bad decimal string '" + s + "'");
        if (!(c.dt > 0.0)) throw ParseError("dt must be positive");
    }
    c.input_channels = jsonu::get_int(j, "input_channels");
    c.hidden = jsonu::get_int(j, "hidden_neurons");
    c.outputs = jsonu::get_int(j, "output_neurons");
    c.hidden_synapse_channels = jsonu::get_int(j, "hidden_synapse_channels");
    c.output_synapse_channels = jsonu::get_int(j, "output_synapse_channels");
    c.w_in = jsonu::slices_from_json<std::int32_t>(jsonu::require(j, "w_in"), "w_in");
    c.w_rec = jsonu::slices_from_json<std::int32_t>(jsonu::require(j, "w_rec"), "w_rec");
    c.w_out = jsonu::matrix_from_json<std::int32_t>(jsonu::require(j, "w_out"), "w_out");
    c.threshold_hid = jsonu::vector_from_json<std::int32_t>(
        jsonu::require(j, "threshold_hid"), "threshold_hid");
    c.bias_hid =
        jsonu::vector_from_json<std::int32_t>(jsonu::require(j, "bias_hid"), "bias_hid");
    c.threshold_out = jsonu::vector_from_json<std::int32_t>(
        jsonu::require(j, "threshold_out"), "threshold_out");
    c.bias_out =
        jsonu::vector_from_json<std::int32_t>(jsonu::require(j, "bias_out"), "bias_out");
    c.dash_mem_hid = jsonu::vector_from_json<std::int32_t>(
        jsonu::require(j, "dash_mem_hid"), "dash_mem_hid");
    const json& ds = jsonu::require(j, "dash_syn_hid");
    if (!ds.is_array() || ds.size() != 2)
        throw ParseError("dash_syn_hid: expected two channel arrays");
    c.dash_syn_hid[0] = jsonu::vector_from_json<std::int32_t>(ds[0], "dash_syn_hid[0]");
    c.dash_syn_hid[1] = jsonu::vector_from_json<std::int32_t>(ds[1], "dash_syn_hid[1]");
    c.dash_mem_out = jsonu::vector_from_json<std::int32_t>(
        jsonu::require(j, "dash_mem_out"), "dash_mem_out");
    c.dash_syn_out = jsonu::vector_from_json<std::int32_t>(
        jsonu::require(j, "dash_syn_out"), "dash_syn_out");

    const json& pairs = jsonu::require(j, "alias_pairs");
    if (!pairs.is_array()) throw ParseError("alias_pairs: expected an array of [src, tgt]");
    for (const auto& p : pairs) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() ||
            !p[1].is_number_integer())
            throw ParseError("alias_pairs: expected an array of [src, tgt]");
        c.alias_pairs.emplace_back(p[0].get<int>(), p[1].get<int>());
    }
    std::sort(c.alias_pairs.begin(), c.alias_pairs.end());

    if (j.contains("initial_v_mem_hid"))
        c.initial_v_mem_hid = jsonu::vector_from_json<std::int32_t>(j["initial_v_mem_hid"],
                                                                    "initial_v_mem_hid");
    if (j.contains("initial_i_syn_hid")) {
        const json& is = j["initial_i_syn_hid"];
        if (!is.is_array() || is.size() != 2)
            throw ParseError("initial_i_syn_hid: expected two channel arrays");
        c.initial_i_syn_hid[0] =
            jsonu::vector_from_json<std::int32_t>(is[0], "initial_i_syn_hid[0]");
        c.initial_i_syn_hid[1] =
            jsonu::vector_from_json<std::int32_t>(is[1], "initial_i_syn_hid[1]");
    }
    if (j.contains("initial_v_mem_out"))
        c.initial_v_mem_out = jsonu::vector_from_json<std::int32_t>(j["initial_v_mem_out"],
                                                                    "initial_v_mem_out");
    if (j.contains("initial_i_syn_out"))
        c.initial_i_syn_out = jsonu::vector_from_json<std::int32_t>(j["initial_i_syn_out"],
                                                                    "initial_i_syn_out");

    try {
        check_shapes(c);
    } catch (const ShapeError& e) {
        throw ParseError(e.what());
    }
    try_seal(c);  // the seal is recomputed, never read from the file
    return c;
}

}  // namespace xylokit
