#include "xylokit/recording.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <vector>

#include "json_util.hpp"

namespace xylokit {

FloatRecording to_float_recording(const SimulationRecording& rec) {
    FloatRecording out;
    out.synapse_channels = rec.synapse_channels;
    out.full = rec.full;
    out.v_mem_hid = rec.v_mem_hid.cast<double>();
    out.i_syn_hid[0] = rec.i_syn_hid[0].cast<double>();
    out.i_syn_hid[1] = rec.i_syn_hid[1].cast<double>();
    out.spikes_hid = rec.spikes_hid;
    out.v_mem_out = rec.v_mem_out.cast<double>();
    out.i_syn_out = rec.i_syn_out.cast<double>();
    out.spikes_out = rec.spikes_out;
    return out;
}

namespace {

std::string number_to_string(int v) { return std::to_string(v); }

std::string number_to_string(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

template <typename Scalar>
std::string write_csv(const RecordingT<Scalar>& rec) {
    std::string out = "t,kind,index,channel,v_mem,i_syn,spikes\n";
    const int steps = rec.steps();
    for (int t = 0; t < steps; ++t) {
        if (rec.full) {
            const int hidden = rec.hidden();
            for (int i = 0; i < hidden; ++i)
                for (int s = 0; s < rec.synapse_channels; ++s) {
                    out += std::to_string(t) + ",hidden," + std::to_string(i) + ',' +
                           std::to_string(s) + ',' + number_to_string(rec.v_mem_hid(t, i)) +
                           ',' + number_to_string(rec.i_syn_hid[s](t, i)) + ',' +
                           std::to_string(rec.spikes_hid(t, i)) + '\n';
                }
        }
        for (int o = 0; o < rec.outputs(); ++o) {
            out += std::to_string(t) + ",output," + std::to_string(o) + ",0,";
            if (rec.full) {
                out += number_to_string(rec.v_mem_out(t, o)) + ',' +
                       number_to_string(rec.i_syn_out(t, o)) + ',';
            } else {
                out += ",,";
            }
            out += std::to_string(rec.spikes_out(t, o)) + '\n';
        }
    }
    return out;
}

template <typename Scalar>
Scalar parse_scalar(const std::string& field, int line_no);

template <>
int parse_scalar<int>(const std::string& field, int line_no) {
    int value = 0;
    auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || p != field.data() + field.size())
        throw ParseError("recording line " + std::to_string(line_no) + ": bad integer '" +
                         field + "'");
    return value;
}

template <>
double parse_scalar<double>(const std::string& field, int line_no) {
    char* end = nullptr;
    const double value = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size() || field.empty())
        throw ParseError("recording line " + std::to_string(line_no) + ": bad number '" +
                         field + "'");
    return value;
}

template <typename Scalar>
RecordingT<Scalar> read_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "t,kind,index,channel,v_mem,i_syn,spikes")
        throw ParseError("recording: missing header");

    struct Row {
        int t, index, channel, spikes;
        bool hidden;
        bool has_state;
        Scalar v_mem{}, i_syn{};
    };
    std::vector<Row> rows;
    int steps = 0, hidden = 0, outputs = 0, channels = 1;
    bool any_state = false;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::size_t pos = 0;
        for (int k = 0; k < 6; ++k) {
            const auto comma = line.find(',', pos);
            if (comma == std::string::npos)
                throw ParseError("recording line " + std::to_string(line_no) +
                                 ": expected 7 fields");
            f.push_back(line.substr(pos, comma - pos));
            pos = comma + 1;
        }
        f.push_back(line.substr(pos));

        Row r;
        r.t = parse_scalar<int>(f[0], line_no);
        if (f[1] == "hidden")
            r.hidden = true;
        else if (f[1] == "output")
            r.hidden = false;
        else
            throw ParseError("recording line " + std::to_string(line_no) + ": bad kind '" +
                             f[1] + "'");
        r.index = parse_scalar<int>(f[2], line_no);
        r.channel = parse_scalar<int>(f[3], line_no);
        r.has_state = !f[4].empty();
        if (r.has_state) {
            r.v_mem = parse_scalar<Scalar>(f[4], line_no);
            r.i_syn = parse_scalar<Scalar>(f[5], line_no);
            any_state = true;
        }
        r.spikes = parse_scalar<int>(f[6], line_no);
        if (r.t < 0 || r.index < 0 || r.channel < 0)
            throw ParseError("recording line " + std::to_string(line_no) + ": negative index");
        steps = std::max(steps, r.t + 1);
        if (r.hidden) {
            hidden = std::max(hidden, r.index + 1);
            channels = std::max(channels, r.channel + 1);
        } else {
            outputs = std::max(outputs, r.index + 1);
        }
        rows.push_back(r);
    }

    RecordingT<Scalar> rec;
    rec.synapse_channels = channels;
    rec.full = any_state;
    if (rec.full) {
        rec.v_mem_hid.setZero(steps, hidden);
        rec.i_syn_hid[0].setZero(steps, hidden);
        rec.i_syn_hid[1].setZero(steps, hidden);
        rec.spikes_hid.setZero(steps, hidden);
        rec.v_mem_out.setZero(steps, outputs);
        rec.i_syn_out.setZero(steps, outputs);
    }
    rec.spikes_out.setZero(steps, outputs);
    for (const Row& r : rows) {
        if (r.hidden) {
            if (!rec.full)
                throw ParseError("recording: hidden rows in a spike-only recording");
            rec.v_mem_hid(r.t, r.index) = r.v_mem;
            rec.i_syn_hid[r.channel](r.t, r.index) = r.i_syn;
            rec.spikes_hid(r.t, r.index) = r.spikes;
        } else {
            if (r.has_state) {
                rec.v_mem_out(r.t, r.index) = r.v_mem;
                rec.i_syn_out(r.t, r.index) = r.i_syn;
            }
            rec.spikes_out(r.t, r.index) = r.spikes;
        }
    }
    return rec;
}

template <typename Scalar>
nlohmann::json summarize(const RecordingT<Scalar>& rec) {
    using nlohmann::json;
    auto per_neuron = [](const Eigen::MatrixXi& spikes) {
        json totals = json::array();
        json first = json::array();
        for (Eigen::Index i = 0; i < spikes.cols(); ++i) {
            long total = 0;
            long first_t = -1;
            for (Eigen::Index t = 0; t < spikes.rows(); ++t) {
                total += spikes(t, i);
                if (first_t < 0 && spikes(t, i) > 0) first_t = t;
            }
            totals.push_back(total);
            first.push_back(first_t);
        }
        return json{{"total_spikes", totals}, {"first_spike", first}};
    };

    json j;
    j["steps"] = rec.steps();
    j["output"] = per_neuron(rec.spikes_out);
    if (rec.full) j["hidden"] = per_neuron(rec.spikes_hid);
    return j;
}

}  // namespace

std::string write_recording_csv(const SimulationRecording& rec) { return write_csv(rec); }
std::string write_recording_csv(const FloatRecording& rec) { return write_csv(rec); }

SimulationRecording read_recording_csv_int(const std::string& text) {
    return read_csv<int>(text);
}

FloatRecording read_recording_csv_float(const std::string& text) {
    return read_csv<double>(text);
}

nlohmann::json summarize_recording(const SimulationRecording& rec) { return summarize(rec); }
nlohmann::json summarize_recording(const FloatRecording& rec) { return summarize(rec); }

}  // namespace xylokit
