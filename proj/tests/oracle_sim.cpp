#include "oracle_sim.hpp"

namespace oracle {

namespace {

long long saturate(long long v) {
    if (v > 32767) return 32767;
    if (v < -32768) return -32768;
    return v;
}

}  // namespace

long long decay(long long v, int dash) {
    if (v == 0) return 0;
    long long mag = v < 0 ? -v : v;
    long long d = mag >> dash;
    if (d == 0) d = 1;
    if (v < 0) return v + d;
    return v - d;
}

Trace evolve(const Net& net, const std::vector<std::vector<int>>& raster) {
    const int H = net.hidden;
    const int O = net.outputs;
    const int S = net.channels;

    std::vector<long long> v_hid(H, 0);
    std::array<std::vector<long long>, 2> i_hid = {std::vector<long long>(H, 0),
                                                   std::vector<long long>(H, 0)};
    std::vector<long long> v_out(O, 0), i_out(O, 0);
    if (!net.init_v_hid.empty()) v_hid = net.init_v_hid;
    for (int s = 0; s < 2; ++s)
        if (!net.init_i_hid[s].empty()) i_hid[s] = net.init_i_hid[s];
    if (!net.init_v_out.empty()) v_out = net.init_v_out;
    if (!net.init_i_out.empty()) i_out = net.init_i_out;
    std::vector<int> prev_routed(H, 0);

    Trace trace;
    for (const std::vector<int>& input : raster) {
        // (1) synaptic currents
        for (int i = 0; i < H; ++i) {
            for (int s = 0; s < S; ++s) {
                long long acc = decay(i_hid[s][i], net.dash_syn_hid[s][i]);
                for (int c = 0; c < net.input_channels; ++c)
                    acc += net.w_in[c][i][s] * input[c];
                for (int j = 0; j < H; ++j) acc += net.w_rec[j][i][s] * prev_routed[j];
                i_hid[s][i] = saturate(acc);
            }
        }
        // (2) membranes, (3) firing with subtractive reset
        std::vector<int> spikes(H, 0);
        for (int i = 0; i < H; ++i) {
            long long acc = decay(v_hid[i], net.dash_mem_hid[i]);
            for (int s = 0; s < S; ++s) acc += i_hid[s][i];
            acc += net.bias_hid[i];
            long long v = saturate(acc);
            if (v >= net.threshold_hid[i]) {
                long long n = v / net.threshold_hid[i];
                if (n > 31) n = 31;
                spikes[i] = static_cast<int>(n);
                v -= n * net.threshold_hid[i];
            }
            v_hid[i] = v;
        }
        // (4) alias routing
        std::vector<int> routed = spikes;
        for (const auto& [source, target] : net.aliases) {
            routed[target] += spikes[source];
            if (routed[target] > 31) routed[target] = 31;
        }
        // (5) output neurons
        std::vector<int> out_spikes(O, 0);
        for (int o = 0; o < O; ++o) {
            long long acc = decay(i_out[o], net.dash_syn_out[o]);
            for (int j = 0; j < H; ++j) acc += net.w_out[j][o] * routed[j];
            i_out[o] = saturate(acc);
            long long v = saturate(decay(v_out[o], net.dash_mem_out[o]) + i_out[o] +
                                   net.bias_out[o]);
            if (v >= net.threshold_out[o]) {
                out_spikes[o] = 1;
                v -= net.threshold_out[o];
            }
            v_out[o] = v;
        }
        prev_routed = routed;

        trace.v_hid.push_back(v_hid);
        trace.i_hid.push_back(i_hid);
        trace.spikes_hid.push_back(routed);
        trace.v_out.push_back(v_out);
        trace.i_out.push_back(i_out);
        trace.spikes_out.push_back(out_spikes);
    }
    return trace;
}

}  // namespace oracle
