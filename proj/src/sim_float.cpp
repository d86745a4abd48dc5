#include "xylokit/sim_float.hpp"

#include <cmath>

#include "xylokit/hwconfig.hpp"
#include "xylokit/quantize.hpp"

namespace xylokit {

namespace {

constexpr int kHiddenSpikeMax = 31;

Eigen::VectorXd alphas(const Eigen::VectorXd& taus, double dt) {
    Eigen::VectorXd a(taus.size());
    for (Eigen::Index i = 0; i < taus.size(); ++i)
        a(i) = 1.0 - std::exp2(-tau_to_dash(taus(i), dt));
    return a;
}

}  // namespace

FloatRecording evolve_float(const FloatSpecification& spec, const InputRaster& raster,
                            bool record) {
    if (raster.channels() != spec.input_channels)
        throw ShapeError("evolve_float: raster has " + std::to_string(raster.channels()) +
                         " channels, specification expects " +
                         std::to_string(spec.input_channels));
    const ValidationReport raster_report = validate_raster(raster);
    if (!raster_report.ok())
        throw DomainError("evolve_float: invalid raster:\n" + raster_report.to_string());

    const int H = spec.hidden;
    const int O = spec.outputs;
    const int S = spec.synapse_channels;
    const int steps = raster.steps();

    const Eigen::VectorXd alpha_mem_hid = alphas(spec.tau_mem_hid, spec.dt);
    const std::array<Eigen::VectorXd, 2> alpha_syn_hid = {
        alphas(spec.tau_syn_hid[0], spec.dt), alphas(spec.tau_syn_hid[1], spec.dt)};
    const Eigen::VectorXd alpha_mem_out = alphas(spec.tau_mem_out, spec.dt);
    const Eigen::VectorXd alpha_syn_out = alphas(spec.tau_syn_out, spec.dt);

    std::vector<std::pair<int, int>> alias_pairs;
    for (int i = 0; i < H; ++i)
        if (spec.aliases[i] >= 0) alias_pairs.emplace_back(i, spec.aliases[i]);

    FloatRecording rec;
    rec.synapse_channels = S;
    rec.full = record;
    if (record) {
        rec.v_mem_hid.setZero(steps, H);
        rec.i_syn_hid[0].setZero(steps, H);
        rec.i_syn_hid[1].setZero(steps, H);
        rec.spikes_hid.setZero(steps, H);
        rec.v_mem_out.setZero(steps, O);
        rec.i_syn_out.setZero(steps, O);
    }
    rec.spikes_out.setZero(steps, O);

    Eigen::VectorXd v_hid = Eigen::VectorXd::Zero(H);
    std::array<Eigen::VectorXd, 2> i_hid = {Eigen::VectorXd::Zero(H),
                                            Eigen::VectorXd::Zero(H)};
    Eigen::VectorXd v_out = Eigen::VectorXd::Zero(O);
    Eigen::VectorXd i_out = Eigen::VectorXd::Zero(O);
    Eigen::VectorXd routed_prev = Eigen::VectorXd::Zero(H);
    Eigen::VectorXi spikes(H), routed(H), out_spikes(O);

    for (int t = 0; t < steps; ++t) {
        const Eigen::VectorXd in = raster.counts.row(t).transpose().cast<double>();

        for (int ch = 0; ch < S; ++ch)
            i_hid[ch] = alpha_syn_hid[ch].cwiseProduct(i_hid[ch]) +
                        spec.w_in[ch].transpose() * in +
                        spec.w_rec[ch].transpose() * routed_prev;

        for (int i = 0; i < H; ++i) {
            double v = alpha_mem_hid(i) * v_hid(i);
            for (int ch = 0; ch < S; ++ch) v += i_hid[ch](i);
            v += spec.bias_hid(i);
            const double th = spec.threshold_hid(i);
            int n = 0;
            if (v >= th) n = std::min(kHiddenSpikeMax, static_cast<int>(std::floor(v / th)));
            v -= n * th;
            spikes(i) = n;
            v_hid(i) = v;
        }

        routed = spikes;
        for (const auto& [source, target] : alias_pairs)
            routed(target) = std::min(kHiddenSpikeMax, routed(target) + spikes(source));

        const Eigen::VectorXd out_contrib = spec.w_out.transpose() * routed.cast<double>();
        for (int o = 0; o < O; ++o) {
            i_out(o) = alpha_syn_out(o) * i_out(o) + out_contrib(o);
            double v = alpha_mem_out(o) * v_out(o) + i_out(o) + spec.bias_out(o);
            int n = 0;
            if (v >= spec.threshold_out(o)) {
                n = 1;
                v -= spec.threshold_out(o);
            }
            out_spikes(o) = n;
            v_out(o) = v;
        }

        routed_prev = routed.cast<double>();
        if (record) {
            rec.v_mem_hid.row(t) = v_hid.transpose();
            for (int ch = 0; ch < S; ++ch) rec.i_syn_hid[ch].row(t) = i_hid[ch].transpose();
            rec.spikes_hid.row(t) = routed.transpose();
            rec.v_mem_out.row(t) = v_out.transpose();
            rec.i_syn_out.row(t) = i_out.transpose();
        }
        rec.spikes_out.row(t) = out_spikes.transpose();
    }

    if (record &&
        !(rec.v_mem_hid.allFinite() && rec.i_syn_hid[0].allFinite() &&
          rec.i_syn_hid[1].allFinite() && rec.v_mem_out.allFinite() &&
          rec.i_syn_out.allFinite()))
        throw InternalError("evolve_float: non-finite state");
    return rec;
}

}  // namespace xylokit
