#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gen.hpp"
#include "oracle_sim.hpp"
#include "xylokit/sim_int.hpp"

using namespace xylokit;

namespace {

// One hidden neuron, one output neuron, fully hand-parameterized.
HardwareConfig one_neuron_config(int w_in, int dash_syn, int dash_mem, int bias,
                                 int threshold) {
    HardwareConfig c;
    c.dt = 1e-3;
    c.input_channels = 1;
    c.hidden = 1;
    c.outputs = 1;
    c.hidden_synapse_channels = 1;
    c.output_synapse_channels = 1;
    for (int ch = 0; ch < 2; ++ch) {
        c.w_in[ch].setZero(1, 1);
        c.w_rec[ch].setZero(1, 1);
        c.dash_syn_hid[ch] = VectorXi32::Constant(1, dash_syn);
    }
    c.w_in[0](0, 0) = w_in;
    c.w_out.setZero(1, 1);
    c.threshold_hid = VectorXi32::Constant(1, threshold);
    c.bias_hid = VectorXi32::Constant(1, bias);
    c.dash_mem_hid = VectorXi32::Constant(1, dash_mem);
    c.threshold_out = VectorXi32::Constant(1, 32767);
    c.bias_out = VectorXi32::Zero(1);
    c.dash_mem_out = VectorXi32::Zero(1);
    c.dash_syn_out = VectorXi32::Zero(1);
    REQUIRE(try_seal(c));
    return c;
}

InputRaster single_spike_raster(int steps, int channels = 1) {
    InputRaster raster;
    raster.counts = Eigen::MatrixXi::Zero(steps, channels);
    raster.counts(0, 0) = 1;
    return raster;
}

}  // namespace

TEST_CASE("bitshift_decay follows the shift with a linear floor") {
    CHECK(bitshift_decay(1024, 4) == 960);    // 1024 >> 4 = 64
    CHECK(bitshift_decay(1000, 15) == 999);   // shift underflows, linear floor
    CHECK(bitshift_decay(0, 7) == 0);
    CHECK(bitshift_decay(-1024, 4) == -960);  // odd symmetry
    CHECK(bitshift_decay(1, 3) == 0);
    CHECK(bitshift_decay(-1, 3) == 0);
    CHECK(bitshift_decay(-32768, 0) == 0);
    CHECK(bitshift_decay(32767, 0) == 0);
}

TEST_CASE("decay contracts monotonically without crossing zero") {
    SplitMix64 g(17);
    for (int trial = 0; trial < 200; ++trial) {
        const int dash = testgen::uniform_int(g, 0, 15);
        int v = testgen::uniform_int(g, -32768, 32767);
        const int start_mag = v < 0 ? -v : v;
        int steps = 0;
        while (v != 0) {
            const int next = bitshift_decay(v, dash);
            CHECK(std::abs(next) < std::abs(v));
            CHECK(next * static_cast<long long>(v) >= 0);  // sign kept until zero
            v = next;
            ++steps;
            REQUIRE(steps <= start_mag);  // at most |v| steps to zero
        }
    }
}

// The committed golden trace for the worked single-neuron example. Expected
// values were produced by the scalar oracle first and frozen here; the test
// asserts oracle, frozen constants and simulator all agree.
TEST_CASE("single-neuron golden trace") {
    const HardwareConfig c = one_neuron_config(127, 1, 1, 0, 100);
    const InputRaster raster = single_spike_raster(3);

    const oracle::Trace trace = oracle::evolve(testgen::oracle_net(c),
                                               testgen::oracle_raster(raster));
    const long long frozen_i_syn[3] = {127, 64, 32};
    const long long frozen_v_mem[3] = {27, 78, 71};
    const int frozen_spikes[3] = {1, 0, 0};
    for (int t = 0; t < 3; ++t) {
        CHECK(trace.i_hid[t][0][0] == frozen_i_syn[t]);
        CHECK(trace.v_hid[t][0] == frozen_v_mem[t]);
        CHECK(trace.spikes_hid[t][0] == frozen_spikes[t]);
    }

    const SimulationRecording rec = evolve(c, raster);
    for (int t = 0; t < 3; ++t) {
        CHECK(rec.i_syn_hid[0](t, 0) == frozen_i_syn[t]);
        CHECK(rec.v_mem_hid(t, 0) == frozen_v_mem[t]);
        CHECK(rec.spikes_hid(t, 0) == frozen_spikes[t]);
    }
}

TEST_CASE("integration saturates at the 16-bit rails before thresholding") {
    // 16 channels x 15 events x weight 127 = 30480 per step; with slow decay
    // the second step would reach 60959 and must clamp at 32767.
    HardwareConfig c = one_neuron_config(127, 15, 0, 0, 16400);
    c.input_channels = 16;
    c.w_in[0] = MatrixXi32::Constant(16, 1, 127);
    c.w_in[1] = MatrixXi32::Zero(16, 1);
    REQUIRE(try_seal(c));

    InputRaster raster;
    raster.counts = Eigen::MatrixXi::Constant(2, 16, 15);
    const SimulationRecording rec = evolve(c, raster);
    CHECK(rec.i_syn_hid[0](0, 0) == 30480);
    CHECK(rec.i_syn_hid[0](1, 0) == 32767);  // saturated, not 60959
    // dash_mem = 0 wipes the membrane each step, so step 1 sees exactly the
    // saturated synaptic current: one spike, not two.
    CHECK(rec.spikes_hid(1, 0) == 1);
    CHECK(rec.v_mem_hid(1, 0) == 32767 - 16400);
}

TEST_CASE("multi-spike subtractive reset") {
    // bias alone drives v to 350 in one step: 3 spikes, residue 50
    const HardwareConfig c = one_neuron_config(0, 0, 15, 350, 100);
    InputRaster raster;
    raster.counts = Eigen::MatrixXi::Zero(1, 1);
    const SimulationRecording rec = evolve(c, raster);
    CHECK(rec.spikes_hid(0, 0) == 3);
    CHECK(rec.v_mem_hid(0, 0) == 50);
}

TEST_CASE("hidden spike count clamps at 31") {
    const HardwareConfig c = one_neuron_config(0, 0, 15, 32000, 100);
    InputRaster raster;
    raster.counts = Eigen::MatrixXi::Zero(1, 1);
    const SimulationRecording rec = evolve(c, raster);
    CHECK(rec.spikes_hid(0, 0) == 31);  // floor(32000/100) = 320, clamped
    CHECK(rec.v_mem_hid(0, 0) == 32000 - 31 * 100);
}

TEST_CASE("alias routing adds source counts into the target, clamped") {
    HardwareConfig c = one_neuron_config(0, 0, 15, 0, 100);
    c.hidden = 2;
    for (int ch = 0; ch < 2; ++ch) {
        c.w_in[ch].setZero(1, 2);
        c.w_rec[ch].setZero(2, 2);
        c.dash_syn_hid[ch] = VectorXi32::Zero(2);
    }
    c.w_out.setZero(2, 1);
    c.threshold_hid = VectorXi32::Constant(2, 100);
    c.bias_hid.resize(2);
    c.bias_hid << 500, 300;  // neuron 0 fires 5, neuron 1 fires 3
    c.dash_mem_hid = VectorXi32::Constant(2, 15);
    c.alias_pairs = {{0, 1}};
    REQUIRE(try_seal(c));

    InputRaster raster;
    raster.counts = Eigen::MatrixXi::Zero(1, 1);
    const SimulationRecording rec = evolve(c, raster);
    CHECK(rec.spikes_hid(0, 0) == 5);      // the source still routes its own count
    CHECK(rec.spikes_hid(0, 1) == 3 + 5);  // target accumulates the source

    c.bias_hid << 3000, 2900;  // 30 and 29 spikes; routed target must clamp
    REQUIRE(try_seal(c));
    const SimulationRecording clamped = evolve(c, raster);
    CHECK(clamped.spikes_hid(0, 0) == 30);
    CHECK(clamped.spikes_hid(0, 1) == 31);
}

TEST_CASE("recurrent spikes arrive with one-step delay") {
    HardwareConfig c = one_neuron_config(100, 0, 0, 0, 100);
    c.w_rec[0](0, 0) = 40;
    REQUIRE(try_seal(c));

    const InputRaster raster = single_spike_raster(3);
    const SimulationRecording rec = evolve(c, raster);
    // t=0: input only -> i_syn 100, one spike
    CHECK(rec.i_syn_hid[0](0, 0) == 100);
    CHECK(rec.spikes_hid(0, 0) == 1);
    // t=1: no input, the t=0 spike arrives through w_rec
    CHECK(rec.i_syn_hid[0](1, 0) == 40);
    CHECK(rec.spikes_hid(1, 0) == 0);
    // t=2: nothing left (dash_syn = 0 wipes state, no spike at t=1)
    CHECK(rec.i_syn_hid[0](2, 0) == 0);
}

TEST_CASE("output neurons integrate routed spikes with a one-spike clamp") {
    HardwareConfig c = one_neuron_config(100, 0, 0, 0, 100);
    c.w_out(0, 0) = 127;
    c.threshold_out = VectorXi32::Constant(1, 50);
    c.dash_mem_out = VectorXi32::Zero(1);
    c.dash_syn_out = VectorXi32::Zero(1);
    REQUIRE(try_seal(c));

    InputRaster raster;
    raster.counts = Eigen::MatrixXi::Zero(2, 1);
    raster.counts(0, 0) = 4;  // 4 events -> i_syn 400 -> 4 hidden spikes
    const SimulationRecording rec = evolve(c, raster);
    CHECK(rec.spikes_hid(0, 0) == 4);
    CHECK(rec.i_syn_out(0, 0) == 4 * 127);
    CHECK(rec.spikes_out(0, 0) == 1);                 // clamped to one
    CHECK(rec.v_mem_out(0, 0) == 4 * 127 - 50);       // one subtractive reset
}

TEST_CASE("a configured initial state seeds the first step") {
    HardwareConfig c = one_neuron_config(0, 1, 1, 0, 30000);
    c.initial_v_mem_hid = VectorXi32::Constant(1, 1024);
    c.initial_i_syn_hid[0] = VectorXi32::Constant(1, 512);
    c.initial_i_syn_hid[1] = VectorXi32::Zero(1);
    REQUIRE(try_seal(c));

    InputRaster raster;
    raster.counts = Eigen::MatrixXi::Zero(1, 1);
    const SimulationRecording rec = evolve(c, raster);
    CHECK(rec.i_syn_hid[0](0, 0) == 256);        // decay(512, 1)
    CHECK(rec.v_mem_hid(0, 0) == 512 + 256);     // decay(1024, 1) + i_syn
}

TEST_CASE("zero raster and zero bias stay exactly zero") {
    const HardwareConfig c = one_neuron_config(127, 1, 1, 0, 100);
    InputRaster raster;
    raster.counts = Eigen::MatrixXi::Zero(50, 1);
    const SimulationRecording rec = evolve(c, raster);
    CHECK(rec.v_mem_hid.isZero());
    CHECK(rec.i_syn_hid[0].isZero());
    CHECK(rec.spikes_hid.isZero());
    CHECK(rec.spikes_out.isZero());
}

TEST_CASE("evolve is deterministic and honors record=false") {
    SplitMix64 g(2024);
    const HardwareConfig c = testgen::random_config(g);
    const InputRaster raster = testgen::random_raster(g, 40, c.input_channels);

    const SimulationRecording a = evolve(c, raster);
    const SimulationRecording b = evolve(c, raster);
    CHECK(write_recording_csv(a) == write_recording_csv(b));

    const SimulationRecording spikes_only = evolve(c, raster, false);
    CHECK(!spikes_only.full);
    CHECK(spikes_only.v_mem_hid.size() == 0);
    CHECK(spikes_only.spikes_out == a.spikes_out);
}

TEST_CASE("evolve rejects bad inputs") {
    const HardwareConfig c = one_neuron_config(127, 1, 1, 0, 100);

    InputRaster wrong_channels;
    wrong_channels.counts = Eigen::MatrixXi::Zero(3, 2);
    CHECK_THROWS_AS(evolve(c, wrong_channels), ShapeError);

    InputRaster too_hot;
    too_hot.counts = Eigen::MatrixXi::Constant(3, 1, 16);
    CHECK_THROWS_AS(evolve(c, too_hot), DomainError);

    HardwareConfig unsealed = c;
    unsealed.w_in[0](0, 0) = 126;  // any mutation leaves the copy's seal stale;
    unsealed = HardwareConfig{};   // a default config is simply never sealed
    unsealed.dt = 1e-3;
    InputRaster empty;
    empty.counts = Eigen::MatrixXi::Zero(1, 0);
    CHECK_THROWS_AS(evolve(unsealed, empty), UnsealedConfigError);
}

TEST_CASE("pre-threshold synaptic superposition at dash 0") {
    // With dash_syn = 0 the synaptic state is memoryless, so i_syn is an
    // exact weighted sum and superposes over raster addition.
    HardwareConfig c = one_neuron_config(23, 0, 0, 0, 32767);
    c.w_rec[0](0, 0) = 17;
    REQUIRE(try_seal(c));

    SplitMix64 g(5);
    InputRaster r1, r2, sum;
    r1.counts = Eigen::MatrixXi::Zero(30, 1);
    r2.counts = Eigen::MatrixXi::Zero(30, 1);
    sum.counts = Eigen::MatrixXi::Zero(30, 1);
    for (int t = 0; t < 30; ++t) {
        r1.counts(t, 0) = testgen::uniform_int(g, 0, 7);
        r2.counts(t, 0) = testgen::uniform_int(g, 0, 8);
        sum.counts(t, 0) = r1.counts(t, 0) + r2.counts(t, 0);
    }
    const SimulationRecording a = evolve(c, r1);
    const SimulationRecording b = evolve(c, r2);
    const SimulationRecording s = evolve(c, sum);
    CHECK(s.i_syn_hid[0] == a.i_syn_hid[0] + b.i_syn_hid[0]);
}

TEST_CASE("recorded states always satisfy the clamp invariants") {
    SplitMix64 g(606);
    for (int trial = 0; trial < 10; ++trial) {
        const HardwareConfig c = testgen::random_config(g);
        const InputRaster raster = testgen::random_raster(g, 60, c.input_channels);
        const SimulationRecording rec = evolve(c, raster);
        CHECK(validate_recording(rec).ok());
    }
}

TEST_CASE("saturation at both rails agrees with the oracle") {
    HardwareConfig c = one_neuron_config(127, 15, 15, 32767, 32767);
    c.hidden = 2;
    for (int ch = 0; ch < 2; ++ch) {
        c.w_in[ch].setZero(1, 2);
        c.w_rec[ch].setZero(2, 2);
        c.dash_syn_hid[ch] = VectorXi32::Constant(2, 15);
    }
    c.w_in[0](0, 0) = 127;   // neuron 0 driven hard positive
    c.w_in[0](0, 1) = -128;  // neuron 1 driven hard negative
    c.w_out.setZero(2, 1);
    c.threshold_hid = VectorXi32::Constant(2, 32767);
    c.bias_hid.resize(2);
    c.bias_hid << 32767, -32768;
    c.dash_mem_hid = VectorXi32::Constant(2, 15);
    REQUIRE(try_seal(c));

    InputRaster raster;
    raster.counts = Eigen::MatrixXi::Constant(40, 1, 15);
    const SimulationRecording rec = evolve(c, raster);
    const oracle::Trace trace = oracle::evolve(testgen::oracle_net(c),
                                               testgen::oracle_raster(raster));
    CHECK(testgen::mismatches(rec, trace) == 0);
    CHECK(rec.i_syn_hid[0].col(0).maxCoeff() == 32767);
    CHECK(rec.i_syn_hid[0].col(1).minCoeff() == -32768);
    CHECK(rec.v_mem_hid.col(1).minCoeff() == -32768);
    CHECK(validate_recording(rec).ok());
}

TEST_CASE("the simulator matches the scalar oracle bit for bit") {
    SplitMix64 g(20240807);
    for (int trial = 0; trial < 20; ++trial) {
        const HardwareConfig c = testgen::random_config(g);
        const InputRaster raster = testgen::random_raster(g, 50, c.input_channels);
        const SimulationRecording rec = evolve(c, raster);
        const oracle::Trace trace = oracle::evolve(testgen::oracle_net(c),
                                                   testgen::oracle_raster(raster));
        CHECK(testgen::mismatches(rec, trace) == 0);
    }
}
