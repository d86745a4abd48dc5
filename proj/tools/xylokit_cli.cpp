// Command-line driver for the deployment pipeline: build, map, quantize,
// validate, stimulate, simulate, compare, and the full run.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "xylokit/compare.hpp"
#include "xylokit/mapper.hpp"
#include "xylokit/netdesc.hpp"
#include "xylokit/pipeline.hpp"
#include "xylokit/sim_float.hpp"
#include "xylokit/sim_int.hpp"
#include "xylokit/stimulus.hpp"

namespace {

using namespace xylokit;

std::filesystem::path outpath(const std::string& out_dir, const std::string& name) {
    return std::filesystem::path(out_dir) / name;
}

struct GlobalOptions {
    std::string out_dir = "out";
    double dt = 1e-3;
    std::uint64_t seed = 1;
};

int cmd_build(const std::string& network_path) {
    const NetworkGraph net = load_network(network_path);
    const auto order = traverse(*net.graph, net.root);
    std::cout << "modules (traversal order):\n";
    for (const auto& [id, depth] : order) {
        const GraphModule& m = net.graph->module(id);
        std::cout << "  depth " << depth << "  " << m.name << "  "
                  << to_string(m.kind) << "  " << m.input_nodes.size() << " -> "
                  << m.output_nodes.size() << "\n";
    }
    const DesignRuleReport drc = check_design_rules(*net.graph, net.root);
    if (!drc.ok()) {
        std::cerr << "design rule violations:\n" << drc.to_string();
        return kExitValidationFailure;
    }
    std::cout << "design rules: ok\n";
    return kExitOk;
}

int cmd_map(const std::string& network_path, double dt, const std::string& out) {
    const NetworkGraph net = load_network(network_path);
    const DesignRuleReport drc = check_design_rules(*net.graph, net.root);
    if (!drc.ok()) {
        std::cerr << "design rule violations:\n" << drc.to_string();
        return kExitValidationFailure;
    }
    write_file(out, serialize_spec(map_graph(*net.graph, net.root, dt)));
    std::cout << "wrote " << out << "\n";
    return kExitOk;
}

int cmd_quantize(const std::string& spec_path, const std::string& method,
                 const std::string& out) {
    const FloatSpecification spec = parse_spec(read_file(spec_path));
    const QuantizeResult result =
        method == "channel" ? quantize_channel(spec) : quantize_global(spec);
    for (const std::string& w : result.warnings) std::cerr << w << "\n";
    write_file(out, serialize_qspec(result.spec));
    std::cout << "wrote " << out << "\n";
    return kExitOk;
}

int cmd_validate(const std::string& qspec_path, const std::string& out) {
    const QuantizedSpecification qspec = parse_qspec(read_file(qspec_path));
    const ConfigResult result = config_from_specification(qspec);
    if (!result.valid) {
        std::cerr << "configuration rejected:\n" << result.message;
        return kExitValidationFailure;
    }
    write_file(out, serialize_config(result.config));
    std::cout << "wrote " << out << "\n";
    return kExitOk;
}

int cmd_stimulate(const std::vector<double>& rates, int channels, int steps, double dt,
                  std::uint64_t seed, const std::string& out) {
    std::vector<double> expanded = rates;
    if (channels > 0) {
        if (rates.size() == 1)
            expanded.assign(channels, rates[0]);
        else if (static_cast<int>(rates.size()) != channels)
            throw ShapeError("stimulate: " + std::to_string(rates.size()) + " rates for " +
                             std::to_string(channels) + " channels");
    }
    write_file(out, write_raster_csv(poisson_raster(expanded, steps, dt, seed)));
    std::cout << "wrote " << out << "\n";
    return kExitOk;
}

int cmd_simulate(const std::string& backend, const std::string& config_path,
                 const std::string& spec_path, const std::string& raster_path,
                 bool no_record, const std::string& out, const std::string& summary_out) {
    const InputRaster raster = read_raster_csv(read_file(raster_path));
    std::string csv;
    nlohmann::json summary;
    if (backend == "int") {
        if (config_path.empty())
            throw ParseError("simulate --backend int needs --config");
        const HardwareConfig config = deserialize_config(read_file(config_path));
        if (!config.sealed()) {
            std::cerr << "configuration does not validate:\n"
                      << validate_config(config).to_string();
            return kExitValidationFailure;
        }
        const SimulationRecording rec = evolve(config, raster, !no_record);
        csv = write_recording_csv(rec);
        summary = summarize_recording(rec);
    } else {
        if (spec_path.empty())
            throw ParseError("simulate --backend float needs --spec");
        const FloatSpecification spec = parse_spec(read_file(spec_path));
        const FloatRecording rec = evolve_float(spec, raster, !no_record);
        csv = write_recording_csv(rec);
        summary = summarize_recording(rec);
    }
    write_file(out, csv);
    if (!summary_out.empty()) write_file(summary_out, summary.dump(2) + "\n");
    std::cout << "wrote " << out << "\n";
    return kExitOk;
}

int cmd_compare(const std::string& a_path, const std::string& b_path,
                const std::string& qspec_path, const std::string& out) {
    ComparisonReport report;
    if (!qspec_path.empty()) {
        // a is the float reference, b the integer recording to unscale.
        const FloatRecording a = read_recording_csv_float(read_file(a_path));
        const SimulationRecording b = read_recording_csv_int(read_file(b_path));
        const QuantizedSpecification qspec = parse_qspec(read_file(qspec_path));
        report = compare_recordings(a, unscale_recording(b, qspec.scales));
    } else {
        const FloatRecording a = read_recording_csv_float(read_file(a_path));
        const FloatRecording b = read_recording_csv_float(read_file(b_path));
        report = compare_recordings(a, b);
    }
    write_file(out, report_to_json(report).dump(2) + "\n");
    std::cout << (report.exact_match ? "exact match\n" : "recordings differ\n");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SNN compilation toolchain for Xylo-class neuromorphic cores"};
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--out-dir", g.out_dir, "Artifact directory")->capture_default_str();
    app.add_option("--dt", g.dt, "Timestep in seconds")->capture_default_str();
    app.add_option("--seed", g.seed, "PRNG seed")->capture_default_str();

    // build
    auto* build = app.add_subcommand("build", "Parse a network and check design rules");
    std::string build_network;
    build->add_option("--network", build_network, "Network description JSON")->required();

    // map
    auto* map = app.add_subcommand("map", "Lower a network to a float specification");
    std::string map_network, map_out;
    map->add_option("--network", map_network, "Network description JSON")->required();
    map->add_option("-o,--output", map_out, "Output spec path");

    // quantize
    auto* quantize = app.add_subcommand("quantize", "Quantize a float specification");
    std::string q_spec, q_method = "global", q_out;
    quantize->add_option("--spec", q_spec, "spec.json path")->required();
    quantize->add_option("--method", q_method, "global|channel")
        ->check(CLI::IsMember({"global", "channel"}))
        ->capture_default_str();
    quantize->add_option("-o,--output", q_out, "Output qspec path");

    // validate
    auto* validate = app.add_subcommand("validate", "Build and validate a hardware config");
    std::string v_qspec, v_out;
    validate->add_option("--qspec", v_qspec, "qspec.json path")->required();
    validate->add_option("-o,--output", v_out, "Output config path");

    // stimulate
    auto* stimulate = app.add_subcommand("stimulate", "Generate a Poisson input raster");
    std::vector<double> s_rates;
    int s_channels = 0, s_steps = 100;
    std::string s_out;
    stimulate->add_option("--rates", s_rates, "Rates in Hz, one per channel")
        ->required()
        ->delimiter(',');
    stimulate->add_option("--channels", s_channels,
                          "Broadcast a single rate to this many channels");
    stimulate->add_option("--steps", s_steps, "Number of timesteps")->capture_default_str();
    stimulate->add_option("-o,--output", s_out, "Output raster path");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run a raster through a simulator");
    std::string sim_backend = "int", sim_config, sim_spec, sim_raster, sim_out, sim_summary;
    bool sim_no_record = false;
    simulate->add_option("--backend", sim_backend, "int|float")
        ->check(CLI::IsMember({"int", "float"}))
        ->capture_default_str();
    simulate->add_option("--config", sim_config, "config.xcfg.json (int backend)");
    simulate->add_option("--spec", sim_spec, "spec.json (float backend)");
    simulate->add_option("--raster", sim_raster, "Input raster CSV")->required();
    simulate->add_flag("--no-record", sim_no_record, "Keep only output spikes");
    simulate->add_option("-o,--output", sim_out, "Output recording path");
    simulate->add_option("--summary", sim_summary, "Optional summary JSON path");

    // compare
    auto* compare = app.add_subcommand("compare", "Compare two recordings");
    std::string c_a, c_b, c_qspec, c_out;
    compare->add_option("--a", c_a, "First recording (float reference)")->required();
    compare->add_option("--b", c_b, "Second recording")->required();
    compare->add_option("--qspec", c_qspec,
                        "Treat --b as an integer recording and unscale it with these scales");
    compare->add_option("-o,--output", c_out, "Output report path");

    // run
    auto* run = app.add_subcommand("run", "Full pipeline");
    std::string run_network, run_method = "global";
    int run_steps = 100;
    std::vector<double> run_rates;
    bool run_no_record = false;
    run->add_option("--network", run_network, "Network description JSON")->required();
    run->add_option("--quantize", run_method, "global|channel")
        ->check(CLI::IsMember({"global", "channel"}))
        ->capture_default_str();
    run->add_option("--steps", run_steps, "Number of timesteps")->capture_default_str();
    run->add_option("--rates", run_rates, "Rates in Hz (one value broadcasts)")
        ->delimiter(',');
    run->add_flag("--no-record", run_no_record, "Keep only output spikes");

    // Let --dt/--seed/--out-dir appear after the subcommand name too.
    for (CLI::App* sub : app.get_subcommands(/*filter=*/nullptr)) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitParseError;
    }

    try {
        if (build->parsed()) return cmd_build(build_network);
        if (map->parsed()) {
            if (map_out.empty()) map_out = outpath(g.out_dir, "spec.json").string();
            return cmd_map(map_network, g.dt, map_out);
        }
        if (quantize->parsed()) {
            if (q_out.empty()) q_out = outpath(g.out_dir, "qspec.json").string();
            return cmd_quantize(q_spec, q_method, q_out);
        }
        if (validate->parsed()) {
            if (v_out.empty()) v_out = outpath(g.out_dir, "config.xcfg.json").string();
            return cmd_validate(v_qspec, v_out);
        }
        if (stimulate->parsed()) {
            if (s_out.empty()) s_out = outpath(g.out_dir, "raster.csv").string();
            return cmd_stimulate(s_rates, s_channels, s_steps, g.dt, g.seed, s_out);
        }
        if (simulate->parsed()) {
            if (sim_out.empty())
                sim_out = outpath(g.out_dir, sim_backend == "int" ? "recording_int.csv"
                                                                  : "recording_float.csv")
                              .string();
            return cmd_simulate(sim_backend, sim_config, sim_spec, sim_raster,
                                sim_no_record, sim_out, sim_summary);
        }
        if (compare->parsed()) {
            if (c_out.empty()) c_out = outpath(g.out_dir, "report.json").string();
            return cmd_compare(c_a, c_b, c_qspec, c_out);
        }
        if (run->parsed()) {
            PipelineOptions opt;
            opt.network_path = run_network;
            opt.out_dir = g.out_dir;
            opt.dt = g.dt;
            opt.seed = g.seed;
            opt.steps = run_steps;
            opt.rates = run_rates;
            opt.quant_method = run_method;
            opt.record = !run_no_record;
            return run_pipeline(opt, std::cout, std::cerr);
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParseError;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternalError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidationFailure;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternalError;
    }
    return kExitOk;
}
