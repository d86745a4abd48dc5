#include "xylokit/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "xylokit/mapper.hpp"
#include "xylokit/netdesc.hpp"
#include "xylokit/stimulus.hpp"

namespace xylokit {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file '" + path + "'");
    out << content;
}

std::string write_spike_raster_csv(const SimulationRecording& rec) {
    std::string out = "t,kind,index,count\n";
    for (int t = 0; t < rec.steps(); ++t) {
        if (rec.full)
            for (int i = 0; i < rec.hidden(); ++i)
                if (rec.spikes_hid(t, i) > 0)
                    out += std::to_string(t) + ",hidden," + std::to_string(i) + ',' +
                           std::to_string(rec.spikes_hid(t, i)) + '\n';
        for (int o = 0; o < rec.outputs(); ++o)
            if (rec.spikes_out(t, o) > 0)
                out += std::to_string(t) + ",output," + std::to_string(o) + ',' +
                       std::to_string(rec.spikes_out(t, o)) + '\n';
    }
    return out;
}

std::string write_membrane_traces_csv(const SimulationRecording& rec) {
    std::string out = "t,kind,index,v_mem\n";
    if (!rec.full) return out;
    for (int t = 0; t < rec.steps(); ++t) {
        for (int i = 0; i < rec.hidden(); ++i)
            out += std::to_string(t) + ",hidden," + std::to_string(i) + ',' +
                   std::to_string(rec.v_mem_hid(t, i)) + '\n';
        for (int o = 0; o < rec.outputs(); ++o)
            out += std::to_string(t) + ",output," + std::to_string(o) + ',' +
                   std::to_string(rec.v_mem_out(t, o)) + '\n';
    }
    return out;
}

std::string write_synaptic_traces_csv(const SimulationRecording& rec) {
    std::string out = "t,kind,index,channel,i_syn\n";
    if (!rec.full) return out;
    for (int t = 0; t < rec.steps(); ++t) {
        for (int i = 0; i < rec.hidden(); ++i)
            for (int s = 0; s < rec.synapse_channels; ++s)
                out += std::to_string(t) + ",hidden," + std::to_string(i) + ',' +
                       std::to_string(s) + ',' + std::to_string(rec.i_syn_hid[s](t, i)) +
                       '\n';
        for (int o = 0; o < rec.outputs(); ++o)
            out += std::to_string(t) + ",output," + std::to_string(o) + ",0," +
                   std::to_string(rec.i_syn_out(t, o)) + '\n';
    }
    return out;
}

namespace {

std::filesystem::path join(const std::string& dir, const char* name) {
    return std::filesystem::path(dir) / name;
}

}  // namespace

int run_pipeline(const PipelineOptions& opt, std::ostream& out, std::ostream& err) {
    // build
    NetworkGraph net;
    try {
        net = load_network(opt.network_path);
    } catch (const ParseError& e) {
        throw ParseError("build: " + std::string(e.what()));
    }

    const DesignRuleReport drc = check_design_rules(*net.graph, net.root);
    if (!drc.ok()) {
        err << "build: design rule violations:\n" << drc.to_string();
        return kExitValidationFailure;
    }

    // map
    const FloatSpecification spec = map_graph(*net.graph, net.root, opt.dt);
    write_file(join(opt.out_dir, "spec.json").string(), serialize_spec(spec));

    // quantize
    const QuantizeResult quant = opt.quant_method == "channel" ? quantize_channel(spec)
                                                               : quantize_global(spec);
    for (const std::string& w : quant.warnings) err << "quantize: " << w << "\n";
    write_file(join(opt.out_dir, "qspec.json").string(), serialize_qspec(quant.spec));

    // validate
    ConfigResult cfg = config_from_specification(quant.spec);
    if (!cfg.valid) {
        err << "validate: configuration rejected:\n" << cfg.message;
        return kExitValidationFailure;
    }
    write_file(join(opt.out_dir, "config.xcfg.json").string(),
               serialize_config(cfg.config));

    // stimulate
    std::vector<double> rates = opt.rates;
    if (rates.empty()) rates.assign(spec.input_channels, 100.0);
    if (rates.size() == 1 && spec.input_channels > 1)
        rates.assign(spec.input_channels, rates[0]);
    if (static_cast<int>(rates.size()) != spec.input_channels)
        throw ShapeError("stimulate: " + std::to_string(rates.size()) +
                         " rates for " + std::to_string(spec.input_channels) +
                         " input channels");
    const InputRaster raster = poisson_raster(rates, opt.steps, opt.dt, opt.seed);
    write_file(join(opt.out_dir, "raster.csv").string(), write_raster_csv(raster));

    // simulate
    const SimulationRecording rec_int = evolve(cfg.config, raster, opt.record);
    write_file(join(opt.out_dir, "recording_int.csv").string(),
               write_recording_csv(rec_int));
    write_file(join(opt.out_dir, "summary_int.json").string(),
               summarize_recording(rec_int).dump(2) + "\n");

    const FloatRecording rec_float = evolve_float(spec, raster, opt.record);
    write_file(join(opt.out_dir, "recording_float.csv").string(),
               write_recording_csv(rec_float));
    write_file(join(opt.out_dir, "summary_float.json").string(),
               summarize_recording(rec_float).dump(2) + "\n");

    // compare (int traces unscaled back into float units first)
    const ComparisonReport report =
        compare_recordings(rec_float, unscale_recording(rec_int, quant.spec.scales));
    write_file(join(opt.out_dir, "report.json").string(),
               report_to_json(report).dump(2) + "\n");

    // plot data
    write_file(join(opt.out_dir, "spike_raster.csv").string(),
               write_spike_raster_csv(rec_int));
    write_file(join(opt.out_dir, "membrane_traces.csv").string(),
               write_membrane_traces_csv(rec_int));
    write_file(join(opt.out_dir, "synaptic_traces.csv").string(),
               write_synaptic_traces_csv(rec_int));

    out << "pipeline: wrote artifacts to " << opt.out_dir << "\n";
    return kExitOk;
}

}  // namespace xylokit
