#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "xylokit/compare.hpp"
#include "xylokit/hwconfig.hpp"
#include "xylokit/sim_float.hpp"
#include "xylokit/sim_int.hpp"

namespace xylokit {

/// Process exit codes shared by the pipeline and the CLI.
enum ExitCode : int {
    kExitOk = 0,
    kExitValidationFailure = 2,
    kExitParseError = 3,
    kExitInternalError = 4,
};

struct PipelineOptions {
    std::string network_path;
    std::string out_dir = "out";
    double dt = 1e-3;             // seconds
    std::uint64_t seed = 1;
    int steps = 100;
    std::vector<double> rates;    // Hz; empty = 100 Hz per input channel
    std::string quant_method = "global";  // "global" | "channel"
    bool record = true;
};

/// Full build -> map -> quantize -> validate -> stimulate -> simulate ->
/// compare flow. Writes spec.json, qspec.json, config.xcfg.json, raster.csv,
/// both recordings with summaries, report.json and the plot-data CSVs into
/// out_dir. Returns kExitOk, or kExitValidationFailure after printing the
/// detailed message when a stage rejects the network. Parse failures throw
/// ParseError with the stage name.
int run_pipeline(const PipelineOptions& options, std::ostream& out,
                 std::ostream& err);

/// Plot-data emitters (spike raster, membrane traces, synaptic traces).
std::string write_spike_raster_csv(const SimulationRecording& rec);
std::string write_membrane_traces_csv(const SimulationRecording& rec);
std::string write_synaptic_traces_csv(const SimulationRecording& rec);

/// Small file helpers shared with the CLI.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace xylokit
