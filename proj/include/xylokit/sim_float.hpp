#pragma once

#include "xylokit/mapper.hpp"
#include "xylokit/raster.hpp"
#include "xylokit/recording.hpp"

namespace xylokit {

/// Floating-point reference simulation of the mapped (pre-quantization)
/// network. The step structure is identical to the integer simulator, but
/// decay multiplies the state by alpha = 1 - 2^-dash(tau, dt) with no linear
/// floor and no saturation, so float-vs-int divergence isolates quantization
/// and saturation effects rather than decay-model mismatch. Spike counts use
/// the hardware clamps (31 hidden, 1 output) with subtractive reset.
FloatRecording evolve_float(const FloatSpecification& spec, const InputRaster& raster,
                            bool record = true);

}  // namespace xylokit
