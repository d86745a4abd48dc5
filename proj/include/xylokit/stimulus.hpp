#pragma once

#include <cstdint>
#include <vector>

#include "xylokit/raster.hpp"

namespace xylokit {

/// Deterministic Poisson raster: counts[t][c] ~ Poisson(rates[c] * dt),
/// clamped to the hardware limit of 15 events per channel per step. Samples
/// are drawn by Knuth's multiplication method from one SplitMix64 stream
/// advanced in row-major (t, c) order; lambda > 30 short-circuits to the
/// clamp without consuming draws. Identical arguments give identical rasters
/// on any platform. Throws DomainError on a negative rate, negative step
/// count or non-positive dt.
InputRaster poisson_raster(const std::vector<double>& rates, int steps, double dt,
                           std::uint64_t seed);

}  // namespace xylokit
