#pragma once

#include <Eigen/Dense>

#include <string>

#include "xylokit/errors.hpp"

namespace xylokit {

/// Dense per-timestep event counts, one column per input channel. Hardware
/// accepts at most 15 events per channel per step.
struct InputRaster {
    Eigen::MatrixXi counts;  // steps x channels

    int steps() const { return static_cast<int>(counts.rows()); }
    int channels() const { return static_cast<int>(counts.cols()); }
};

/// CSV codec, schema `t,channel,count`, one row per entry in row-major
/// order. Reading accepts missing entries as zero.
std::string write_raster_csv(const InputRaster& raster);
InputRaster read_raster_csv(const std::string& text);

}  // namespace xylokit
