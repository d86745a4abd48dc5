#include "xylokit/stimulus.hpp"

#include <algorithm>
#include <cmath>

#include "xylokit/prng.hpp"

namespace xylokit {

namespace {

constexpr int kCountClamp = 15;

int poisson_sample(SplitMix64& gen, double lambda) {
    if (lambda > 30.0) return kCountClamp;  // the clamp would win anyway
    const double limit = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= gen.next_unit();
    } while (p > limit);
    return std::min(k - 1, kCountClamp);
}

}  // namespace

InputRaster poisson_raster(const std::vector<double>& rates, int steps, double dt,
                           std::uint64_t seed) {
    if (steps < 0) throw DomainError("poisson_raster: steps must be non-negative");
    if (!(dt > 0.0)) throw DomainError("poisson_raster: dt must be positive");
    for (double r : rates)
        if (!(r >= 0.0)) throw DomainError("poisson_raster: rates must be non-negative");

    const int channels = static_cast<int>(rates.size());
    std::vector<double> lambdas(rates);
    for (double& l : lambdas) l *= dt;

    SplitMix64 gen(seed);
    InputRaster raster;
    raster.counts.resize(steps, channels);
    for (int t = 0; t < steps; ++t)
        for (int c = 0; c < channels; ++c)
            raster.counts(t, c) = poisson_sample(gen, lambdas[c]);
    return raster;
}

}  // namespace xylokit
