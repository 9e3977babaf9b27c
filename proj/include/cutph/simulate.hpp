#pragma once

#include <cstdint>
#include <vector>

#include "cutph/model.hpp"
#include "cutph/rng.hpp"

namespace cutph {

// One realization of the absorbing chain: visited states (1-based) with
// sojourn times. Same-state segments split at cut-points are merged.
struct SamplePath {
    struct Segment {
        int state;       // 1..m
        double sojourn;  // > 0
    };
    std::vector<Segment> segments;
    double total = 0.0;  // absorption time, equals the sum of sojourns
};

// Exact simulation of the piecewise-homogeneous chain: holding times are
// exponential in the current interval's rates; a holding time that crosses a
// cut-point is truncated there and the state re-draws under the next matrix
// (memorylessness makes the truncation exact).
SamplePath sample_path_continuous(const ContinuousCutpointModel& model,
                                  RngSeed seed);

// count absorption times, one RNG sub-stream per sample index.
std::vector<double> sample_continuous(const ContinuousCutpointModel& model,
                                      RngSeed seed, std::size_t count);

// Step-by-step simulation of the discrete chain; returns absorption steps.
std::vector<long> sample_discrete(const DiscreteCutpointModel& model,
                                  RngSeed seed, std::size_t count);

// Benchmark dataset: per draw, u ~ U(0,1) selects Gamma(shape 20, scale 0.1)
// for u <= 0.33, Weibull(shape 4, scale 0.8) for u <= 0.66, and
// Log-normal(meanlog 1.2, sdlog 0.08) otherwise.
std::vector<double> generate_mixture_dataset(RngSeed seed, std::size_t size);

// Frechet(location 0, scale 0.5, shape 2) via inverse CDF.
std::vector<double> generate_frechet_dataset(RngSeed seed, std::size_t size);

}  // namespace cutph
