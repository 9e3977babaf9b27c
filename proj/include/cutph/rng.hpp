#pragma once

#include <cstdint>
#include <random>

namespace cutph {

using RngSeed = std::uint64_t;

// Seedable, portable random stream. The engine is std::mt19937_64 (its output
// sequence is pinned by the standard) and every variate is derived from raw
// 64-bit draws through explicit inverse-CDF / Box-Muller transforms, so
// streams are reproducible across platforms and library versions.
//
// Stream splitting: sub-stream k of master seed s is seeded with the (k+1)-th
// output of a SplitMix64 sequence started at s. Samplers use one sub-stream
// per sample index, which makes results independent of evaluation order.
class Rng {
  public:
    explicit Rng(RngSeed seed) : engine_(seed) {}

    static Rng substream(RngSeed master_seed, std::uint64_t index);

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on the open interval (0, 1); never returns 0 or 1, so logs of
    // either u or 1-u are safe.
    double uniform01();

    double exponential(double rate);            // -ln(u) / rate
    double normal(double mean, double stddev);  // Box-Muller
    double gamma_integer_shape(int shape, double scale);  // sum of exponentials
    double weibull(double shape, double scale);
    double lognormal(double meanlog, double sdlog);
    double frechet(double location, double scale, double shape);

    // Index in [0, probabilities_size) drawn by cumulative inversion of one
    // uniform; weights must be non-negative and sum to ~1.
    int categorical(const double* probabilities, int count);

  private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64_next(std::uint64_t& state);

}  // namespace cutph
