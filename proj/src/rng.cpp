#include "cutph/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cutph {

std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Rng Rng::substream(RngSeed master_seed, std::uint64_t index) {
    // (index+1)-th SplitMix64 output, computed directly: the SplitMix64 state
    // after k steps is seed + k * golden-gamma, so no walk is needed.
    std::uint64_t state = master_seed + index * 0x9E3779B97F4A7C15ULL;
    return Rng(splitmix64_next(state));
}

double Rng::uniform01() {
    // 53-bit mantissa, shifted into the open interval.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::exponential(double rate) {
    if (!(rate > 0.0)) throw std::domain_error("exponential requires rate > 0");
    return -std::log(uniform01()) / rate;
}

double Rng::normal(double mean, double stddev) {
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * radius * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::gamma_integer_shape(int shape, double scale) {
    if (shape < 1) throw std::domain_error("gamma_integer_shape requires shape >= 1");
    double log_product = 0.0;
    for (int i = 0; i < shape; ++i) log_product += std::log(uniform01());
    return -scale * log_product;
}

double Rng::weibull(double shape, double scale) {
    return scale * std::pow(-std::log(uniform01()), 1.0 / shape);
}

double Rng::lognormal(double meanlog, double sdlog) {
    return std::exp(normal(meanlog, sdlog));
}

double Rng::frechet(double location, double scale, double shape) {
    return location + scale * std::pow(-std::log(uniform01()), -1.0 / shape);
}

int Rng::categorical(const double* probabilities, int count) {
    const double u = uniform01();
    double cum = 0.0;
    for (int i = 0; i < count; ++i) {
        cum += probabilities[i];
        if (u <= cum) return i;
    }
    return count - 1;  // guard against rounding in the cumulative sum
}

}  // namespace cutph
