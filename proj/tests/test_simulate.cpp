#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "cutph/continuous.hpp"
#include "cutph/discrete.hpp"
#include "cutph/em.hpp"
#include "cutph/gof.hpp"
#include "cutph/simulate.hpp"
#include "support/oracles.hpp"

using namespace cutph;

namespace {

ContinuousCutpointModel exponential_model(double rate) {
    ContinuousCutpointModel model;
    model.alpha = RowVector::Ones(1);
    model.matrices = {Matrix::Constant(1, 1, -rate)};
    return model;
}

ContinuousCutpointModel scalar_one_cut(double rate1, double rate2, double cut) {
    ContinuousCutpointModel model;
    model.alpha = RowVector::Ones(1);
    model.matrices = {Matrix::Constant(1, 1, -rate1),
                      Matrix::Constant(1, 1, -rate2)};
    model.cutpoints = {cut};
    return model;
}

}  // namespace

TEST_CASE("exponential sampling: mean within 3 standard errors") {
    const auto model = exponential_model(2.0);
    const auto sample = sample_continuous(model, 1234, 100000);
    const double se = 0.5 / std::sqrt(100000.0);
    CHECK(std::abs(oracles::sample_mean(sample) - 0.5) < 3.0 * se);
}

TEST_CASE("fixed seed gives identical paths and samples") {
    Rng rng(3);
    const auto model = oracles::random_continuous_model(rng, 3, 2);
    const SamplePath a = sample_path_continuous(model, 777);
    const SamplePath b = sample_path_continuous(model, 777);
    REQUIRE(a.segments.size() == b.segments.size());
    CHECK(a.total == b.total);
    for (std::size_t i = 0; i < a.segments.size(); ++i) {
        CHECK(a.segments[i].state == b.segments[i].state);
        CHECK(a.segments[i].sojourn == b.segments[i].sojourn);
    }
    CHECK(sample_continuous(model, 42, 50) == sample_continuous(model, 42, 50));
    CHECK(sample_continuous(model, 42, 0).empty());
}

TEST_CASE("path invariants: valid states, positive merged sojourns, exact total") {
    Rng rng(9);
    const auto model = oracles::random_continuous_model(rng, 4, 3);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const SamplePath path = sample_path_continuous(model, seed);
        REQUIRE_FALSE(path.segments.empty());
        double total = 0.0;
        for (std::size_t i = 0; i < path.segments.size(); ++i) {
            const auto& seg = path.segments[i];
            CHECK(seg.state >= 1);
            CHECK(seg.state <= 4);
            CHECK(seg.sojourn > 0.0);
            if (i > 0) CHECK(seg.state != path.segments[i - 1].state);
            total += seg.sojourn;
        }
        CHECK(std::abs(total - path.total) < 1e-12);
    }
}

TEST_CASE("one-cut empirical survival matches the hand formula") {
    const double l1 = 2.0, l2 = 0.7, a = 0.8;
    const auto model = scalar_one_cut(l1, l2, a);
    const std::size_t count = 100000;
    const auto sample = sample_continuous(model, 99, count);
    for (const double x : {1.2, 2.0, 3.5}) {
        const double expected = std::exp(-l1 * a) * std::exp(-l2 * (x - a));
        std::size_t above = 0;
        for (const double v : sample)
            if (v > x) ++above;
        const double empirical = static_cast<double>(above) / count;
        const double se = std::sqrt(expected * (1.0 - expected) / count);
        CHECK(std::abs(empirical - expected) < 3.0 * se);
    }
}

TEST_CASE("Kolmogorov distance of 1e5 samples to the closed-form cdf") {
    Rng rng(15);
    for (int trial = 0; trial < 3; ++trial) {
        const auto model = oracles::random_continuous_model(rng, 3, 2);
        const auto sample = sample_continuous(model, 1000 + trial, 100000);
        const ContinuousMeasures measures(model);
        const double d = ks_statistic(
            sample, [&measures](double x) { return measures.cdf(x); });
        CHECK(d < 0.01);
    }
}

TEST_CASE("sample variance within 3 standard errors of the closed form") {
    Rng rng(21);
    const auto model = oracles::random_continuous_model(rng, 3, 1);
    const auto sample = sample_continuous(model, 5, 100000);
    const ContinuousMeasures measures(model);
    const double var_closed = measures.variance();
    const double var_sample = oracles::sample_variance(sample);
    // standard error of the sample variance from the empirical 4th moment
    const double mean = oracles::sample_mean(sample);
    double m4 = 0.0;
    for (const double v : sample) m4 += std::pow(v - mean, 4.0);
    m4 /= static_cast<double>(sample.size());
    const double se = std::sqrt(
        (m4 - var_sample * var_sample) / static_cast<double>(sample.size()));
    CHECK(std::abs(var_sample - var_closed) < 3.0 * se);
}

TEST_CASE("discrete sampling: geometric chi-square and mean checks") {
    DiscreteCutpointModel geo;
    geo.alpha = RowVector::Ones(1);
    geo.matrices = {Matrix::Constant(1, 1, 0.3)};
    const std::size_t count = 50000;
    const auto sample = sample_discrete(geo, 2024, count);
    CHECK(sample == sample_discrete(geo, 2024, count));

    std::vector<double> observed(12, 0.0);  // bins 1..10 plus tail
    for (const long k : sample) observed[std::min<long>(k, 11)] += 1.0;
    double chi2 = 0.0;
    double tail_expected = static_cast<double>(count);
    for (long k = 1; k <= 10; ++k) {
        const double p = std::pow(0.3, static_cast<double>(k - 1)) * 0.7;
        const double expected = count * p;
        tail_expected -= expected;
        chi2 += (observed[k] - expected) * (observed[k] - expected) / expected;
    }
    chi2 += (observed[11] - tail_expected) * (observed[11] - tail_expected) /
            tail_expected;
    CHECK(chi2 < 23.209);  // chi-square 0.99 quantile, 10 degrees of freedom

    Rng rng(33);
    const auto model = oracles::random_discrete_model(rng, 3, 2);
    const auto draws = sample_discrete(model, 8, 50000);
    const DiscreteMeasures measures(model);
    std::vector<double> as_doubles(draws.begin(), draws.end());
    const double se =
        std::sqrt(measures.variance() / static_cast<double>(draws.size()));
    CHECK(std::abs(oracles::sample_mean(as_doubles) - measures.mean()) <
          3.0 * se);
}

TEST_CASE("mixture dataset: size, determinism, gamma branch mean") {
    const auto data = generate_mixture_dataset(7, 200);
    CHECK(data.size() == 200);
    CHECK(data == generate_mixture_dataset(7, 200));
    CHECK(data != generate_mixture_dataset(8, 200));

    // isolate the Gamma(shape 20, scale 0.1) branch via the documented
    // sub-stream rule: the first uniform of sub-stream i selects the branch
    const std::size_t big = 60000;
    const auto values = generate_mixture_dataset(123, big);
    std::vector<double> gamma_branch;
    for (std::size_t i = 0; i < big; ++i) {
        Rng sub = Rng::substream(123, i);
        if (sub.uniform01() <= 0.33) gamma_branch.push_back(values[i]);
    }
    REQUIRE(gamma_branch.size() > 15000);
    const double se =
        std::sqrt(20.0) * 0.1 / std::sqrt(static_cast<double>(gamma_branch.size()));
    CHECK(std::abs(oracles::sample_mean(gamma_branch) - 2.0) < 3.0 * se);
}

TEST_CASE("frechet dataset: inverse cdf identity, size, median") {
    // (-ln u)^{-1/shape} at u = e^{-1} is exactly 1, so x = scale
    const double x = 0.0 + 0.5 * std::pow(-std::log(std::exp(-1.0)), -1.0 / 2.0);
    CHECK(x == doctest::Approx(0.5).epsilon(1e-15));

    CHECK(generate_frechet_dataset(4, 200).size() == 200);

    const std::size_t big = 30000;
    auto values = generate_frechet_dataset(31, big);
    std::nth_element(values.begin(), values.begin() + big / 2, values.end());
    const double empirical_median = values[big / 2];
    const double median = 0.5 * std::pow(std::log(2.0), -0.5);
    // se of the sample median: 1 / (2 f(median) sqrt(n))
    const double pdf_at_median =
        2.0 / 0.5 * std::pow(median / 0.5, -3.0) *
        std::exp(-std::pow(median / 0.5, -2.0));
    const double se = 1.0 / (2.0 * pdf_at_median * std::sqrt(double(big)));
    CHECK(std::abs(empirical_median - median) < 3.0 * se);
}
