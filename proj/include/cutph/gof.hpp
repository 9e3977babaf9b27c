#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cutph/em.hpp"
#include "cutph/model.hpp"
#include "cutph/rng.hpp"

namespace cutph {

enum class GofStatistic { ks, ad };

// Two-sided one-sample Kolmogorov-Smirnov statistic against an arbitrary cdf.
double ks_statistic(std::span<const double> data,
                    const std::function<double(double)>& cdf);

// Anderson-Darling A^2; cdf values are clamped into [1e-15, 1 - 1e-15] so
// heavy-tail fits cannot blow up the log terms.
double ad_statistic(std::span<const double> data,
                    const std::function<double(double)>& cdf);

using RefitProcedure =
    std::function<ContinuousCutpointModel(const std::vector<double>&)>;

// Parametric bootstrap p-value with refitting: simulate `replicates` datasets
// of the original size from `fitted`, refit each with `refit`, and count
// replicate statistics >= the observed one. Replicate fits that throw are
// dropped; more than 5% failures is an error. replicates >= 99.
double bootstrap_pvalue(std::span<const double> data,
                        const ContinuousCutpointModel& fitted,
                        const RefitProcedure& refit, GofStatistic kind,
                        int replicates, RngSeed seed);

struct GofReport {
    double ks_statistic = 0.0;
    double ad_statistic = 0.0;
    double ks_pvalue = 1.0;
    double ad_pvalue = 1.0;
    int bootstrap_replicates = 0;
    double loglik = 0.0;
    int parameter_count = 0;
};

// Free parameters reported in comparisons: the full alpha vector plus every
// rate row including the exit column for the general structure, one rate per
// interval for the Erlang structure. Cut-points are reported separately.
int parameter_count(FitStructure structure, int phases, std::size_t cut_count);

// FNV-1a over the raw bytes of the observations, used to detect comparisons
// across different datasets.
std::uint64_t hash_data(std::span<const double> data);

struct FittedModelSummary {
    std::string label;
    FitStructure structure = FitStructure::general;
    ContinuousCutpointModel model;
    GofReport gof;
    std::uint64_t data_hash = 0;
};

struct ComparisonRow {
    std::string label;
    int params = 0;
    double loglik = 0.0;
    double ks_stat = 0.0;
    double ks_p = 0.0;
    double ad_stat = 0.0;
    double ad_p = 0.0;
};

// Rows sorted by log-likelihood descending. Throws std::domain_error if any
// summary was computed on different data than `data`.
std::vector<ComparisonRow> compare_models(
    std::span<const double> data, std::span<const FittedModelSummary> fits);

}  // namespace cutph
