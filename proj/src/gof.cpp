#include "cutph/gof.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "cutph/continuous.hpp"
#include "cutph/simulate.hpp"

namespace cutph {

namespace {

std::vector<double> sorted_copy(std::span<const double> data) {
    std::vector<double> sorted(data.begin(), data.end());
    std::stable_sort(sorted.begin(), sorted.end());
    return sorted;
}

}  // namespace

double ks_statistic(std::span<const double> data,
                    const std::function<double(double)>& cdf) {
    if (data.empty()) throw std::domain_error("ks_statistic: empty data");
    const std::vector<double> sorted = sorted_copy(data);
    const double q = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        if (!std::isfinite(f))
            throw NumericError("ks_statistic: non-finite cdf value at y = " +
                               std::to_string(sorted[i]));
        const double upper = (i + 1) / q - f;
        const double lower = f - i / q;
        d = std::max({d, upper, lower});
    }
    return d;
}

double ad_statistic(std::span<const double> data,
                    const std::function<double(double)>& cdf) {
    if (data.empty()) throw std::domain_error("ad_statistic: empty data");
    const std::vector<double> sorted = sorted_copy(data);
    const std::size_t q = sorted.size();
    std::vector<double> f(q);
    for (std::size_t i = 0; i < q; ++i) {
        const double v = cdf(sorted[i]);
        if (!std::isfinite(v))
            throw NumericError("ad_statistic: non-finite cdf value at y = " +
                               std::to_string(sorted[i]));
        f[i] = std::clamp(v, 1e-15, 1.0 - 1e-15);
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < q; ++i)
        sum += (2.0 * (i + 1) - 1.0) *
               (std::log(f[i]) + std::log1p(-f[q - 1 - i]));
    const double a2 = -static_cast<double>(q) - sum / static_cast<double>(q);
    return std::max(a2, 0.0);  // clamp pure-rounding negatives
}

double bootstrap_pvalue(std::span<const double> data,
                        const ContinuousCutpointModel& fitted,
                        const RefitProcedure& refit, GofStatistic kind,
                        int replicates, RngSeed seed) {
    if (replicates < 99)
        throw std::domain_error("bootstrap_pvalue requires replicates >= 99");
    if (data.empty()) throw std::domain_error("bootstrap_pvalue: empty data");

    const ContinuousMeasures observed_measures(fitted);
    const auto stat = [kind](std::span<const double> values,
                             const ContinuousMeasures& measures) {
        const auto cdf = [&measures](double x) { return measures.cdf(x); };
        return kind == GofStatistic::ks ? ks_statistic(values, cdf)
                                        : ad_statistic(values, cdf);
    };
    const double observed = stat(data, observed_measures);

    int exceed = 0;
    int failures = 0;
    int successes = 0;
    for (int r = 0; r < replicates; ++r) {
        const RngSeed replicate_seed = Rng::substream(seed, r).next_u64();
        const std::vector<double> simulated =
            sample_continuous(fitted, replicate_seed, data.size());
        try {
            const ContinuousCutpointModel refitted = refit(simulated);
            const double s = stat(simulated, ContinuousMeasures(refitted));
            ++successes;
            if (s >= observed) ++exceed;
        } catch (const std::exception&) {
            ++failures;
        }
    }
    if (failures * 20 > replicates)
        throw NumericError("bootstrap_pvalue: " + std::to_string(failures) +
                           " of " + std::to_string(replicates) +
                           " replicate fits failed");
    return (1.0 + exceed) / (successes + 1.0);
}

int parameter_count(FitStructure structure, int phases,
                    std::size_t cut_count) {
    const int pieces = static_cast<int>(cut_count) + 1;
    if (structure == FitStructure::erlang) return pieces;
    return phases + pieces * phases * (phases + 1);
}

std::uint64_t hash_data(std::span<const double> data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const double v : data) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xFFu;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

std::vector<ComparisonRow> compare_models(
    std::span<const double> data, std::span<const FittedModelSummary> fits) {
    const std::uint64_t expected = hash_data(data);
    std::vector<ComparisonRow> rows;
    rows.reserve(fits.size());
    for (const FittedModelSummary& summary : fits) {
        if (summary.data_hash != expected)
            throw std::domain_error("compare_models: '" + summary.label +
                                    "' was fitted on different data");
        ComparisonRow row;
        row.label = summary.label;
        row.params = parameter_count(summary.structure,
                                     static_cast<int>(summary.model.order()),
                                     summary.model.cut_count());
        row.loglik = summary.gof.loglik;
        row.ks_stat = summary.gof.ks_statistic;
        row.ks_p = summary.gof.ks_pvalue;
        row.ad_stat = summary.gof.ad_statistic;
        row.ad_p = summary.gof.ad_pvalue;
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const ComparisonRow& a, const ComparisonRow& b) {
                         return a.loglik > b.loglik;
                     });
    return rows;
}

}  // namespace cutph
