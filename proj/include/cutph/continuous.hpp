#pragma once

#include <cstddef>
#include <vector>

#include "cutph/model.hpp"

namespace cutph {

// Left-to-right products P_j = exp(T_1 (a_1 - a_0)) ... exp(T_{j-1} (a_{j-1} - a_{j-2}))
// for j = 1..n+1 with P_1 = I, plus the corresponding rows alpha * P_j.
// Matrices do not commute, so the order is fixed.
class PrefixProductCache {
  public:
    explicit PrefixProductCache(const ContinuousCutpointModel& model);

    // 1-based interval index j in 1..n+1.
    const Matrix& prefix(std::size_t j) const { return prefixes_[j - 1]; }
    const RowVector& alpha_prefix(std::size_t j) const {
        return alpha_prefixes_[j - 1];
    }
    std::size_t size() const { return prefixes_.size(); }

  private:
    std::vector<Matrix> prefixes_;
    std::vector<RowVector> alpha_prefixes_;
};

// Closed-form measures of a continuous cut-point model. The prefix cache is
// built once at construction and shared by all evaluations; instances are
// immutable and safe to use concurrently.
class ContinuousMeasures {
  public:
    // Validates the model; throws std::invalid_argument listing violations.
    explicit ContinuousMeasures(ContinuousCutpointModel model);

    double pdf(double x) const;
    double cdf(double x) const;
    // Computed from the matrix form directly, never as 1 - cdf, so deep
    // tails do not cancel.
    double survival(double x) const;
    double cumulative_hazard(double x) const;  // -log survival
    double laplace_transform(double s) const;
    double mean() const;
    double second_moment() const;
    double variance() const;
    // Smallest x with cdf(x) >= p, by bracketing + bisection.
    double quantile(double p) const;

    const ContinuousCutpointModel& model() const { return model_; }
    const PrefixProductCache& cache() const { return cache_; }
    const Vector& exit_vector(std::size_t h) const { return exits_[h - 1]; }

  private:
    ContinuousCutpointModel model_;
    PrefixProductCache cache_;
    std::vector<Vector> exits_;
};

// Convenience wrappers; each call builds the prefix cache, so prefer
// ContinuousMeasures when evaluating repeatedly.
double pdf(const ContinuousCutpointModel& model, double x);
double cdf(const ContinuousCutpointModel& model, double x);
double survival(const ContinuousCutpointModel& model, double x);
double cumulative_hazard(const ContinuousCutpointModel& model, double x);
double laplace_transform(const ContinuousCutpointModel& model, double s);
double mean(const ContinuousCutpointModel& model);
double second_moment(const ContinuousCutpointModel& model);
double variance(const ContinuousCutpointModel& model);

}  // namespace cutph
