#pragma once

#include <cstddef>
#include <vector>

#include "cutph/model.hpp"

namespace cutph {

// Q_j = T_1^{a_1 - a_0} ... T_{j-1}^{a_{j-1} - a_{j-2}} for j = 1..n+1 with
// Q_1 = I; powers by repeated squaring, products left to right.
class DiscretePrefixCache {
  public:
    explicit DiscretePrefixCache(const DiscreteCutpointModel& model);

    const Matrix& prefix(std::size_t j) const { return prefixes_[j - 1]; }
    const RowVector& alpha_prefix(std::size_t j) const {
        return alpha_prefixes_[j - 1];
    }
    std::size_t size() const { return prefixes_.size(); }

  private:
    std::vector<Matrix> prefixes_;
    std::vector<RowVector> alpha_prefixes_;
};

// Closed-form measures of a discrete cut-point model (support 1, 2, ...).
class DiscreteMeasures {
  public:
    explicit DiscreteMeasures(DiscreteCutpointModel model);

    double pmf(long k) const;
    double cdf(long k) const;
    // Direct matrix form alpha Q_j T_j^{k - a_{j-1}} e, not 1 - cdf.
    double survival(long k) const;
    double pgf(double z) const;  // E[z^X], |z| <= 1
    double mean() const;
    double factorial_moment2() const;  // E[X(X-1)]
    double variance() const;

    const DiscreteCutpointModel& model() const { return model_; }
    const DiscretePrefixCache& cache() const { return cache_; }
    const Vector& exit_vector(std::size_t h) const { return exits_[h - 1]; }

  private:
    DiscreteCutpointModel model_;
    DiscretePrefixCache cache_;
    std::vector<Vector> exits_;
};

double pmf(const DiscreteCutpointModel& model, long k);
double cdf_k(const DiscreteCutpointModel& model, long k);
double survival_k(const DiscreteCutpointModel& model, long k);
double pgf(const DiscreteCutpointModel& model, double z);
double mean_discrete(const DiscreteCutpointModel& model);
double factorial_moment2(const DiscreteCutpointModel& model);

}  // namespace cutph
