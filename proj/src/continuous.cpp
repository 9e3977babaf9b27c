#include "cutph/continuous.hpp"

#include <cmath>
#include <limits>

namespace cutph {

PrefixProductCache::PrefixProductCache(const ContinuousCutpointModel& model) {
    const Eigen::Index m = model.order();
    const std::size_t pieces = model.cutpoints.size() + 1;
    prefixes_.reserve(pieces);
    alpha_prefixes_.reserve(pieces);
    prefixes_.push_back(Matrix::Identity(m, m));
    alpha_prefixes_.push_back(model.alpha);
    double a_prev = 0.0;
    for (std::size_t j = 0; j + 1 < pieces; ++j) {
        const double gap = model.cutpoints[j] - a_prev;
        prefixes_.push_back(prefixes_.back() *
                            matrix_exponential(model.matrices[j], gap));
        alpha_prefixes_.push_back(model.alpha * prefixes_.back());
        a_prev = model.cutpoints[j];
    }
}

namespace {
const ContinuousCutpointModel& checked(const ContinuousCutpointModel& model) {
    const ValidationReport report = validate(model);
    if (!report.ok())
        throw std::invalid_argument("invalid continuous model:\n" +
                                    report.to_string());
    return model;
}
}  // namespace

ContinuousMeasures::ContinuousMeasures(ContinuousCutpointModel model)
    : model_(std::move(model)), cache_(checked(model_)) {
    for (const Matrix& t : model_.matrices)
        exits_.push_back(-t * Vector::Ones(t.rows()));
}

namespace {
double clamp_density(double v) {
    // Tiny negative values are roundoff from the matrix products.
    if (v < 0.0 && v >= -1e-12) return 0.0;
    return v;
}
}  // namespace

double ContinuousMeasures::pdf(double x) const {
    const int j = interval_index(x, model_.cutpoints);
    const double a_prev = j > 1 ? model_.cutpoints[j - 2] : 0.0;
    const Vector right =
        matrix_exponential(model_.matrices[j - 1], x - a_prev) * exits_[j - 1];
    return clamp_density(cache_.alpha_prefix(j).dot(right));
}

double ContinuousMeasures::survival(double x) const {
    if (x < 0.0) throw std::domain_error("survival requires x >= 0");
    if (x == 0.0) return 1.0;
    const int j = interval_index(x, model_.cutpoints);
    const double a_prev = j > 1 ? model_.cutpoints[j - 2] : 0.0;
    const Vector right = matrix_exponential(model_.matrices[j - 1], x - a_prev) *
                         Vector::Ones(model_.order());
    return clamp_density(cache_.alpha_prefix(j).dot(right));
}

double ContinuousMeasures::cdf(double x) const {
    if (x < 0.0) throw std::domain_error("cdf requires x >= 0");
    return 1.0 - survival(x);
}

double ContinuousMeasures::cumulative_hazard(double x) const {
    const double s = survival(x);
    if (s <= 0.0)
        throw NumericError("cumulative_hazard: survival underflowed to 0 at x = " +
                           std::to_string(x));
    return -std::log(s);
}

double ContinuousMeasures::laplace_transform(double s) const {
    if (s < 0.0) throw std::domain_error("laplace_transform requires s >= 0");
    const Eigen::Index m = model_.order();
    const std::size_t pieces = model_.matrices.size();
    // r_h = (T_h - s I)^{-1} T_h^0
    std::vector<Vector> resolvents(pieces);
    for (std::size_t h = 0; h < pieces; ++h) {
        const Matrix shifted = model_.matrices[h] - s * Matrix::Identity(m, m);
        resolvents[h] = shifted.partialPivLu().solve(exits_[h]);
        if (!resolvents[h].allFinite())
            throw NumericError("laplace_transform: singular T_h - sI at h = " +
                               std::to_string(h + 1));
    }
    double result = -model_.alpha.dot(resolvents[0]);
    for (std::size_t i = 1; i < pieces; ++i) {
        const double a_i = model_.cutpoints[i - 1];
        result += std::exp(-s * a_i) *
                  cache_.alpha_prefix(i + 1).dot(resolvents[i - 1] - resolvents[i]);
    }
    return result;
}

double ContinuousMeasures::mean() const {
    const Eigen::Index m = model_.order();
    const Vector ones = Vector::Ones(m);
    std::vector<Vector> inv_e(model_.matrices.size());  // T_h^{-1} e
    for (std::size_t h = 0; h < model_.matrices.size(); ++h) {
        inv_e[h] = model_.matrices[h].partialPivLu().solve(ones);
        if (!inv_e[h].allFinite())
            throw NumericError("mean: singular T_h at h = " + std::to_string(h + 1));
    }
    double result = -model_.alpha.dot(inv_e[0]);
    for (std::size_t i = 1; i < model_.matrices.size(); ++i)
        result += cache_.alpha_prefix(i + 1).dot(inv_e[i - 1] - inv_e[i]);
    return result;
}

double ContinuousMeasures::second_moment() const {
    const Eigen::Index m = model_.order();
    const Vector ones = Vector::Ones(m);
    const std::size_t pieces = model_.matrices.size();
    std::vector<Vector> inv_e(pieces), inv2_e(pieces);  // T^{-1}e, T^{-2}e
    for (std::size_t h = 0; h < pieces; ++h) {
        Eigen::PartialPivLU<Matrix> lu(model_.matrices[h]);
        inv_e[h] = lu.solve(ones);
        inv2_e[h] = lu.solve(inv_e[h]);
        if (!inv2_e[h].allFinite())
            throw NumericError("second_moment: singular T_h at h = " +
                               std::to_string(h + 1));
    }
    double result = 2.0 * model_.alpha.dot(inv2_e[0]);
    for (std::size_t i = 1; i < pieces; ++i) {
        const double a_i = model_.cutpoints[i - 1];
        const Vector bracket = a_i * (inv_e[i] - inv_e[i - 1]) -
                               (inv2_e[i] - inv2_e[i - 1]);
        result -= 2.0 * cache_.alpha_prefix(i + 1).dot(bracket);
    }
    return result;
}

double ContinuousMeasures::variance() const {
    const double mu = mean();
    return second_moment() - mu * mu;
}

double ContinuousMeasures::quantile(double p) const {
    if (!(p >= 0.0) || !(p < 1.0))
        throw std::domain_error("quantile requires p in [0, 1)");
    if (p == 0.0) return 0.0;
    double hi = mean();
    if (!(hi > 0.0)) hi = 1.0;
    int guard = 0;
    while (cdf(hi) < p) {
        hi *= 2.0;
        if (++guard > 1200)
            throw NumericError("quantile: failed to bracket p = " +
                               std::to_string(p));
    }
    double lo = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) >= p)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double pdf(const ContinuousCutpointModel& model, double x) {
    return ContinuousMeasures(model).pdf(x);
}
double cdf(const ContinuousCutpointModel& model, double x) {
    return ContinuousMeasures(model).cdf(x);
}
double survival(const ContinuousCutpointModel& model, double x) {
    return ContinuousMeasures(model).survival(x);
}
double cumulative_hazard(const ContinuousCutpointModel& model, double x) {
    return ContinuousMeasures(model).cumulative_hazard(x);
}
double laplace_transform(const ContinuousCutpointModel& model, double s) {
    return ContinuousMeasures(model).laplace_transform(s);
}
double mean(const ContinuousCutpointModel& model) {
    return ContinuousMeasures(model).mean();
}
double second_moment(const ContinuousCutpointModel& model) {
    return ContinuousMeasures(model).second_moment();
}
double variance(const ContinuousCutpointModel& model) {
    return ContinuousMeasures(model).variance();
}

}  // namespace cutph
