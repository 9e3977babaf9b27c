#include "cutph/discrete.hpp"

#include <cmath>

namespace cutph {

DiscretePrefixCache::DiscretePrefixCache(const DiscreteCutpointModel& model) {
    const Eigen::Index m = model.order();
    const std::size_t pieces = model.cutpoints.size() + 1;
    prefixes_.reserve(pieces);
    alpha_prefixes_.reserve(pieces);
    prefixes_.push_back(Matrix::Identity(m, m));
    alpha_prefixes_.push_back(model.alpha);
    long a_prev = 0;
    for (std::size_t j = 0; j + 1 < pieces; ++j) {
        const long gap = model.cutpoints[j] - a_prev;
        prefixes_.push_back(prefixes_.back() *
                            matrix_power(model.matrices[j], gap));
        alpha_prefixes_.push_back(model.alpha * prefixes_.back());
        a_prev = model.cutpoints[j];
    }
}

namespace {
const DiscreteCutpointModel& checked(const DiscreteCutpointModel& model) {
    const ValidationReport report = validate(model);
    if (!report.ok())
        throw std::invalid_argument("invalid discrete model:\n" +
                                    report.to_string());
    return model;
}
}  // namespace

DiscreteMeasures::DiscreteMeasures(DiscreteCutpointModel model)
    : model_(std::move(model)), cache_(checked(model_)) {
    const Eigen::Index m = model_.order();
    for (const Matrix& t : model_.matrices)
        exits_.push_back((Matrix::Identity(m, m) - t) * Vector::Ones(m));
}

double DiscreteMeasures::pmf(long k) const {
    const int j = interval_index(k, model_.cutpoints);
    const long a_prev = j > 1 ? model_.cutpoints[j - 2] : 0;
    const Vector right =
        matrix_power(model_.matrices[j - 1], k - a_prev - 1) * exits_[j - 1];
    return cache_.alpha_prefix(j).dot(right);
}

double DiscreteMeasures::survival(long k) const {
    if (k < 0) throw std::domain_error("survival requires k >= 0");
    if (k == 0) return 1.0;
    const int j = interval_index(k, model_.cutpoints);
    const long a_prev = j > 1 ? model_.cutpoints[j - 2] : 0;
    const Vector right = matrix_power(model_.matrices[j - 1], k - a_prev) *
                         Vector::Ones(model_.order());
    return cache_.alpha_prefix(j).dot(right);
}

double DiscreteMeasures::cdf(long k) const {
    if (k < 0) throw std::domain_error("cdf requires k >= 0");
    return 1.0 - survival(k);
}

double DiscreteMeasures::pgf(double z) const {
    if (std::abs(z) > 1.0) throw std::domain_error("pgf requires |z| <= 1");
    const Eigen::Index m = model_.order();
    const std::size_t pieces = model_.matrices.size();
    std::vector<Vector> resolvents(pieces);  // (I - z T_h)^{-1} T_h^0
    for (std::size_t h = 0; h < pieces; ++h) {
        const Matrix shifted = Matrix::Identity(m, m) - z * model_.matrices[h];
        resolvents[h] = shifted.partialPivLu().solve(exits_[h]);
        if (!resolvents[h].allFinite())
            throw NumericError("pgf: singular I - zT_h at h = " +
                               std::to_string(h + 1));
    }
    double result = z * model_.alpha.dot(resolvents[0]);
    for (std::size_t i = 1; i < pieces; ++i) {
        const long a_i = model_.cutpoints[i - 1];
        result += std::pow(z, static_cast<double>(a_i + 1)) *
                  cache_.alpha_prefix(i + 1).dot(resolvents[i] - resolvents[i - 1]);
    }
    return result;
}

double DiscreteMeasures::mean() const {
    const Eigen::Index m = model_.order();
    const Vector ones = Vector::Ones(m);
    const std::size_t pieces = model_.matrices.size();
    std::vector<Vector> u(pieces);  // (I - T_h)^{-1} e
    for (std::size_t h = 0; h < pieces; ++h) {
        const Matrix i_minus_t = Matrix::Identity(m, m) - model_.matrices[h];
        u[h] = i_minus_t.partialPivLu().solve(ones);
        if (!u[h].allFinite())
            throw NumericError("mean: singular I - T_h at h = " +
                               std::to_string(h + 1));
    }
    double result = model_.alpha.dot(u[0]);
    for (std::size_t i = 1; i < pieces; ++i)
        result += cache_.alpha_prefix(i + 1).dot(u[i] - u[i - 1]);
    return result;
}

double DiscreteMeasures::factorial_moment2() const {
    // E[X(X-1)] = 2 alpha U_1^2 T_1 e
    //           + 2 sum_i alpha Q_{i+1} [U_{i+1}(a_i I + U_{i+1} T_{i+1})
    //                                    - U_i(a_i I + U_i T_i)] e,
    // with U_h = (I - T_h)^{-1}. Using U T e = U e - e, the bracket times e
    // reduces to a_i (u_{i+1} - u_i) + (w_{i+1} - w_i) with u_h = U_h e and
    // w_h = U_h (u_h - e).
    const Eigen::Index m = model_.order();
    const Vector ones = Vector::Ones(m);
    const std::size_t pieces = model_.matrices.size();
    std::vector<Vector> u(pieces), w(pieces);
    for (std::size_t h = 0; h < pieces; ++h) {
        const Matrix i_minus_t = Matrix::Identity(m, m) - model_.matrices[h];
        Eigen::PartialPivLU<Matrix> lu(i_minus_t);
        u[h] = lu.solve(ones);
        w[h] = lu.solve(Vector(u[h] - ones));
        if (!w[h].allFinite())
            throw NumericError("factorial_moment2: singular I - T_h at h = " +
                               std::to_string(h + 1));
    }
    double result = 2.0 * model_.alpha.dot(w[0]);
    for (std::size_t i = 1; i < pieces; ++i) {
        const double a_i = static_cast<double>(model_.cutpoints[i - 1]);
        const Vector bracket = a_i * (u[i] - u[i - 1]) + (w[i] - w[i - 1]);
        result += 2.0 * cache_.alpha_prefix(i + 1).dot(bracket);
    }
    return result;
}

double DiscreteMeasures::variance() const {
    const double mu = mean();
    return factorial_moment2() + mu - mu * mu;
}

double pmf(const DiscreteCutpointModel& model, long k) {
    return DiscreteMeasures(model).pmf(k);
}
double cdf_k(const DiscreteCutpointModel& model, long k) {
    return DiscreteMeasures(model).cdf(k);
}
double survival_k(const DiscreteCutpointModel& model, long k) {
    return DiscreteMeasures(model).survival(k);
}
double pgf(const DiscreteCutpointModel& model, double z) {
    return DiscreteMeasures(model).pgf(z);
}
double mean_discrete(const DiscreteCutpointModel& model) {
    return DiscreteMeasures(model).mean();
}
double factorial_moment2(const DiscreteCutpointModel& model) {
    return DiscreteMeasures(model).factorial_moment2();
}

}  // namespace cutph
