#include "cutph/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cutph {

const Tolerances& default_tolerances() {
    static const Tolerances tol{};
    return tol;
}

std::string ValidationReport::to_string() const {
    std::ostringstream out;
    for (const auto& v : violations) out << v << '\n';
    return out.str();
}

namespace {

// Residual-based nonsingularity probe: solve A x = e and inspect the
// residual relative to the matrix norm.
bool solve_is_singular(const Matrix& a, double residual_factor) {
    const Eigen::Index m = a.rows();
    const Vector e = Vector::Ones(m);
    Eigen::PartialPivLU<Matrix> lu(a);
    const Vector x = lu.solve(e);
    if (!x.allFinite()) return true;
    const double resid = (a * x - e).cwiseAbs().maxCoeff();
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    return resid > residual_factor * std::max(norm, 1.0);
}

void check_alpha(const RowVector& alpha, double structural,
                 std::vector<std::string>& out) {
    if (alpha.size() == 0) {
        out.push_back("alpha is empty");
        return;
    }
    for (Eigen::Index i = 0; i < alpha.size(); ++i) {
        if (!(alpha[i] >= 0.0))
            out.push_back("alpha entry < 0 at index " + std::to_string(i + 1));
    }
    const double sum = alpha.sum();
    if (std::abs(sum - 1.0) > structural) {
        std::ostringstream msg;
        msg << "alpha sums to " << sum << ", not 1 within " << structural;
        out.push_back(msg.str());
    }
}

template <typename Cut>
void check_cutpoints(const std::vector<Cut>& cuts, Cut lower_exclusive,
                     std::vector<std::string>& out) {
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        if (!(cuts[i] > lower_exclusive))
            out.push_back("cut-point " + std::to_string(i + 1) +
                          " is not positive");
        if (i > 0 && !(cuts[i] > cuts[i - 1]))
            out.push_back("cut-points not strictly increasing at index " +
                          std::to_string(i + 1));
    }
}

}  // namespace

ValidationReport validate(const ContinuousCutpointModel& model,
                          const Tolerances& tol) {
    ValidationReport report;
    auto& out = report.violations;
    check_alpha(model.alpha, tol.structural, out);
    if (model.matrices.size() != model.cutpoints.size() + 1) {
        out.push_back("expected " + std::to_string(model.cutpoints.size() + 1) +
                      " matrices, got " + std::to_string(model.matrices.size()));
        return report;
    }
    const Eigen::Index m = model.alpha.size();
    for (std::size_t h = 0; h < model.matrices.size(); ++h) {
        const Matrix& t = model.matrices[h];
        const std::string tag = "matrix " + std::to_string(h + 1);
        if (t.rows() != m || t.cols() != m) {
            out.push_back(tag + ": order " + std::to_string(t.rows()) + "x" +
                          std::to_string(t.cols()) + " does not match alpha");
            continue;
        }
        for (Eigen::Index i = 0; i < m; ++i) {
            if (!(t(i, i) < 0.0))
                out.push_back(tag + ": diagonal not strictly negative at row " +
                              std::to_string(i + 1));
            double row_sum = 0.0;
            for (Eigen::Index j = 0; j < m; ++j) {
                if (i != j && !(t(i, j) >= 0.0))
                    out.push_back(tag + ": off-diagonal < 0 at (" +
                                  std::to_string(i + 1) + "," +
                                  std::to_string(j + 1) + ")");
                row_sum += t(i, j);
            }
            if (row_sum > tol.structural) {
                std::ostringstream msg;
                msg << tag << ": row sum " << row_sum << " > 0 at row " << i + 1;
                out.push_back(msg.str());
            }
        }
        if (t.allFinite() && solve_is_singular(t, tol.singular_residual))
            out.push_back(tag + ": singular (solve residual check failed)");
    }
    check_cutpoints(model.cutpoints, 0.0, out);
    return report;
}

ValidationReport validate(const DiscreteCutpointModel& model,
                          const Tolerances& tol) {
    ValidationReport report;
    auto& out = report.violations;
    check_alpha(model.alpha, tol.structural, out);
    if (model.matrices.size() != model.cutpoints.size() + 1) {
        out.push_back("expected " + std::to_string(model.cutpoints.size() + 1) +
                      " matrices, got " + std::to_string(model.matrices.size()));
        return report;
    }
    const Eigen::Index m = model.alpha.size();
    for (std::size_t h = 0; h < model.matrices.size(); ++h) {
        const Matrix& t = model.matrices[h];
        const std::string tag = "matrix " + std::to_string(h + 1);
        if (t.rows() != m || t.cols() != m) {
            out.push_back(tag + ": order " + std::to_string(t.rows()) + "x" +
                          std::to_string(t.cols()) + " does not match alpha");
            continue;
        }
        for (Eigen::Index i = 0; i < m; ++i) {
            double row_sum = 0.0;
            for (Eigen::Index j = 0; j < m; ++j) {
                if (!(t(i, j) >= 0.0) || !(t(i, j) <= 1.0))
                    out.push_back(tag + ": entry outside [0,1] at (" +
                                  std::to_string(i + 1) + "," +
                                  std::to_string(j + 1) + ")");
                row_sum += t(i, j);
            }
            if (row_sum > 1.0 + tol.structural) {
                std::ostringstream msg;
                msg << tag << ": row sum " << row_sum << " > 1 at row " << i + 1;
                out.push_back(msg.str());
            }
        }
        if (t.allFinite()) {
            const Matrix i_minus_t = Matrix::Identity(m, m) - t;
            if (solve_is_singular(i_minus_t, tol.singular_residual))
                out.push_back(tag + ": I - T singular (solve residual check failed)");
        }
    }
    check_cutpoints(model.cutpoints, 0L, out);
    for (std::size_t i = 0; i < model.cutpoints.size(); ++i)
        if (model.cutpoints[i] < 1)
            out.push_back("cut-point " + std::to_string(i + 1) + " < 1");
    return report;
}

Vector exit_vector_continuous(const Matrix& rate_matrix, const Tolerances& tol) {
    ContinuousCutpointModel probe;
    probe.alpha = RowVector::Zero(rate_matrix.rows());
    if (probe.alpha.size() > 0) probe.alpha[0] = 1.0;
    probe.matrices = {rate_matrix};
    const ValidationReport report = validate(probe, tol);
    if (!report.ok())
        throw std::invalid_argument("invalid rate matrix:\n" + report.to_string());
    return -rate_matrix * Vector::Ones(rate_matrix.rows());
}

Vector exit_vector_discrete(const Matrix& transition_matrix,
                            const Tolerances& tol) {
    DiscreteCutpointModel probe;
    probe.alpha = RowVector::Zero(transition_matrix.rows());
    if (probe.alpha.size() > 0) probe.alpha[0] = 1.0;
    probe.matrices = {transition_matrix};
    const ValidationReport report = validate(probe, tol);
    if (!report.ok())
        throw std::invalid_argument("invalid sub-stochastic matrix:\n" +
                                    report.to_string());
    const Eigen::Index m = transition_matrix.rows();
    return (Matrix::Identity(m, m) - transition_matrix) * Vector::Ones(m);
}

int interval_index(double x, std::span<const double> cutpoints) {
    if (!(x > 0.0)) throw std::domain_error("interval_index requires x > 0");
    const auto it = std::lower_bound(cutpoints.begin(), cutpoints.end(), x);
    return static_cast<int>(it - cutpoints.begin()) + 1;
}

int interval_index(long k, std::span<const long> cutpoints) {
    if (k <= 0) throw std::domain_error("interval_index requires k > 0");
    const auto it = std::lower_bound(cutpoints.begin(), cutpoints.end(), k);
    return static_cast<int>(it - cutpoints.begin()) + 1;
}

namespace {

// Pade-13 numerator/denominator coefficients (Higham 2005).
constexpr double kPade13[] = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

}  // namespace

Matrix matrix_exponential(const Matrix& m, double t) {
    if (m.rows() != m.cols())
        throw std::domain_error("matrix_exponential requires a square matrix");
    if (!m.allFinite() || !std::isfinite(t))
        throw std::domain_error("matrix_exponential requires finite entries");
    if (t < 0.0) throw std::domain_error("matrix_exponential requires t >= 0");

    const Eigen::Index dim = m.rows();
    if (t == 0.0) return Matrix::Identity(dim, dim);

    Matrix a = m * t;
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    if (norm == 0.0) return Matrix::Identity(dim, dim);

    int squarings = 0;
    if (norm > kTheta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
        a *= std::ldexp(1.0, -squarings);
    }

    const Matrix identity = Matrix::Identity(dim, dim);
    const Matrix a2 = a * a;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;
    const Matrix u =
        a * (a6 * (kPade13[13] * a6 + kPade13[11] * a4 + kPade13[9] * a2) +
             kPade13[7] * a6 + kPade13[5] * a4 + kPade13[3] * a2 +
             kPade13[1] * identity);
    const Matrix v =
        a6 * (kPade13[12] * a6 + kPade13[10] * a4 + kPade13[8] * a2) +
        kPade13[6] * a6 + kPade13[4] * a4 + kPade13[2] * a2 +
        kPade13[0] * identity;

    Matrix f = (v - u).partialPivLu().solve(v + u);
    for (int i = 0; i < squarings; ++i) f = f * f;
    return f;
}

Matrix matrix_power(const Matrix& m, long k) {
    if (m.rows() != m.cols())
        throw std::domain_error("matrix_power requires a square matrix");
    if (k < 0) throw std::domain_error("matrix_power requires k >= 0");
    Matrix result = Matrix::Identity(m.rows(), m.cols());
    Matrix base = m;
    while (k > 0) {
        if (k & 1) result = result * base;
        k >>= 1;
        if (k > 0) base = base * base;
    }
    return result;
}

}  // namespace cutph
