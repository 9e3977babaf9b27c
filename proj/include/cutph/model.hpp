#pragma once

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cutph/tolerances.hpp"

namespace cutph {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

// Thrown when a numerical procedure fails (singular resolvent, underflow,
// non-convergence). Domain violations use std::domain_error instead.
class NumericError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Absorption-time distribution of a continuous-time absorbing Markov chain
// whose generator switches between the sub-conservative matrices T_1..T_{n+1}
// at the cut-points 0 < a_1 < ... < a_n. n = 0 is the classical PH case.
struct ContinuousCutpointModel {
    RowVector alpha;                // initial distribution over the m phases
    std::vector<Matrix> matrices;   // T_1..T_{n+1}, rates, all m x m
    std::vector<double> cutpoints;  // a_1..a_n, strictly increasing, > 0

    Eigen::Index order() const { return alpha.size(); }
    std::size_t cut_count() const { return cutpoints.size(); }
};

// Discrete analogue: sub-stochastic T_1..T_{n+1} switching at integer
// cut-points; the variable is the absorption step (1, 2, ...).
struct DiscreteCutpointModel {
    RowVector alpha;
    std::vector<Matrix> matrices;
    std::vector<long> cutpoints;  // integers >= 1, strictly increasing

    Eigen::Index order() const { return alpha.size(); }
    std::size_t cut_count() const { return cutpoints.size(); }
};

struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
    std::string to_string() const;  // one violation per line
};

ValidationReport validate(const ContinuousCutpointModel& model,
                          const Tolerances& tol = default_tolerances());
ValidationReport validate(const DiscreteCutpointModel& model,
                          const Tolerances& tol = default_tolerances());

// Exit (absorption) vector T0 = -T e of a sub-conservative rate matrix.
// Throws std::invalid_argument if T fails the structural checks.
Vector exit_vector_continuous(const Matrix& rate_matrix,
                              const Tolerances& tol = default_tolerances());

// Discrete exit vector T0 = (I - T) e of a sub-stochastic matrix.
Vector exit_vector_discrete(const Matrix& transition_matrix,
                            const Tolerances& tol = default_tolerances());

// Index h in 1..n+1 of the interval (a_{h-1}, a_h] containing x, with
// a_0 = 0 and a_{n+1} = infinity. Closed on the right: x == a_h maps to h.
// Throws std::domain_error for x <= 0.
int interval_index(double x, std::span<const double> cutpoints);
int interval_index(long k, std::span<const long> cutpoints);

// exp(M t) by scaling-and-squaring with the 13th-order diagonal Pade
// approximant; exp(M * 0) is the identity exactly. Requires finite entries
// and t >= 0 (throws std::domain_error otherwise).
Matrix matrix_exponential(const Matrix& m, double t);

// M^k by binary exponentiation, k >= 0 (M^0 = I).
Matrix matrix_power(const Matrix& m, long k);

}  // namespace cutph
