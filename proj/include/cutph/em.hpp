#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cutph/continuous.hpp"
#include "cutph/model.hpp"
#include "cutph/rng.hpp"

namespace cutph {

// Expected complete-data sufficient statistics accumulated by the E-step.
struct SufficientStats {
    Vector starts;              // B_i: expected chains starting in phase i
    Matrix occupation;          // Z_{i,h}: expected time in phase i, interval h
    std::vector<Matrix> jumps;  // N_{ij,h} per interval; diagonal unused
    Matrix absorptions;         // N_{i,m+1,h}: expected exits in interval h

    Eigen::Index order() const { return starts.size(); }
    std::size_t pieces() const { return jumps.size(); }
};

enum class FitStructure { general, erlang };

struct FitConfig {
    FitStructure structure = FitStructure::general;
    int phases = 1;
    std::vector<double> cutpoints;  // fixed during the EM run
    double epsilon = 1e-6;          // stopping threshold on the parameter change
    int max_iterations = 5000;
    std::optional<ContinuousCutpointModel> seed_model;
    RngSeed seed = 0;          // drives random initialization
    int quadrature_nodes = 64; // Gauss-Legendre nodes per (sub)interval
};

struct FitResult {
    ContinuousCutpointModel model;
    double log_likelihood = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> loglik_trace;  // seed model first, then per iteration
};

// Fit failure that still carries the log-likelihood trace up to the failure.
class FitError : public NumericError {
  public:
    FitError(const std::string& message, std::vector<double> trace)
        : NumericError(message), loglik_trace(std::move(trace)) {}
    std::vector<double> loglik_trace;
};

// Sum of log pdf values; returns -infinity if any pdf underflows to zero.
// Non-positive observations are a domain error.
double log_likelihood(std::span<const double> data,
                      const ContinuousCutpointModel& model);

// Row vector of phase-occupancy weights at time y: alpha P_j exp(T_j (y - a_{j-1})).
// Its entries sum to survival(y).
RowVector forward_vector(const ContinuousCutpointModel& model, double y);

// Column vector of absorption-density contributions per starting phase;
// alpha . backward_vector(y) equals pdf(y).
Vector backward_vector(const ContinuousCutpointModel& model, double y);

// Absorption density at y conditional on occupying each phase at the start of
// a window that spends x time units under T_h: exp(T_h x) followed by the
// remaining intervals up to y. Requires y in interval h or later.
Vector failure_vector(const ContinuousCutpointModel& model, double x, double y,
                      int h);

// c_ij(y, h): the occupancy-to-absorption convolution over interval h for an
// observation absorbed at y. Zero matrix when y <= a_{h-1}. Gauss-Legendre
// with the given node count.
Matrix flow_integral(const ContinuousCutpointModel& model, double y, int h,
                     int quadrature_nodes = 64);

SufficientStats e_step(std::span<const double> data,
                       const ContinuousCutpointModel& model,
                       int quadrature_nodes = 64);

// Complete-data MLEs from the expected statistics. Rows of interval h whose
// expected occupation is numerically zero carry forward from `current`, which
// keeps the output valid and the ascent property intact.
ContinuousCutpointModel m_step(const SufficientStats& stats,
                               std::size_t sample_size,
                               const ContinuousCutpointModel& current);

FitResult fit(std::span<const double> data, const FitConfig& config);

// Erlang structure: alpha = (1, 0, ..., 0) and each T_h bidiagonal with one
// rate; the M-step ties the rate as total expected events over total expected
// exposure in the interval. The E-step is the generic one.
FitResult fit_erlang(std::span<const double> data, const FitConfig& config);

struct GridSearchRow {
    std::vector<double> cutpoints;
    double log_likelihood = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct GridSearchResult {
    FitResult best;
    std::vector<GridSearchRow> table;  // sorted by log-likelihood descending
};

// Runs one fit per admissible (strictly increasing) combination of the
// candidate grids. Ties break toward the lexicographically smallest tuple.
GridSearchResult grid_search_cutpoints(
    std::span<const double> data,
    const std::vector<std::vector<double>>& candidate_grids,
    const FitConfig& config);

// Bidiagonal single-rate model used by the Erlang structure.
ContinuousCutpointModel make_erlang_model(std::span<const double> rates,
                                          int phases,
                                          std::span<const double> cutpoints);

// True if the model has the Erlang shape expected by fit_erlang.
bool is_erlang_model(const ContinuousCutpointModel& model);

}  // namespace cutph
