#include "cutph/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <utility>

namespace cutph {

namespace {

constexpr double kExposureFloor = 1e-300;  // empty-interval carry-forward cutoff
constexpr double kDensityFloor = 1e-300;   // per-observation underflow abort

// ---------------------------------------------------------------------------
// Gauss-Legendre rule on [0,1]. Nodes are mirrored so that
// nodes[n-1-k] == 1 - nodes[k] exactly; the flow integrals rely on that to
// reuse one set of exponentials for both convolution factors.
// ---------------------------------------------------------------------------
struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

QuadRule gauss_legendre01(int n) {
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // i-th largest root of the Legendre polynomial P_n on [-1,1]
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double p1 = x, p0 = 1.0, dp = 1.0;
        for (int iter = 0; iter < 100; ++iter) {
            p0 = 1.0;
            p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            if (n == 1) dp = 1.0;
            const double step = p1 / dp;
            x -= step;
            if (std::abs(step) < 1e-15) break;
        }
        p0 = 1.0;
        p1 = x;
        for (int j = 2; j <= n; ++j) {
            const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const double hi = 0.5 * (1.0 + x);
        rule.nodes[n - 1 - i] = hi;
        rule.nodes[i] = 1.0 - hi;
        rule.weights[i] = rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

// ---------------------------------------------------------------------------
// exp(T t) evaluator with a closed form for Erlang-shaped matrices
// (bidiagonal, single rate): entry (i, i+k) = e^{-lt} (lt)^k / k!. Everything
// else goes through the Pade matrix exponential.
// ---------------------------------------------------------------------------
class PieceExponential {
  public:
    explicit PieceExponential(Matrix t) : t_(std::move(t)) {
        const Eigen::Index m = t_.rows();
        rate_ = -t_(0, 0);
        erlang_ = rate_ > 0.0;
        for (Eigen::Index i = 0; erlang_ && i < m; ++i) {
            for (Eigen::Index j = 0; j < m; ++j) {
                const double expected =
                    i == j ? -rate_ : (j == i + 1 ? rate_ : 0.0);
                if (t_(i, j) != expected) {
                    erlang_ = false;
                    break;
                }
            }
        }
    }

    void eval(double time, Matrix& out) const {
        if (!erlang_) {
            out = matrix_exponential(t_, time);
            return;
        }
        const Eigen::Index m = t_.rows();
        out.setZero(m, m);
        const double lt = rate_ * time;
        if (lt < 600.0) {
            double term = std::exp(-lt);
            for (Eigen::Index k = 0; k < m; ++k) {
                for (Eigen::Index i = 0; i + k < m; ++i) out(i, i + k) = term;
                term *= lt / static_cast<double>(k + 1);
            }
        } else {
            // log-space Poisson weights for deep tails
            const double log_lt = std::log(lt);
            for (Eigen::Index k = 0; k < m; ++k) {
                const double v = std::exp(k * log_lt - lt -
                                          std::lgamma(static_cast<double>(k + 1)));
                for (Eigen::Index i = 0; i + k < m; ++i) out(i, i + k) = v;
            }
        }
    }

    bool erlang() const { return erlang_; }

  private:
    Matrix t_;
    double rate_ = 0.0;
    bool erlang_ = false;
};

// ---------------------------------------------------------------------------
// Per-iteration workspace: prefix products, exit vectors, and the node
// exponentials shared by every observation that has fully crossed an
// interval. Own-interval node exponentials are per observation because the
// integration length depends on y.
// ---------------------------------------------------------------------------
class EStepEngine {
  public:
    EStepEngine(const ContinuousCutpointModel& model, const QuadRule& rule)
        : model_(model),
          rule_(rule),
          m_(model.order()),
          pieces_(model.matrices.size()) {
        const Eigen::Index m = m_;
        exits_.reserve(pieces_);
        piece_exp_.reserve(pieces_);
        for (const Matrix& t : model.matrices) {
            exits_.push_back(-t * Vector::Ones(m));
            piece_exp_.emplace_back(t);
        }
        prefixes_.push_back(Matrix::Identity(m, m));
        alpha_rows_.push_back(model.alpha);
        Matrix scratch(m, m);
        for (std::size_t h = 0; h + 1 < pieces_; ++h) {
            piece_exp_[h].eval(width(h), scratch);
            full_exp_.push_back(scratch);
            prefixes_.push_back(prefixes_.back() * scratch);
            alpha_rows_.push_back(model.alpha * prefixes_.back());
        }
        // shared node exponentials and occupancy rows over completed intervals
        const int nodes = static_cast<int>(rule_.nodes.size());
        shared_exp_.resize(pieces_ > 0 ? pieces_ - 1 : 0);
        shared_row_.resize(shared_exp_.size());
        for (std::size_t h = 0; h + 1 < pieces_; ++h) {
            shared_exp_[h].resize(nodes, Matrix(m, m));
            shared_row_[h].resize(nodes, RowVector(m));
            for (int k = 0; k < nodes; ++k) {
                piece_exp_[h].eval(width(h) * rule_.nodes[k], shared_exp_[h][k]);
                shared_row_[h][k].noalias() = alpha_rows_[h] * shared_exp_[h][k];
            }
        }
        own_exp_.resize(nodes, Matrix(m, m));
        tails_.resize(pieces_, Vector(m));
        ey_.resize(m, m);
    }

    double lower(std::size_t h) const {
        return h == 0 ? 0.0 : model_.cutpoints[h - 1];
    }
    double width(std::size_t h) const {
        return model_.cutpoints[h] - lower(h);  // completed intervals only
    }

    // Sufficient statistics plus the log-likelihood of the current model.
    std::pair<SufficientStats, double> run(std::span<const double> data) {
        const Eigen::Index m = m_;
        Vector starts = Vector::Zero(m);
        Matrix absorptions = Matrix::Zero(m, static_cast<Eigen::Index>(pieces_));
        std::vector<Matrix> weighted_flow(pieces_, Matrix::Zero(m, m));
        double loglik = 0.0;

        for (std::size_t idx = 0; idx < data.size(); ++idx) {
            const double y = data[idx];
            const int j = interval_index(y, model_.cutpoints) - 1;  // 0-based
            const double own_len = y - lower(j);
            piece_exp_[j].eval(own_len, ey_);

            const Vector local_b = ey_ * exits_[j];
            const Vector b = prefixes_[j] * local_b;
            const double dens = model_.alpha.dot(b);
            if (!(dens > kDensityFloor)) {
                std::ostringstream msg;
                msg << "e_step: pdf underflow at observation " << idx + 1
                    << " (y = " << y << ", pdf = " << dens << ")";
                throw NumericError(msg.str());
            }
            loglik += std::log(dens);

            const RowVector occupancy = alpha_rows_[j] * ey_;
            starts.array() +=
                model_.alpha.array().transpose() * b.array() / dens;
            absorptions.col(j).array() +=
                exits_[j].array() * occupancy.array().transpose() / dens;

            // tails: f(x, y, h) = exp(T_h x) . tails_[h]
            tails_[j] = exits_[j];
            if (j >= 1) tails_[j - 1] = local_b;
            for (int h = j - 2; h >= 0; --h)
                tails_[h].noalias() = full_exp_[h + 1] * tails_[h + 1];

            for (int h = 0; h <= j; ++h)
                add_flow(h, h == j ? own_len : width(h), h == j, 1.0 / dens,
                         weighted_flow[h]);
        }

        SufficientStats stats;
        stats.starts = std::move(starts);
        stats.occupation = Matrix::Zero(m, static_cast<Eigen::Index>(pieces_));
        stats.absorptions = std::move(absorptions);
        stats.jumps.reserve(pieces_);
        for (std::size_t h = 0; h < pieces_; ++h) {
            stats.occupation.col(h) = weighted_flow[h].diagonal();
            Matrix n_h = model_.matrices[h].cwiseProduct(weighted_flow[h]);
            n_h.diagonal().setZero();
            stats.jumps.push_back(std::move(n_h));
        }
        return {std::move(stats), loglik};
    }

    // Undivided c(y, h) matrix for a single observation (public op path).
    Matrix flow_one(double y, int h0) {
        const Eigen::Index m = m_;
        if (y <= lower(h0)) return Matrix::Zero(m, m);
        const int j = interval_index(y, model_.cutpoints) - 1;
        const double own_len = y - lower(j);
        piece_exp_[j].eval(own_len, ey_);
        tails_[j] = exits_[j];
        if (j >= 1) tails_[j - 1] = ey_ * exits_[j];
        for (int h = j - 2; h >= 0; --h)
            tails_[h].noalias() = full_exp_[h + 1] * tails_[h + 1];
        Matrix out = Matrix::Zero(m, m);
        add_flow(h0, h0 == j ? own_len : width(h0), h0 == j, 1.0, out);
        return out;
    }

  private:
    // Accumulate scale * c(y, h) into out. For completed intervals the node
    // exponentials are the shared ones; for the observation's own interval
    // they are built here (closed form for Erlang pieces, chained Pade
    // otherwise). Node symmetry supplies exp(T (L - w_k)) as node N-1-k.
    void add_flow(int h, double len, bool own_interval, double scale,
                  Matrix& out) {
        const int nodes = static_cast<int>(rule_.nodes.size());
        if (!(len > 0.0)) return;
        if (own_interval) {
            if (piece_exp_[h].erlang()) {
                for (int k = 0; k < nodes; ++k)
                    piece_exp_[h].eval(len * rule_.nodes[k], own_exp_[k]);
            } else {
                piece_exp_[h].eval(len * rule_.nodes[0], own_exp_[0]);
                Matrix gap(m_, m_);
                for (int k = 1; k < nodes; ++k) {
                    piece_exp_[h].eval(len * (rule_.nodes[k] - rule_.nodes[k - 1]),
                                       gap);
                    own_exp_[k].noalias() = own_exp_[k - 1] * gap;
                }
            }
        }
        const auto& exps = own_interval ? own_exp_ : shared_exp_[h];
        for (int k = 0; k < nodes; ++k) {
            const double w = scale * len * rule_.weights[k];
            const Vector col = exps[nodes - 1 - k] * tails_[h];
            if (own_interval) {
                const RowVector row = alpha_rows_[h] * exps[k];
                out.noalias() += w * (row.transpose() * col.transpose());
            } else {
                out.noalias() +=
                    w * (shared_row_[h][k].transpose() * col.transpose());
            }
        }
    }

    const ContinuousCutpointModel& model_;
    const QuadRule& rule_;
    Eigen::Index m_;
    std::size_t pieces_;
    std::vector<Vector> exits_;
    std::vector<PieceExponential> piece_exp_;
    std::vector<Matrix> prefixes_;
    std::vector<RowVector> alpha_rows_;
    std::vector<Matrix> full_exp_;  // exp(T_h width(h)) for h < n
    std::vector<std::vector<Matrix>> shared_exp_;
    std::vector<std::vector<RowVector>> shared_row_;
    std::vector<Matrix> own_exp_;
    std::vector<Vector> tails_;
    Matrix ey_;
};

const ContinuousCutpointModel& require_valid(
    const ContinuousCutpointModel& model) {
    const ValidationReport report = validate(model);
    if (!report.ok())
        throw std::invalid_argument("invalid continuous model:\n" +
                                    report.to_string());
    return model;
}

void require_positive_data(std::span<const double> data) {
    if (data.empty()) throw std::domain_error("data must be non-empty");
    for (std::size_t i = 0; i < data.size(); ++i)
        if (!(data[i] > 0.0))
            throw std::domain_error("observation " + std::to_string(i + 1) +
                                    " is not positive");
}

}  // namespace

double log_likelihood(std::span<const double> data,
                      const ContinuousCutpointModel& model) {
    require_positive_data(data);
    const ContinuousMeasures measures(model);
    double sum = 0.0;
    for (const double y : data) {
        const double d = measures.pdf(y);
        if (!(d > 0.0)) return -std::numeric_limits<double>::infinity();
        sum += std::log(d);
    }
    return sum;
}

RowVector forward_vector(const ContinuousCutpointModel& model, double y) {
    require_valid(model);
    const int j = interval_index(y, model.cutpoints);
    const PrefixProductCache cache(model);
    const double a_prev = j > 1 ? model.cutpoints[j - 2] : 0.0;
    return cache.alpha_prefix(j) *
           matrix_exponential(model.matrices[j - 1], y - a_prev);
}

Vector backward_vector(const ContinuousCutpointModel& model, double y) {
    require_valid(model);
    const int j = interval_index(y, model.cutpoints);
    const PrefixProductCache cache(model);
    const double a_prev = j > 1 ? model.cutpoints[j - 2] : 0.0;
    const Matrix& t = model.matrices[j - 1];
    return cache.prefix(j) * (matrix_exponential(t, y - a_prev) *
                              (-t * Vector::Ones(model.order())));
}

Vector failure_vector(const ContinuousCutpointModel& model, double x, double y,
                      int h) {
    require_valid(model);
    if (x < 0.0) throw std::domain_error("failure_vector requires x >= 0");
    if (h < 1 || h > static_cast<int>(model.matrices.size()))
        throw std::domain_error("failure_vector: h out of range");
    const int j = interval_index(y, model.cutpoints);
    if (j < h)
        throw std::domain_error(
            "failure_vector: y lies in an interval before h");
    const Vector ones = Vector::Ones(model.order());
    Vector tail;
    if (j == h) {
        tail = -model.matrices[h - 1] * ones;
    } else {
        const double a_prev = model.cutpoints[j - 2];
        tail = matrix_exponential(model.matrices[j - 1], y - a_prev) *
               (-model.matrices[j - 1] * ones);
        for (int i = j - 1; i >= h + 1; --i) {
            const double gap =
                model.cutpoints[i - 1] - (i > 1 ? model.cutpoints[i - 2] : 0.0);
            tail = matrix_exponential(model.matrices[i - 1], gap) * tail;
        }
    }
    return matrix_exponential(model.matrices[h - 1], x) * tail;
}

Matrix flow_integral(const ContinuousCutpointModel& model, double y, int h,
                     int quadrature_nodes) {
    require_valid(model);
    if (!(y > 0.0)) throw std::domain_error("flow_integral requires y > 0");
    if (h < 1 || h > static_cast<int>(model.matrices.size()))
        throw std::domain_error("flow_integral: h out of range");
    if (quadrature_nodes < 1)
        throw std::domain_error("flow_integral requires quadrature_nodes >= 1");
    const QuadRule rule = gauss_legendre01(quadrature_nodes);
    EStepEngine engine(model, rule);
    Matrix out = engine.flow_one(y, h - 1);
    if (!out.allFinite())
        throw NumericError("flow_integral: non-finite result at y = " +
                           std::to_string(y) + ", h = " + std::to_string(h));
    return out;
}

SufficientStats e_step(std::span<const double> data,
                       const ContinuousCutpointModel& model,
                       int quadrature_nodes) {
    require_valid(model);
    require_positive_data(data);
    const QuadRule rule = gauss_legendre01(quadrature_nodes);
    EStepEngine engine(model, rule);
    return engine.run(data).first;
}

ContinuousCutpointModel m_step(const SufficientStats& stats,
                               std::size_t sample_size,
                               const ContinuousCutpointModel& current) {
    const Eigen::Index m = current.order();
    const std::size_t pieces = current.matrices.size();
    if (stats.order() != m || stats.pieces() != pieces)
        throw std::invalid_argument("m_step: statistics do not match the model");
    ContinuousCutpointModel next = current;
    next.alpha = stats.starts.transpose() / static_cast<double>(sample_size);
    for (std::size_t h = 0; h < pieces; ++h) {
        Matrix& t = next.matrices[h];
        for (Eigen::Index i = 0; i < m; ++i) {
            const double exposure = stats.occupation(i, h);
            if (!(exposure > kExposureFloor)) continue;  // carry forward row
            double outflow = stats.absorptions(i, h) / exposure;
            for (Eigen::Index jj = 0; jj < m; ++jj) {
                if (jj == i) continue;
                const double rate = stats.jumps[h](i, jj) / exposure;
                t(i, jj) = rate;
                outflow += rate;
            }
            if (!(outflow > 0.0)) {
                // no expected events at all: restore the previous row
                t.row(i) = current.matrices[h].row(i);
                continue;
            }
            t(i, i) = -outflow;
        }
    }
    return next;
}

ContinuousCutpointModel make_erlang_model(std::span<const double> rates,
                                          int phases,
                                          std::span<const double> cutpoints) {
    if (phases < 1) throw std::domain_error("make_erlang_model: phases >= 1");
    if (rates.size() != cutpoints.size() + 1)
        throw std::domain_error("make_erlang_model: need one rate per interval");
    ContinuousCutpointModel model;
    model.alpha = RowVector::Zero(phases);
    model.alpha[0] = 1.0;
    model.cutpoints.assign(cutpoints.begin(), cutpoints.end());
    for (const double rate : rates) {
        if (!(rate > 0.0))
            throw std::domain_error("make_erlang_model: rates must be positive");
        Matrix t = Matrix::Zero(phases, phases);
        for (int i = 0; i < phases; ++i) {
            t(i, i) = -rate;
            if (i + 1 < phases) t(i, i + 1) = rate;
        }
        model.matrices.push_back(std::move(t));
    }
    return model;
}

bool is_erlang_model(const ContinuousCutpointModel& model) {
    const Eigen::Index m = model.order();
    if (m < 1 || model.alpha[0] != 1.0) return false;
    for (Eigen::Index i = 1; i < m; ++i)
        if (model.alpha[i] != 0.0) return false;
    for (const Matrix& t : model.matrices)
        if (!PieceExponential(t).erlang()) return false;
    return true;
}

namespace {

double parameter_change(const ContinuousCutpointModel& a,
                        const ContinuousCutpointModel& b) {
    double delta = (a.alpha - b.alpha).cwiseAbs().sum();
    for (std::size_t h = 0; h < a.matrices.size(); ++h)
        delta += (a.matrices[h] - b.matrices[h]).cwiseAbs().sum();
    return delta;
}

void require_config(const FitConfig& config) {
    if (!(config.epsilon > 0.0))
        throw std::domain_error("fit: epsilon must be > 0");
    if (config.phases < 1) throw std::domain_error("fit: phases must be >= 1");
    if (config.max_iterations < 1)
        throw std::domain_error("fit: max_iterations must be >= 1");
    if (config.quadrature_nodes < 1)
        throw std::domain_error("fit: quadrature_nodes must be >= 1");
    for (std::size_t i = 0; i < config.cutpoints.size(); ++i) {
        if (!(config.cutpoints[i] > 0.0))
            throw std::domain_error("fit: cut-points must be positive");
        if (i > 0 && !(config.cutpoints[i] > config.cutpoints[i - 1]))
            throw std::domain_error("fit: cut-points must be strictly increasing");
    }
}

ContinuousCutpointModel initial_general_model(std::span<const double> data,
                                              const FitConfig& config) {
    const int m = config.phases;
    const double ybar =
        std::accumulate(data.begin(), data.end(), 0.0) / data.size();
    const double outflow = m / ybar;
    Rng rng(config.seed);
    ContinuousCutpointModel model;
    model.alpha = RowVector::Constant(m, 1.0 / m);
    model.cutpoints = config.cutpoints;
    for (std::size_t h = 0; h < config.cutpoints.size() + 1; ++h) {
        Matrix t = Matrix::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            if (m == 1) {
                t(i, i) = -outflow;
                continue;
            }
            double total = 0.0;
            std::vector<double> draws(m, 0.0);
            for (int j = 0; j < m; ++j) {
                if (j == i) continue;
                draws[j] = rng.uniform01();
                total += draws[j];
            }
            for (int j = 0; j < m; ++j)
                if (j != i) t(i, j) = 0.9 * outflow * draws[j] / total;
            t(i, i) = -outflow;  // exit rate is the remaining 10%
        }
        model.matrices.push_back(std::move(t));
    }
    return model;
}

ContinuousCutpointModel initial_erlang_model(std::span<const double> data,
                                             const FitConfig& config) {
    const double ybar =
        std::accumulate(data.begin(), data.end(), 0.0) / data.size();
    const std::size_t pieces = config.cutpoints.size() + 1;
    std::vector<double> rates(pieces);
    for (std::size_t h = 0; h < pieces; ++h) {
        const double lo = h == 0 ? 0.0 : config.cutpoints[h - 1];
        const double hi = h + 1 < pieces
                              ? config.cutpoints[h]
                              : std::numeric_limits<double>::infinity();
        double sum = 0.0;
        std::size_t count = 0;
        for (const double y : data)
            if (y > lo && y <= hi) {
                sum += y;
                ++count;
            }
        rates[h] = count > 0 ? config.phases / (sum / count)
                             : config.phases / ybar;
    }
    return make_erlang_model(rates, config.phases, config.cutpoints);
}

ContinuousCutpointModel erlang_m_step(const SufficientStats& stats,
                                      const ContinuousCutpointModel& current) {
    const std::size_t pieces = current.matrices.size();
    std::vector<double> rates(pieces);
    for (std::size_t h = 0; h < pieces; ++h) {
        const double exposure = stats.occupation.col(h).sum();
        const double events =
            stats.jumps[h].sum() + stats.absorptions.col(h).sum();
        if (exposure > kExposureFloor && events > 0.0)
            rates[h] = events / exposure;
        else
            rates[h] = -current.matrices[h](0, 0);  // carry forward
    }
    return make_erlang_model(rates, static_cast<int>(current.order()),
                             current.cutpoints);
}

FitResult run_em(std::span<const double> data, const FitConfig& config,
                 FitStructure structure) {
    require_config(config);
    require_positive_data(data);

    ContinuousCutpointModel model;
    if (config.seed_model) {
        model = *config.seed_model;
        if (model.order() != config.phases)
            throw std::invalid_argument("fit: seed model order != config phases");
        if (model.cutpoints != config.cutpoints)
            throw std::invalid_argument(
                "fit: seed model cut-points != config cut-points");
        if (structure == FitStructure::erlang && !is_erlang_model(model))
            throw std::invalid_argument(
                "fit_erlang: seed model is not Erlang-shaped");
    } else {
        model = structure == FitStructure::erlang
                    ? initial_erlang_model(data, config)
                    : initial_general_model(data, config);
    }
    require_valid(model);

    const QuadRule rule = gauss_legendre01(config.quadrature_nodes);
    std::vector<double> trace;
    trace.reserve(config.max_iterations + 2);
    bool converged = false;
    int iterations = 0;

    try {
        for (int r = 1; r <= config.max_iterations; ++r) {
            iterations = r;
            EStepEngine engine(model, rule);
            auto [stats, loglik] = engine.run(data);
            trace.push_back(loglik);
            ContinuousCutpointModel next =
                structure == FitStructure::erlang
                    ? erlang_m_step(stats, model)
                    : m_step(stats, data.size(), model);
            const double delta = parameter_change(model, next);
            model = std::move(next);
            if (delta < config.epsilon) {
                converged = true;
                break;
            }
        }
    } catch (const NumericError& err) {
        throw FitError(std::string("fit aborted: ") + err.what(),
                       std::move(trace));
    }

    FitResult result;
    result.log_likelihood = log_likelihood(data, model);
    trace.push_back(result.log_likelihood);
    result.model = std::move(model);
    result.iterations = iterations;
    result.converged = converged;
    result.loglik_trace = std::move(trace);
    return result;
}

}  // namespace

FitResult fit(std::span<const double> data, const FitConfig& config) {
    return run_em(data, config, FitStructure::general);
}

FitResult fit_erlang(std::span<const double> data, const FitConfig& config) {
    return run_em(data, config, FitStructure::erlang);
}

GridSearchResult grid_search_cutpoints(
    std::span<const double> data,
    const std::vector<std::vector<double>>& candidate_grids,
    const FitConfig& config) {
    for (const auto& grid : candidate_grids) {
        if (grid.empty())
            throw std::domain_error("grid_search: empty candidate grid");
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (!(grid[i] > grid[i - 1]))
                throw std::domain_error(
                    "grid_search: candidate grids must be strictly increasing");
    }

    GridSearchResult out;
    bool have_best = false;
    const std::size_t n = candidate_grids.size();
    std::vector<std::size_t> pick(n, 0);

    const auto advance = [&]() {
        for (std::size_t d = n; d-- > 0;) {
            if (++pick[d] < candidate_grids[d].size()) return true;
            pick[d] = 0;
        }
        return false;
    };

    // odometer over the Cartesian product, lexicographic from the smallest
    // tuple so equal log-likelihoods keep the first (smallest) combination
    do {
        std::vector<double> combo(n);
        for (std::size_t i = 0; i < n; ++i) combo[i] = candidate_grids[i][pick[i]];
        const bool admissible =
            std::adjacent_find(combo.begin(), combo.end(), [](double a, double b) {
                return !(a < b);
            }) == combo.end();
        if (!admissible) continue;
        FitConfig local = config;
        local.cutpoints = combo;
        GridSearchRow row;
        row.cutpoints = combo;
        try {
            FitResult res = config.structure == FitStructure::erlang
                                ? fit_erlang(data, local)
                                : fit(data, local);
            row.log_likelihood = res.log_likelihood;
            row.iterations = res.iterations;
            row.converged = res.converged;
            if (!have_best || res.log_likelihood > out.best.log_likelihood) {
                out.best = std::move(res);
                have_best = true;
            }
        } catch (const FitError&) {
            row.log_likelihood = -std::numeric_limits<double>::infinity();
            row.iterations = 0;
            row.converged = false;
        }
        out.table.push_back(std::move(row));
    } while (advance());

    if (out.table.empty())
        throw std::domain_error("grid_search: no admissible cut-point combination");
    if (!have_best)
        throw NumericError("grid_search: every combination failed to fit");

    std::stable_sort(out.table.begin(), out.table.end(),
                     [](const GridSearchRow& a, const GridSearchRow& b) {
                         if (a.log_likelihood != b.log_likelihood)
                             return a.log_likelihood > b.log_likelihood;
                         return a.cutpoints < b.cutpoints;
                     });
    return out;
}

}  // namespace cutph
