#include "cutph/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cutph {

namespace {

constexpr std::size_t kMaxEvents = 10'000'000;

std::vector<Vector> continuous_exits(const ContinuousCutpointModel& model) {
    std::vector<Vector> exits;
    exits.reserve(model.matrices.size());
    for (const Matrix& t : model.matrices)
        exits.push_back(-t * Vector::Ones(model.order()));
    return exits;
}

// Core chain walk shared by the path and bulk samplers.
SamplePath walk_continuous(const ContinuousCutpointModel& model,
                           const std::vector<Vector>& exits, Rng& rng) {
    const Eigen::Index m = model.order();
    const std::size_t n = model.cutpoints.size();

    SamplePath path;
    std::vector<double> probs(static_cast<std::size_t>(m) + 1);

    int state = rng.categorical(model.alpha.data(), static_cast<int>(m));
    double now = 0.0;
    double segment_start = 0.0;
    std::size_t h = 0;  // 0-based interval of the running sojourn

    for (std::size_t events = 0; events < kMaxEvents; ++events) {
        const Matrix& t = model.matrices[h];
        const double rate = -t(state, state);
        const double hold = rng.exponential(rate);
        const double next_cut =
            h < n ? model.cutpoints[h] : std::numeric_limits<double>::infinity();

        if (now + hold > next_cut) {
            // Truncate at the cut-point and continue in the same state under
            // the next matrix; the merged segment keeps accumulating.
            now = next_cut;
            ++h;
            continue;
        }
        now += hold;

        // Jump: exit with probability t0_i / rate, otherwise to phase j with
        // probability t_ij / rate.
        double total = exits[h][state];
        probs[0] = exits[h][state];
        int filled = 1;
        for (Eigen::Index j = 0; j < m; ++j) {
            if (j == state) continue;
            probs[filled++] = t(state, j);
            total += t(state, j);
        }
        for (int i = 0; i < filled; ++i) probs[i] /= total;
        const int pick = rng.categorical(probs.data(), filled);

        if (pick == 0) {
            path.segments.push_back({state + 1, now - segment_start});
            path.total = now;
            return path;
        }
        int next_state = pick - 1;
        if (next_state >= state) ++next_state;  // skip the diagonal slot
        path.segments.push_back({state + 1, now - segment_start});
        segment_start = now;
        state = next_state;
    }
    throw NumericError("sample_path_continuous: no absorption within 1e7 events");
}

}  // namespace

SamplePath sample_path_continuous(const ContinuousCutpointModel& model,
                                  RngSeed seed) {
    const ValidationReport report = validate(model);
    if (!report.ok())
        throw std::invalid_argument("invalid continuous model:\n" +
                                    report.to_string());
    Rng rng(seed);
    const std::vector<Vector> exits = continuous_exits(model);
    return walk_continuous(model, exits, rng);
}

std::vector<double> sample_continuous(const ContinuousCutpointModel& model,
                                      RngSeed seed, std::size_t count) {
    const ValidationReport report = validate(model);
    if (!report.ok())
        throw std::invalid_argument("invalid continuous model:\n" +
                                    report.to_string());
    std::vector<double> out;
    out.reserve(count);
    const std::vector<Vector> exits = continuous_exits(model);
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng = Rng::substream(seed, i);
        out.push_back(walk_continuous(model, exits, rng).total);
    }
    return out;
}

std::vector<long> sample_discrete(const DiscreteCutpointModel& model,
                                  RngSeed seed, std::size_t count) {
    const ValidationReport report = validate(model);
    if (!report.ok())
        throw std::invalid_argument("invalid discrete model:\n" +
                                    report.to_string());
    const Eigen::Index m = model.order();
    std::vector<Vector> exits;
    for (const Matrix& t : model.matrices)
        exits.push_back((Matrix::Identity(m, m) - t) * Vector::Ones(m));

    std::vector<long> out;
    out.reserve(count);
    std::vector<double> probs(static_cast<std::size_t>(m) + 1);
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng = Rng::substream(seed, i);
        int state = rng.categorical(model.alpha.data(), static_cast<int>(m));
        for (long step = 1;; ++step) {
            if (static_cast<std::size_t>(step) > kMaxEvents)
                throw NumericError("sample_discrete: no absorption within 1e7 steps");
            const int h = interval_index(step, model.cutpoints) - 1;
            const Matrix& t = model.matrices[h];
            probs[0] = exits[h][state];
            for (Eigen::Index j = 0; j < m; ++j)
                probs[1 + j] = t(state, j);
            const int pick = rng.categorical(probs.data(), static_cast<int>(m) + 1);
            if (pick == 0) {
                out.push_back(step);
                break;
            }
            state = pick - 1;
        }
    }
    return out;
}

std::vector<double> generate_mixture_dataset(RngSeed seed, std::size_t size) {
    std::vector<double> out;
    out.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        Rng rng = Rng::substream(seed, i);
        const double u = rng.uniform01();
        if (u <= 0.33)
            out.push_back(rng.gamma_integer_shape(20, 0.1));
        else if (u <= 0.66)
            out.push_back(rng.weibull(4.0, 0.8));
        else
            out.push_back(rng.lognormal(1.2, 0.08));
    }
    return out;
}

std::vector<double> generate_frechet_dataset(RngSeed seed, std::size_t size) {
    std::vector<double> out;
    out.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        Rng rng = Rng::substream(seed, i);
        out.push_back(rng.frechet(0.0, 0.5, 2.0));
    }
    return out;
}

}  // namespace cutph
