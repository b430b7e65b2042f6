#include "bridgescore/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "bridgescore/errors.hpp"

namespace bridgescore {

namespace {

// Matrix ordinal -> parameter ordinal.
struct Alignment {
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;
};

Alignment align(const ModelParameters& params, const RatingsMatrix& matrix) {
    Alignment a;
    a.rows.reserve(matrix.n_raters());
    a.cols.reserve(matrix.n_notes());
    for (const auto& id : matrix.rater_ids()) {
        auto r = params.rater_ordinal(id);
        if (!r) throw IdNotFoundError("rater " + id);
        a.rows.push_back(*r);
    }
    for (const auto& id : matrix.note_ids()) {
        auto n = params.note_ordinal(id);
        if (!n) throw IdNotFoundError("note " + id);
        a.cols.push_back(*n);
    }
    return a;
}

double squared_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

// Loss, and the gradient when `grad` is non-null, in one pass over the entries.
double evaluate(const ModelParameters& p, const RatingsMatrix& m, const Alignment& a, const ScoringConfig& c,
                Gradients* grad) {
    const auto dim = static_cast<std::size_t>(p.dim());
    if (grad) {
        grad->mu = 0.0;
        grad->rater_intercepts.assign(p.n_raters(), 0.0);
        grad->note_intercepts.assign(p.n_notes(), 0.0);
        grad->rater_factors.assign(p.n_raters() * dim, 0.0);
        grad->note_factors.assign(p.n_notes() * dim, 0.0);
    }
    double total = 0.0;
    for (const RatingEntry& e : m.entries()) {
        const std::size_t u = a.rows[e.row];
        const std::size_t n = a.cols[e.column];
        const double iu = p.rater_intercepts[u];
        const double in = p.note_intercepts[n];
        const auto fu = p.rater_factor(u);
        const auto fn = p.note_factor(n);

        const double err = e.value - p.predict_at(u, n);
        total += err * err + c.lambda_i * (iu * iu + in * in + p.mu * p.mu) +
                 c.lambda_f * (squared_norm(fu) + squared_norm(fn));

        if (grad) {
            grad->mu += -2.0 * err + 2.0 * c.lambda_i * p.mu;
            grad->rater_intercepts[u] += -2.0 * err + 2.0 * c.lambda_i * iu;
            grad->note_intercepts[n] += -2.0 * err + 2.0 * c.lambda_i * in;
            for (std::size_t k = 0; k < dim; ++k) {
                grad->rater_factors[u * dim + k] += -2.0 * err * fn[k] + 2.0 * c.lambda_f * fu[k];
                grad->note_factors[n * dim + k] += -2.0 * err * fu[k] + 2.0 * c.lambda_f * fn[k];
            }
        }
    }
    return total;
}

}  // namespace

double loss(const ModelParameters& params, const RatingsMatrix& matrix, const ScoringConfig& config) {
    return evaluate(params, matrix, align(params, matrix), config, nullptr);
}

Gradients gradients(const ModelParameters& params, const RatingsMatrix& matrix, const ScoringConfig& config) {
    Gradients g;
    evaluate(params, matrix, align(params, matrix), config, &g);
    return g;
}

double rmse(const ModelParameters& params, const RatingsMatrix& matrix) {
    if (matrix.empty()) return 0.0;
    const Alignment a = align(params, matrix);
    double sse = 0.0;
    for (const RatingEntry& e : matrix.entries()) {
        const double err = e.value - params.predict_at(a.rows[e.row], a.cols[e.column]);
        sse += err * err;
    }
    return std::sqrt(sse / static_cast<double>(matrix.n_entries()));
}

std::size_t anchor_rater(const RatingsMatrix& matrix) {
    const auto& counts = matrix.ratings_per_rater();
    const auto& ids = matrix.rater_ids();
    std::size_t best = 0;
    for (std::size_t r = 1; r < counts.size(); ++r) {
        if (counts[r] > counts[best] || (counts[r] == counts[best] && ids[r] < ids[best])) best = r;
    }
    return best;
}

void negate_factors(ModelParameters& params) {
    for (double& f : params.rater_factors) f = -f;
    for (double& f : params.note_factors) f = -f;
}

TrainResult train(const RatingsMatrix& matrix, const ScoringConfig& config) {
    config.validate();
    if (matrix.empty()) throw EmptyInputError("cannot train on an empty ratings matrix");

    ModelParameters params(matrix.rater_ids(), matrix.note_ids(), config.factor_dim);
    {
        std::mt19937_64 rng(config.seed);
        std::uniform_real_distribution<double> init(-config.init_scale, config.init_scale);
        for (double& f : params.rater_factors) f = init(rng);
        for (double& f : params.note_factors) f = init(rng);
    }

    // Identity alignment: params were built from the matrix's own ids.
    Alignment ident;
    ident.rows.resize(matrix.n_raters());
    ident.cols.resize(matrix.n_notes());
    std::iota(ident.rows.begin(), ident.rows.end(), std::size_t{0});
    std::iota(ident.cols.begin(), ident.cols.end(), std::size_t{0});

    const double lr = config.learning_rate;
    const auto dim = static_cast<std::size_t>(params.dim());
    const double mu_step = lr / static_cast<double>(matrix.n_entries());
    std::vector<double> rater_step(matrix.n_raters());
    std::vector<double> note_step(matrix.n_notes());
    for (std::size_t r = 0; r < rater_step.size(); ++r)
        rater_step[r] = lr / static_cast<double>(matrix.ratings_per_rater()[r]);
    for (std::size_t n = 0; n < note_step.size(); ++n)
        note_step[n] = lr / static_cast<double>(matrix.ratings_per_note()[n]);

    TrainReport report;
    Gradients g;
    double previous = evaluate(params, matrix, ident, config, &g);
    if (!std::isfinite(previous)) throw DivergenceError(0);

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        params.mu -= mu_step * g.mu;
        for (std::size_t r = 0; r < params.n_raters(); ++r) {
            params.rater_intercepts[r] -= rater_step[r] * g.rater_intercepts[r];
            for (std::size_t k = 0; k < dim; ++k)
                params.rater_factors[r * dim + k] -= rater_step[r] * g.rater_factors[r * dim + k];
        }
        for (std::size_t n = 0; n < params.n_notes(); ++n) {
            params.note_intercepts[n] -= note_step[n] * g.note_intercepts[n];
            for (std::size_t k = 0; k < dim; ++k)
                params.note_factors[n * dim + k] -= note_step[n] * g.note_factors[n * dim + k];
        }

        const double current = evaluate(params, matrix, ident, config, &g);
        if (!std::isfinite(current) || !params.all_finite()) throw DivergenceError(epoch);
        report.loss_history.push_back(current);
        report.epochs_run = epoch;

        const double improvement = previous - current;
        if (improvement >= 0.0 && improvement < config.convergence_tolerance * previous) {
            report.converged = true;
            break;
        }
        previous = current;
    }

    const std::size_t anchor = anchor_rater(matrix);
    if (params.rater_factor(anchor)[0] < 0.0) negate_factors(params);

    report.final_loss = report.loss_history.empty() ? previous : report.loss_history.back();
    report.rmse_train = rmse(params, matrix);
    return {std::move(params), std::move(report)};
}

std::pair<std::vector<Rating>, std::vector<Rating>> holdout_split(std::span<const Rating> ratings,
                                                                  double holdout_fraction,
                                                                  std::uint64_t seed) {
    if (!(holdout_fraction >= 0.0 && holdout_fraction <= 1.0)) {
        throw InvalidInputError("holdout fraction must lie in [0, 1]");
    }
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution pick(holdout_fraction);
    std::pair<std::vector<Rating>, std::vector<Rating>> out;
    for (const Rating& r : ratings) (pick(rng) ? out.second : out.first).push_back(r);
    return out;
}

}  // namespace bridgescore
