#pragma once
// Regularized least-squares fit of the intercept + factor model.
//
// Per observed rating r_un the objective adds
//   (r_un - mu - i_u - i_n - f_u.f_n)^2
//     + lambda_i (i_u^2 + i_n^2 + mu^2) + lambda_f (|f_u|^2 + |f_n|^2)
// so every penalty is weighted by how many ratings touch the parameter.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "bridgescore/core_model.hpp"

namespace bridgescore {

struct Gradients {
    double mu = 0.0;
    std::vector<double> rater_intercepts;
    std::vector<double> note_intercepts;
    std::vector<double> rater_factors;
    std::vector<double> note_factors;
};

struct TrainReport {
    double final_loss = 0.0;
    int epochs_run = 0;
    bool converged = false;
    std::vector<double> loss_history;  // loss after each epoch
    double rmse_train = 0.0;
};

struct TrainResult {
    ModelParameters params;
    TrainReport report;
};

// Both throw IdNotFoundError when `params` lacks a rater or note of `matrix`.
double loss(const ModelParameters& params, const RatingsMatrix& matrix, const ScoringConfig& config);
Gradients gradients(const ModelParameters& params, const RatingsMatrix& matrix, const ScoringConfig& config);

double rmse(const ModelParameters& params, const RatingsMatrix& matrix);

// Full-batch gradient descent. Each parameter's step is lr * gradient / n,
// where n is the number of ratings touching it (all ratings for mu).
// Intercepts start at zero; factors are uniform in [-init_scale, init_scale].
// After fitting, factors are negated if needed so the anchor rater (most
// ratings, then smallest id) has a non-negative first factor component.
//
// Throws EmptyInputError for an empty matrix and DivergenceError when the
// loss stops being finite.
TrainResult train(const RatingsMatrix& matrix, const ScoringConfig& config);

// Index of the rater whose factor sign is fixed by train().
std::size_t anchor_rater(const RatingsMatrix& matrix);

// Negates every rater and note factor in place.
void negate_factors(ModelParameters& params);

// Seeded split of `ratings` into (train, held-out) for RMSE diagnostics.
std::pair<std::vector<Rating>, std::vector<Rating>> holdout_split(std::span<const Rating> ratings,
                                                                  double holdout_fraction,
                                                                  std::uint64_t seed);

}  // namespace bridgescore
