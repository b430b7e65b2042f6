#include "bridgescore/config_io.hpp"

namespace bridgescore {

namespace {

template <typename T>
void get_if(const nlohmann::json& j, const char* key, T& field) {
    if (j.contains(key)) j.at(key).get_to(field);
}

}  // namespace

void to_json(nlohmann::json& j, const ScoringConfig& c) {
    j = {
        {"lambda_i", c.lambda_i},
        {"lambda_f", c.lambda_f},
        {"helpful_threshold", c.helpful_threshold},
        {"not_helpful_threshold", c.not_helpful_threshold},
        {"min_ratings_per_note", c.min_ratings_per_note},
        {"min_ratings_per_rater", c.min_ratings_per_rater},
        {"density_filter_fixed_point", c.density_filter_fixed_point},
        {"rater_helpfulness_min", c.rater_helpfulness_min},
        {"author_ratio_min", c.author_ratio_min},
        {"author_mean_intercept_min", c.author_mean_intercept_min},
        {"valid_rating_window_ms", c.valid_rating_window_ms},
        {"valid_rating_max_ordinal", c.valid_rating_max_ordinal},
        {"valid_ratings_before_label", c.valid_ratings_before_label},
        {"supermajority_threshold", c.supermajority_threshold},
        {"factor_dim", c.factor_dim},
        {"learning_rate", c.learning_rate},
        {"max_epochs", c.max_epochs},
        {"convergence_tolerance", c.convergence_tolerance},
        {"init_scale", c.init_scale},
        {"seed", c.seed},
    };
}

void from_json(const nlohmann::json& j, ScoringConfig& c) {
    get_if(j, "lambda_i", c.lambda_i);
    get_if(j, "lambda_f", c.lambda_f);
    get_if(j, "helpful_threshold", c.helpful_threshold);
    get_if(j, "not_helpful_threshold", c.not_helpful_threshold);
    get_if(j, "min_ratings_per_note", c.min_ratings_per_note);
    get_if(j, "min_ratings_per_rater", c.min_ratings_per_rater);
    get_if(j, "density_filter_fixed_point", c.density_filter_fixed_point);
    get_if(j, "rater_helpfulness_min", c.rater_helpfulness_min);
    get_if(j, "author_ratio_min", c.author_ratio_min);
    get_if(j, "author_mean_intercept_min", c.author_mean_intercept_min);
    get_if(j, "valid_rating_window_ms", c.valid_rating_window_ms);
    get_if(j, "valid_rating_max_ordinal", c.valid_rating_max_ordinal);
    get_if(j, "valid_ratings_before_label", c.valid_ratings_before_label);
    get_if(j, "supermajority_threshold", c.supermajority_threshold);
    get_if(j, "factor_dim", c.factor_dim);
    get_if(j, "learning_rate", c.learning_rate);
    get_if(j, "max_epochs", c.max_epochs);
    get_if(j, "convergence_tolerance", c.convergence_tolerance);
    get_if(j, "init_scale", c.init_scale);
    get_if(j, "seed", c.seed);
}

void to_json(nlohmann::json& j, const SynthConfig& c) {
    j = {
        {"n_raters_per_cluster", c.n_raters_per_cluster},
        {"n_partisan_notes_per_cluster", c.n_partisan_notes_per_cluster},
        {"n_bridging_notes", c.n_bridging_notes},
        {"n_low_quality_notes", c.n_low_quality_notes},
        {"ratings_per_rater_min", c.ratings_per_rater_min},
        {"ratings_per_rater_max", c.ratings_per_rater_max},
        {"in_cluster_helpful_prob", c.in_cluster_helpful_prob},
        {"cross_cluster_helpful_prob_partisan", c.cross_cluster_helpful_prob_partisan},
        {"helpful_prob_bridging", c.helpful_prob_bridging},
        {"helpful_prob_low_quality", c.helpful_prob_low_quality},
        {"somewhat_prob", c.somewhat_prob},
        {"own_partisan_share", c.own_partisan_share},
        {"other_partisan_share", c.other_partisan_share},
        {"min_ratings_per_note", c.min_ratings_per_note},
        {"min_ratings_per_rater", c.min_ratings_per_rater},
        {"seed", c.seed},
    };
}

void from_json(const nlohmann::json& j, SynthConfig& c) {
    get_if(j, "n_raters_per_cluster", c.n_raters_per_cluster);
    get_if(j, "n_partisan_notes_per_cluster", c.n_partisan_notes_per_cluster);
    get_if(j, "n_bridging_notes", c.n_bridging_notes);
    get_if(j, "n_low_quality_notes", c.n_low_quality_notes);
    get_if(j, "ratings_per_rater_min", c.ratings_per_rater_min);
    get_if(j, "ratings_per_rater_max", c.ratings_per_rater_max);
    get_if(j, "in_cluster_helpful_prob", c.in_cluster_helpful_prob);
    get_if(j, "cross_cluster_helpful_prob_partisan", c.cross_cluster_helpful_prob_partisan);
    get_if(j, "helpful_prob_bridging", c.helpful_prob_bridging);
    get_if(j, "helpful_prob_low_quality", c.helpful_prob_low_quality);
    get_if(j, "somewhat_prob", c.somewhat_prob);
    get_if(j, "own_partisan_share", c.own_partisan_share);
    get_if(j, "other_partisan_share", c.other_partisan_share);
    get_if(j, "min_ratings_per_note", c.min_ratings_per_note);
    get_if(j, "min_ratings_per_rater", c.min_ratings_per_rater);
    get_if(j, "seed", c.seed);
}

}  // namespace bridgescore
