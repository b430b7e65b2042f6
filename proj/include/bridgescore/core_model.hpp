#pragma once
// Core domain types: ratings, the sparse rater x note matrix, the latent
// factor model parameters, and the note labeling rule.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace bridgescore {

using Millis = std::int64_t;

enum class RatingValue { NotHelpful, SomewhatHelpful, Helpful };

// Helpful -> 1.0, SomewhatHelpful -> 0.5, NotHelpful -> 0.0
double numeric_value(RatingValue v) noexcept;
std::string_view to_token(RatingValue v) noexcept;
std::optional<RatingValue> rating_value_from_token(std::string_view token) noexcept;

struct Rating {
    std::string rater_id;
    std::string note_id;
    RatingValue value = RatingValue::NotHelpful;
    Millis created_at = 0;

    bool operator==(const Rating&) const = default;
};

enum class Classification { Misleading, NotMisleading, Unknown };

std::string_view to_token(Classification c) noexcept;
Classification classification_from_token(std::string_view token) noexcept;

struct Note {
    std::string note_id;
    std::string author_id;
    std::string tweet_id;
    Millis created_at = 0;
    Classification classification = Classification::Unknown;
    std::string summary;

    bool operator==(const Note&) const = default;
};

// Ordered so that a higher intercept never maps to a lower label.
enum class NoteLabel { CurrentlyRatedNotHelpful = 0, NeedsMoreRatings = 1, CurrentlyRatedHelpful = 2 };

std::string_view to_token(NoteLabel label) noexcept;
std::optional<NoteLabel> note_label_from_token(std::string_view token) noexcept;

struct ScoringConfig {
    // Regularization. Intercepts are penalized five times harder than factors.
    double lambda_i = 0.15;
    double lambda_f = 0.03;

    double helpful_threshold = 0.40;
    double not_helpful_threshold = -0.08;

    // Density filters.
    int min_ratings_per_note = 5;
    int min_ratings_per_rater = 10;
    // Iterate the two density filters until nothing changes instead of one pass each.
    bool density_filter_fixed_point = false;

    // Rater and author helpfulness gates.
    double rater_helpfulness_min = 0.66;
    double author_ratio_min = 5.0;
    double author_mean_intercept_min = 0.05;
    Millis valid_rating_window_ms = 48LL * 60 * 60 * 1000;
    int valid_rating_max_ordinal = 5;
    // Later validity rule: any rating made before the note's first label was
    // published. Needs publication times; notes without one fall back to the
    // window rule.
    bool valid_ratings_before_label = false;

    // Supermajority baseline.
    double supermajority_threshold = 0.84;

    // Optimizer.
    int factor_dim = 1;
    double learning_rate = 0.05;
    int max_epochs = 2000;
    double convergence_tolerance = 1e-7;
    double init_scale = 0.05;
    std::uint64_t seed = 1;

    // Throws ConfigError on the first violated constraint.
    void validate() const;
};

struct RatingEntry {
    std::size_t row = 0;     // rater ordinal
    std::size_t column = 0;  // note ordinal
    double value = 0.0;
    Millis created_at = 0;
};

// Sparse rater x note matrix. Ordinals are assigned by first appearance in
// the input sequence.
class RatingsMatrix {
public:
    RatingsMatrix() = default;

    // Throws DuplicateError when a (rater, note) pair repeats; the reported
    // line is the 1-based position in `ratings`.
    static RatingsMatrix build(std::span<const Rating> ratings);

    std::size_t n_raters() const noexcept { return rater_ids_.size(); }
    std::size_t n_notes() const noexcept { return note_ids_.size(); }
    std::size_t n_entries() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    const std::vector<std::string>& rater_ids() const noexcept { return rater_ids_; }
    const std::vector<std::string>& note_ids() const noexcept { return note_ids_; }
    const std::vector<RatingEntry>& entries() const noexcept { return entries_; }
    const std::vector<std::size_t>& ratings_per_rater() const noexcept { return ratings_per_rater_; }
    const std::vector<std::size_t>& ratings_per_note() const noexcept { return ratings_per_note_; }

    std::optional<std::size_t> rater_ordinal(std::string_view rater_id) const;
    std::optional<std::size_t> note_ordinal(std::string_view note_id) const;

private:
    std::vector<std::string> rater_ids_;
    std::vector<std::string> note_ids_;
    std::unordered_map<std::string, std::size_t> rater_index_;
    std::unordered_map<std::string, std::size_t> note_index_;
    std::vector<RatingEntry> entries_;
    std::vector<std::size_t> ratings_per_rater_;
    std::vector<std::size_t> ratings_per_note_;
};

// mu + i_u + i_n + f_u . f_n. Factors are stored row-major with `dim`
// components per rater/note; dim is 1 unless the experimental second
// factor is enabled.
class ModelParameters {
public:
    ModelParameters() = default;
    ModelParameters(std::vector<std::string> rater_ids, std::vector<std::string> note_ids, int dim = 1);

    int dim() const noexcept { return dim_; }
    std::size_t n_raters() const noexcept { return rater_ids_.size(); }
    std::size_t n_notes() const noexcept { return note_ids_.size(); }
    const std::vector<std::string>& rater_ids() const noexcept { return rater_ids_; }
    const std::vector<std::string>& note_ids() const noexcept { return note_ids_; }

    std::optional<std::size_t> rater_ordinal(std::string_view rater_id) const;
    std::optional<std::size_t> note_ordinal(std::string_view note_id) const;

    double mu = 0.0;
    std::vector<double> rater_intercepts;
    std::vector<double> note_intercepts;
    std::vector<double> rater_factors;
    std::vector<double> note_factors;

    std::span<const double> rater_factor(std::size_t r) const;
    std::span<const double> note_factor(std::size_t n) const;
    std::span<double> rater_factor(std::size_t r);
    std::span<double> note_factor(std::size_t n);

    // Prediction by ordinal; no bounds checking beyond std::vector's.
    double predict_at(std::size_t rater, std::size_t note) const noexcept;

    bool all_finite() const noexcept;

    bool operator==(const ModelParameters& other) const;

private:
    int dim_ = 1;
    std::vector<std::string> rater_ids_;
    std::vector<std::string> note_ids_;
    std::unordered_map<std::string, std::size_t> rater_index_;
    std::unordered_map<std::string, std::size_t> note_index_;
};

struct NoteScore {
    std::string note_id;
    double intercept = 0.0;
    double factor = 0.0;
    NoteLabel label = NoteLabel::NeedsMoreRatings;
    std::size_t n_ratings = 0;
    double helpful_ratio = 0.0;

    bool operator==(const NoteScore&) const = default;
};

// Throws IdNotFoundError for an unknown rater or note.
double predict(const ModelParameters& params, std::string_view rater_id, std::string_view note_id);

// Inclusive at both thresholds. Throws InvalidInputError for a non-finite intercept.
NoteLabel label_note(double intercept, const ScoringConfig& config);

// Helpful count over all ratings; SomewhatHelpful counts only in the
// denominator. Throws EmptyInputError on an empty sequence.
double helpful_ratio(std::span<const RatingValue> ratings);

}  // namespace bridgescore
