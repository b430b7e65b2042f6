#include "bridgescore/core_model.hpp"

#include <cmath>
#include <unordered_set>

#include "bridgescore/errors.hpp"

namespace bridgescore {

double numeric_value(RatingValue v) noexcept {
    switch (v) {
        case RatingValue::Helpful: return 1.0;
        case RatingValue::SomewhatHelpful: return 0.5;
        case RatingValue::NotHelpful: return 0.0;
    }
    return 0.0;
}

std::string_view to_token(RatingValue v) noexcept {
    switch (v) {
        case RatingValue::Helpful: return "HELPFUL";
        case RatingValue::SomewhatHelpful: return "SOMEWHAT_HELPFUL";
        case RatingValue::NotHelpful: return "NOT_HELPFUL";
    }
    return "";
}

std::optional<RatingValue> rating_value_from_token(std::string_view token) noexcept {
    if (token == "HELPFUL") return RatingValue::Helpful;
    if (token == "SOMEWHAT_HELPFUL") return RatingValue::SomewhatHelpful;
    if (token == "NOT_HELPFUL") return RatingValue::NotHelpful;
    return std::nullopt;
}

std::string_view to_token(Classification c) noexcept {
    switch (c) {
        case Classification::Misleading: return "MISINFORMED_OR_POTENTIALLY_MISLEADING";
        case Classification::NotMisleading: return "NOT_MISLEADING";
        case Classification::Unknown: return "UNKNOWN";
    }
    return "";
}

Classification classification_from_token(std::string_view token) noexcept {
    if (token == "MISINFORMED_OR_POTENTIALLY_MISLEADING") return Classification::Misleading;
    if (token == "NOT_MISLEADING") return Classification::NotMisleading;
    return Classification::Unknown;
}

std::string_view to_token(NoteLabel label) noexcept {
    switch (label) {
        case NoteLabel::CurrentlyRatedHelpful: return "CURRENTLY_RATED_HELPFUL";
        case NoteLabel::CurrentlyRatedNotHelpful: return "CURRENTLY_RATED_NOT_HELPFUL";
        case NoteLabel::NeedsMoreRatings: return "NEEDS_MORE_RATINGS";
    }
    return "";
}

std::optional<NoteLabel> note_label_from_token(std::string_view token) noexcept {
    if (token == "CURRENTLY_RATED_HELPFUL") return NoteLabel::CurrentlyRatedHelpful;
    if (token == "CURRENTLY_RATED_NOT_HELPFUL") return NoteLabel::CurrentlyRatedNotHelpful;
    if (token == "NEEDS_MORE_RATINGS") return NoteLabel::NeedsMoreRatings;
    return std::nullopt;
}

void ScoringConfig::validate() const {
    auto require = [](bool ok, const char* msg) {
        if (!ok) throw ConfigError(msg);
    };
    require(std::isfinite(lambda_i) && lambda_i >= 0.0, "lambda_i must be finite and >= 0");
    require(std::isfinite(lambda_f) && lambda_f >= 0.0, "lambda_f must be finite and >= 0");
    require(std::isfinite(helpful_threshold) && std::isfinite(not_helpful_threshold),
            "thresholds must be finite");
    require(not_helpful_threshold < helpful_threshold,
            "not_helpful_threshold must be below helpful_threshold");
    require(min_ratings_per_note >= 0 && min_ratings_per_rater >= 0, "rating minima must be >= 0");
    require(rater_helpfulness_min >= 0.0 && author_ratio_min >= 0.0, "helpfulness minima must be >= 0");
    require(std::isfinite(author_mean_intercept_min), "author_mean_intercept_min must be finite");
    require(valid_rating_window_ms >= 0 && valid_rating_max_ordinal >= 0,
            "valid rating window and ordinal must be >= 0");
    require(supermajority_threshold >= 0.0 && supermajority_threshold <= 1.0,
            "supermajority_threshold must lie in [0, 1]");
    require(factor_dim >= 1, "factor_dim must be >= 1");
    require(std::isfinite(learning_rate) && learning_rate > 0.0, "learning_rate must be > 0");
    require(max_epochs >= 0, "max_epochs must be >= 0");
    require(convergence_tolerance >= 0.0, "convergence_tolerance must be >= 0");
    require(std::isfinite(init_scale) && init_scale >= 0.0, "init_scale must be >= 0");
}

RatingsMatrix RatingsMatrix::build(std::span<const Rating> ratings) {
    RatingsMatrix m;
    m.entries_.reserve(ratings.size());
    std::unordered_set<std::uint64_t> seen_pairs;
    seen_pairs.reserve(ratings.size());
    for (std::size_t k = 0; k < ratings.size(); ++k) {
        const Rating& r = ratings[k];
        auto [rit, rnew] = m.rater_index_.try_emplace(r.rater_id, m.rater_ids_.size());
        if (rnew) {
            m.rater_ids_.push_back(r.rater_id);
            m.ratings_per_rater_.push_back(0);
        }
        auto [nit, nnew] = m.note_index_.try_emplace(r.note_id, m.note_ids_.size());
        if (nnew) {
            m.note_ids_.push_back(r.note_id);
            m.ratings_per_note_.push_back(0);
        }
        const std::size_t row = rit->second;
        const std::size_t col = nit->second;
        const std::uint64_t key = (static_cast<std::uint64_t>(row) << 32) | static_cast<std::uint64_t>(col);
        if (!seen_pairs.insert(key).second) {
            throw DuplicateError("duplicate rating by " + r.rater_id + " on " + r.note_id, k + 1);
        }
        m.entries_.push_back({row, col, numeric_value(r.value), r.created_at});
        ++m.ratings_per_rater_[row];
        ++m.ratings_per_note_[col];
    }
    return m;
}

std::optional<std::size_t> RatingsMatrix::rater_ordinal(std::string_view rater_id) const {
    auto it = rater_index_.find(std::string(rater_id));
    if (it == rater_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> RatingsMatrix::note_ordinal(std::string_view note_id) const {
    auto it = note_index_.find(std::string(note_id));
    if (it == note_index_.end()) return std::nullopt;
    return it->second;
}

ModelParameters::ModelParameters(std::vector<std::string> rater_ids, std::vector<std::string> note_ids,
                                 int dim)
    : dim_(dim), rater_ids_(std::move(rater_ids)), note_ids_(std::move(note_ids)) {
    if (dim_ < 1) throw ConfigError("factor dimension must be >= 1");
    for (std::size_t i = 0; i < rater_ids_.size(); ++i) {
        if (!rater_index_.emplace(rater_ids_[i], i).second) {
            throw InvalidInputError("duplicate rater id " + rater_ids_[i]);
        }
    }
    for (std::size_t i = 0; i < note_ids_.size(); ++i) {
        if (!note_index_.emplace(note_ids_[i], i).second) {
            throw InvalidInputError("duplicate note id " + note_ids_[i]);
        }
    }
    const auto d = static_cast<std::size_t>(dim_);
    rater_intercepts.assign(rater_ids_.size(), 0.0);
    note_intercepts.assign(note_ids_.size(), 0.0);
    rater_factors.assign(rater_ids_.size() * d, 0.0);
    note_factors.assign(note_ids_.size() * d, 0.0);
}

std::optional<std::size_t> ModelParameters::rater_ordinal(std::string_view rater_id) const {
    auto it = rater_index_.find(std::string(rater_id));
    if (it == rater_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> ModelParameters::note_ordinal(std::string_view note_id) const {
    auto it = note_index_.find(std::string(note_id));
    if (it == note_index_.end()) return std::nullopt;
    return it->second;
}

std::span<const double> ModelParameters::rater_factor(std::size_t r) const {
    const auto d = static_cast<std::size_t>(dim_);
    return std::span<const double>(rater_factors).subspan(r * d, d);
}

std::span<const double> ModelParameters::note_factor(std::size_t n) const {
    const auto d = static_cast<std::size_t>(dim_);
    return std::span<const double>(note_factors).subspan(n * d, d);
}

std::span<double> ModelParameters::rater_factor(std::size_t r) {
    const auto d = static_cast<std::size_t>(dim_);
    return std::span<double>(rater_factors).subspan(r * d, d);
}

std::span<double> ModelParameters::note_factor(std::size_t n) {
    const auto d = static_cast<std::size_t>(dim_);
    return std::span<double>(note_factors).subspan(n * d, d);
}

double ModelParameters::predict_at(std::size_t rater, std::size_t note) const noexcept {
    const auto d = static_cast<std::size_t>(dim_);
    const double* fu = rater_factors.data() + rater * d;
    const double* fn = note_factors.data() + note * d;
    double dot = 0.0;
    for (std::size_t k = 0; k < d; ++k) dot += fu[k] * fn[k];
    return mu + rater_intercepts[rater] + note_intercepts[note] + dot;
}

bool ModelParameters::all_finite() const noexcept {
    auto finite = [](const std::vector<double>& v) {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    };
    return std::isfinite(mu) && finite(rater_intercepts) && finite(note_intercepts) &&
           finite(rater_factors) && finite(note_factors);
}

bool ModelParameters::operator==(const ModelParameters& other) const {
    return dim_ == other.dim_ && rater_ids_ == other.rater_ids_ && note_ids_ == other.note_ids_ &&
           mu == other.mu && rater_intercepts == other.rater_intercepts &&
           note_intercepts == other.note_intercepts && rater_factors == other.rater_factors &&
           note_factors == other.note_factors;
}

double predict(const ModelParameters& params, std::string_view rater_id, std::string_view note_id) {
    auto r = params.rater_ordinal(rater_id);
    if (!r) throw IdNotFoundError("rater " + std::string(rater_id));
    auto n = params.note_ordinal(note_id);
    if (!n) throw IdNotFoundError("note " + std::string(note_id));
    return params.predict_at(*r, *n);
}

NoteLabel label_note(double intercept, const ScoringConfig& config) {
    if (!std::isfinite(intercept)) throw InvalidInputError("note intercept is not finite");
    if (intercept >= config.helpful_threshold) return NoteLabel::CurrentlyRatedHelpful;
    if (intercept <= config.not_helpful_threshold) return NoteLabel::CurrentlyRatedNotHelpful;
    return NoteLabel::NeedsMoreRatings;
}

double helpful_ratio(std::span<const RatingValue> ratings) {
    if (ratings.empty()) throw EmptyInputError("helpful_ratio of an empty rating sequence");
    std::size_t helpful = 0;
    for (RatingValue v : ratings)
        if (v == RatingValue::Helpful) ++helpful;
    return static_cast<double>(helpful) / static_cast<double>(ratings.size());
}

}  // namespace bridgescore
