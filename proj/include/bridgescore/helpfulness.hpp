#pragma once
// Rater and author helpfulness, computed from provisional (first pass)
// note labels, and the inclusion decision for the final pass.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>

#include "bridgescore/core_model.hpp"
#include "bridgescore/ingest.hpp"

namespace bridgescore {

using NoteScoreMap = std::map<std::string, NoteScore>;
using TimestampMap = std::unordered_map<std::string, Millis>;

struct RaterRecord {
    std::string rater_id;

    std::size_t valid_rating_count = 0;
    std::size_t valid_match_count = 0;
    std::optional<double> rater_helpfulness;  // present iff valid_rating_count >= 1

    std::size_t authored_scored_notes = 0;
    std::size_t authored_helpful = 0;
    std::size_t authored_not_helpful = 0;
    std::optional<double> authored_mean_intercept;

    bool included = false;

    bool operator==(const RaterRecord&) const = default;
};

using RaterRecordMap = std::map<std::string, RaterRecord>;

// Ratings usable for rater helpfulness: on a note provisionally labeled
// helpful or not helpful, made within valid_rating_window_ms of the note's
// creation, and among the first valid_rating_max_ordinal such ratings ordered
// by (created_at, rater_id). Output keeps input order.
//
// With config.valid_ratings_before_label and a publication time for the
// note, the window/ordinal rule is replaced by created_at < published time.
//
// Throws MissingNoteError when a rating's note has no creation time.
RatingSet valid_ratings(const RatingSet& ratings, const NoteScoreMap& provisional,
                        const TimestampMap& note_created_at, const ScoringConfig& config,
                        const TimestampMap* label_published_at = nullptr);

// A rating matches when Helpful meets CurrentlyRatedHelpful or NotHelpful
// meets CurrentlyRatedNotHelpful. SomewhatHelpful never matches.
// Throws InvalidInputError if a rating's note lacks a binary provisional label.
RaterRecordMap rater_helpfulness(const RatingSet& valid, const NoteScoreMap& provisional);

// Keyed by author id. Only notes present in `provisional` count as scored.
RaterRecordMap author_stats(const NoteSet& notes, const NoteScoreMap& provisional);

// Union by id; rating fields come from `raters`, author fields from `authors`.
RaterRecordMap merge_records(const RaterRecordMap& raters, const RaterRecordMap& authors);

bool passes_user_filter(const RaterRecord& record, const ScoringConfig& config);

// Returns included ids and sets `included` on each record.
std::set<std::string> filter_users(RaterRecordMap& records, const ScoringConfig& config);

// raterParticipantId, validRatings, raterHelpfulness, authoredHelpful,
// authoredNotHelpful, meanNoteIntercept, included. Absent values are empty.
void write_rater_stats(std::ostream& out, const RaterRecordMap& records);

}  // namespace bridgescore
