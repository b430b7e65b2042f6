#pragma once
// Two-pass scoring: density filter, first factorization, provisional labels,
// helpfulness filtering of raters, second factorization, final labels.

#include <array>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "bridgescore/core_model.hpp"
#include "bridgescore/helpfulness.hpp"
#include "bridgescore/ingest.hpp"
#include "bridgescore/trainer.hpp"

namespace bridgescore {

struct StageCounts {
    std::string stage;
    std::size_t raters = 0;
    std::size_t notes = 0;
    std::size_t ratings = 0;

    bool operator==(const StageCounts&) const = default;
};

struct ScoringRun {
    ScoringConfig config;

    ModelParameters pass1_params;
    TrainReport pass1_report;
    NoteScoreMap provisional;

    RaterRecordMap rater_records;
    std::set<std::string> included_raters;

    ModelParameters pass2_params;
    TrainReport pass2_report;
    NoteScoreMap final_scores;

    // Stages in order: input, density_filter, user_filter, note_minimum.
    std::vector<StageCounts> diagnostics;
};

// Scores every note of a fitted matrix. `ratings` must be the list the
// matrix was built from; helpful ratios are computed over it.
NoteScoreMap score_matrix(const ModelParameters& params, const RatingsMatrix& matrix,
                          std::span<const Rating> ratings, const ScoringConfig& config);

// Throws PipelineError naming the stage when a training stage has no data
// or diverges. Input problems surface as MissingNoteError.
ScoringRun score_notes(const NoteSet& notes, const RatingSet& ratings, const ScoringConfig& config,
                       const TimestampMap* label_published_at = nullptr);

// Raw helpful-ratio baseline: helpful iff at least min_ratings_per_note
// ratings and helpful_ratio >= supermajority_threshold. It has no
// not-helpful tier.
NoteLabel supermajority_label(std::span<const RatingValue> note_ratings, const ScoringConfig& config);

// Baseline label for every note appearing in `ratings`; when `universe` is
// given, only those notes (a note with no ratings gets NeedsMoreRatings).
std::map<std::string, NoteLabel> supermajority_labels(std::span<const Rating> ratings,
                                                      const ScoringConfig& config,
                                                      const std::set<std::string>* universe = nullptr);

struct LabelPair {
    std::string note_id;
    NoteLabel model = NoteLabel::NeedsMoreRatings;
    NoteLabel baseline = NoteLabel::NeedsMoreRatings;
};

struct ComparisonReport {
    std::vector<LabelPair> pairs;  // ordered by note id
    // confusion[model][baseline], indexed by NoteLabel's underlying value.
    std::array<std::array<std::size_t, 3>, 3> confusion{};
    std::vector<std::string> disagreements;
};

// Throws InvalidInputError when the two label maps cover different notes.
ComparisonReport compare_scorers(const ScoringRun& run, const std::map<std::string, NoteLabel>& baseline);

// noteId, intercept, factor, label, nRatings, helpfulRatio
void write_note_scores(std::ostream& out, const NoteScoreMap& scores);
NoteScoreMap parse_note_scores(std::istream& in);

// noteId, modelLabel, baselineLabel, agree
void write_comparison(std::ostream& out, const ComparisonReport& report);

std::string diagnostics_json(const ScoringRun& run);

}  // namespace bridgescore
