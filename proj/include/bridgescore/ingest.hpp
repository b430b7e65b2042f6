#pragma once
// Reading and writing the public-data TSV layout, plus the density filters
// applied before the first factorization.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "bridgescore/core_model.hpp"

namespace bridgescore {

// Column names and delimiter. Columns are located by header name; order
// and extra columns do not matter.
struct TsvFormat {
    char delimiter = '\t';

    std::string rating_note_id = "noteId";
    std::string rating_rater_id = "raterParticipantId";
    std::string rating_created_at = "createdAtMillis";
    std::string rating_helpfulness = "helpfulnessLevel";

    std::string note_id = "noteId";
    std::string note_author_id = "noteAuthorParticipantId";
    std::string note_tweet_id = "tweetId";
    std::string note_created_at = "createdAtMillis";
    std::string note_classification = "classification";
    std::string note_summary = "summary";
};

class RatingSet {
public:
    RatingSet() = default;
    explicit RatingSet(std::string source) : source_(std::move(source)) {}
    // Throws DuplicateError on a repeated (rater, note) pair, reporting its
    // 1-based position in `ratings`.
    RatingSet(std::vector<Rating> ratings, std::string source);

    // `line` is only used for the error message.
    void add(Rating rating, std::size_t line = 0);

    const std::vector<Rating>& ratings() const noexcept { return ratings_; }
    const std::string& source() const noexcept { return source_; }
    std::size_t size() const noexcept { return ratings_.size(); }
    bool empty() const noexcept { return ratings_.empty(); }

    bool operator==(const RatingSet& other) const { return ratings_ == other.ratings_; }

private:
    std::vector<Rating> ratings_;
    std::unordered_set<std::string> pairs_;
    std::string source_ = "synthetic";
};

class NoteSet {
public:
    NoteSet() = default;
    explicit NoteSet(std::vector<Note> notes);

    void add(Note note, std::size_t line = 0);

    const std::vector<Note>& notes() const noexcept { return notes_; }
    std::size_t size() const noexcept { return notes_.size(); }
    bool empty() const noexcept { return notes_.empty(); }
    const Note* find(const std::string& note_id) const;

    bool operator==(const NoteSet& other) const { return notes_ == other.notes_; }

private:
    std::vector<Note> notes_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Throws SchemaError (missing header or column), RowError (bad field,
// with line number) or DuplicateError.
RatingSet parse_ratings(std::istream& in, const TsvFormat& format = {}, std::string source = "stream");
NoteSet parse_notes(std::istream& in, const TsvFormat& format = {});

RatingSet read_ratings_file(const std::string& path, const TsvFormat& format = {});
NoteSet read_notes_file(const std::string& path, const TsvFormat& format = {});

void write_ratings(std::ostream& out, const RatingSet& ratings, const TsvFormat& format = {});
// Tabs and newlines in summaries are written as spaces.
void write_notes(std::ostream& out, const NoteSet& notes, const TsvFormat& format = {});

// Drops raters below min_ratings_per_rater (raw counts), then notes below
// min_ratings_per_note. One pass each unless density_filter_fixed_point is set.
// Input order is preserved.
std::vector<Rating> density_filter_ratings(std::span<const Rating> ratings, const ScoringConfig& config);

RatingsMatrix apply_density_filter(const RatingSet& ratings, const ScoringConfig& config);

}  // namespace bridgescore
