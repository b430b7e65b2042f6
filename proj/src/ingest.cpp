#include "bridgescore/ingest.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "bridgescore/errors.hpp"
#include "tsv.hpp"

namespace bridgescore {

namespace {

std::string pair_key(const Rating& r) { return r.rater_id + '\t' + r.note_id; }

std::string sanitize(std::string_view text) {
    std::string out(text);
    for (char& c : out)
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    return out;
}

Millis parse_timestamp(std::string_view field, std::size_t line) {
    auto ts = detail::parse_int<Millis>(field);
    if (!ts || *ts < 0) throw RowError("unparseable timestamp '" + std::string(field) + "'", line);
    return *ts;
}

}  // namespace

RatingSet::RatingSet(std::vector<Rating> ratings, std::string source) : source_(std::move(source)) {
    ratings_.reserve(ratings.size());
    for (std::size_t i = 0; i < ratings.size(); ++i) add(std::move(ratings[i]), i + 1);
}

void RatingSet::add(Rating rating, std::size_t line) {
    if (rating.created_at < 0) throw RowError("negative timestamp", line);
    if (!pairs_.insert(pair_key(rating)).second) {
        throw DuplicateError("duplicate rating by " + rating.rater_id + " on " + rating.note_id, line);
    }
    ratings_.push_back(std::move(rating));
}

NoteSet::NoteSet(std::vector<Note> notes) {
    notes_.reserve(notes.size());
    for (std::size_t i = 0; i < notes.size(); ++i) add(std::move(notes[i]), i + 1);
}

void NoteSet::add(Note note, std::size_t line) {
    if (!index_.emplace(note.note_id, notes_.size()).second) {
        throw DuplicateError("duplicate note " + note.note_id, line);
    }
    notes_.push_back(std::move(note));
}

const Note* NoteSet::find(const std::string& note_id) const {
    auto it = index_.find(note_id);
    return it == index_.end() ? nullptr : &notes_[it->second];
}

RatingSet parse_ratings(std::istream& in, const TsvFormat& format, std::string source) {
    std::string line;
    if (!detail::read_line(in, line)) throw SchemaError("missing header row");
    const detail::Header header(line, format.delimiter);
    const std::size_t c_note = header.require(format.rating_note_id);
    const std::size_t c_rater = header.require(format.rating_rater_id);
    const std::size_t c_time = header.require(format.rating_created_at);
    const std::size_t c_value = header.require(format.rating_helpfulness);

    RatingSet out(std::move(source));
    std::size_t line_no = 1;
    while (detail::read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = detail::split(line, format.delimiter);
        if (fields.size() != header.width()) {
            throw RowError("expected " + std::to_string(header.width()) + " fields, got " +
                               std::to_string(fields.size()),
                           line_no);
        }
        auto value = rating_value_from_token(fields[c_value]);
        if (!value) throw RowError("unknown helpfulness level '" + std::string(fields[c_value]) + "'", line_no);
        Rating r{std::string(fields[c_rater]), std::string(fields[c_note]), *value,
                 parse_timestamp(fields[c_time], line_no)};
        out.add(std::move(r), line_no);
    }
    return out;
}

NoteSet parse_notes(std::istream& in, const TsvFormat& format) {
    std::string line;
    if (!detail::read_line(in, line)) throw SchemaError("missing header row");
    const detail::Header header(line, format.delimiter);
    const std::size_t c_note = header.require(format.note_id);
    const std::size_t c_author = header.require(format.note_author_id);
    const std::size_t c_tweet = header.require(format.note_tweet_id);
    const std::size_t c_time = header.require(format.note_created_at);
    const std::size_t c_class = header.require(format.note_classification);
    const std::size_t c_summary = header.require(format.note_summary);

    NoteSet out;
    std::size_t line_no = 1;
    while (detail::read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = detail::split(line, format.delimiter);
        if (fields.size() != header.width()) {
            throw RowError("expected " + std::to_string(header.width()) + " fields, got " +
                               std::to_string(fields.size()),
                           line_no);
        }
        Note n{std::string(fields[c_note]),
               std::string(fields[c_author]),
               std::string(fields[c_tweet]),
               parse_timestamp(fields[c_time], line_no),
               classification_from_token(fields[c_class]),
               std::string(fields[c_summary])};
        out.add(std::move(n), line_no);
    }
    return out;
}

RatingSet read_ratings_file(const std::string& path, const TsvFormat& format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open ratings file " + path);
    return parse_ratings(in, format, path);
}

NoteSet read_notes_file(const std::string& path, const TsvFormat& format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open notes file " + path);
    return parse_notes(in, format);
}

void write_ratings(std::ostream& out, const RatingSet& ratings, const TsvFormat& format) {
    const char d = format.delimiter;
    out << format.rating_note_id << d << format.rating_rater_id << d << format.rating_created_at << d
        << format.rating_helpfulness << '\n';
    for (const Rating& r : ratings.ratings()) {
        out << r.note_id << d << r.rater_id << d << r.created_at << d << to_token(r.value) << '\n';
    }
}

void write_notes(std::ostream& out, const NoteSet& notes, const TsvFormat& format) {
    const char d = format.delimiter;
    out << format.note_id << d << format.note_author_id << d << format.note_tweet_id << d
        << format.note_created_at << d << format.note_classification << d << format.note_summary << '\n';
    for (const Note& n : notes.notes()) {
        out << n.note_id << d << n.author_id << d << n.tweet_id << d << n.created_at << d
            << to_token(n.classification) << d << sanitize(n.summary) << '\n';
    }
}

std::vector<Rating> density_filter_ratings(std::span<const Rating> ratings, const ScoringConfig& config) {
    std::vector<Rating> current(ratings.begin(), ratings.end());
    const auto min_rater = static_cast<std::size_t>(config.min_ratings_per_rater);
    const auto min_note = static_cast<std::size_t>(config.min_ratings_per_note);

    while (true) {
        const std::size_t before = current.size();

        std::unordered_map<std::string, std::size_t> per_rater;
        for (const Rating& r : current) ++per_rater[r.rater_id];
        std::erase_if(current, [&](const Rating& r) { return per_rater[r.rater_id] < min_rater; });

        std::unordered_map<std::string, std::size_t> per_note;
        for (const Rating& r : current) ++per_note[r.note_id];
        std::erase_if(current, [&](const Rating& r) { return per_note[r.note_id] < min_note; });

        if (!config.density_filter_fixed_point || current.size() == before) break;
    }
    return current;
}

RatingsMatrix apply_density_filter(const RatingSet& ratings, const ScoringConfig& config) {
    const auto kept = density_filter_ratings(ratings.ratings(), config);
    return RatingsMatrix::build(kept);
}

}  // namespace bridgescore
