#include "bridgescore/helpfulness.hpp"

#include <algorithm>
#include <ostream>
#include <vector>

#include "bridgescore/errors.hpp"
#include "bridgescore/format.hpp"

namespace bridgescore {

namespace {

bool is_binary(NoteLabel label) {
    return label == NoteLabel::CurrentlyRatedHelpful || label == NoteLabel::CurrentlyRatedNotHelpful;
}

}  // namespace

RatingSet valid_ratings(const RatingSet& ratings, const NoteScoreMap& provisional,
                        const TimestampMap& note_created_at, const ScoringConfig& config,
                        const TimestampMap* label_published_at) {
    const auto& all = ratings.ratings();

    // Candidate rating indices per binary-labeled note.
    std::map<std::string, std::vector<std::size_t>> by_note;
    for (std::size_t i = 0; i < all.size(); ++i) {
        const Rating& r = all[i];
        if (!note_created_at.contains(r.note_id)) throw MissingNoteError(r.note_id);
        auto it = provisional.find(r.note_id);
        if (it == provisional.end() || !is_binary(it->second.label)) continue;
        by_note[r.note_id].push_back(i);
    }

    std::vector<bool> keep(all.size(), false);
    for (auto& [note_id, idx] : by_note) {
        if (config.valid_ratings_before_label && label_published_at) {
            auto pub = label_published_at->find(note_id);
            if (pub != label_published_at->end()) {
                for (std::size_t i : idx)
                    if (all[i].created_at < pub->second) keep[i] = true;
                continue;
            }
        }
        const Millis created = note_created_at.at(note_id);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            if (all[a].created_at != all[b].created_at) return all[a].created_at < all[b].created_at;
            return all[a].rater_id < all[b].rater_id;
        });
        int taken = 0;
        for (std::size_t i : idx) {
            if (taken >= config.valid_rating_max_ordinal) break;
            if (all[i].created_at - created > config.valid_rating_window_ms) break;
            keep[i] = true;
            ++taken;
        }
    }

    RatingSet out(ratings.source());
    for (std::size_t i = 0; i < all.size(); ++i)
        if (keep[i]) out.add(all[i], i + 1);
    return out;
}

RaterRecordMap rater_helpfulness(const RatingSet& valid, const NoteScoreMap& provisional) {
    RaterRecordMap out;
    for (const Rating& r : valid.ratings()) {
        auto it = provisional.find(r.note_id);
        if (it == provisional.end() || !is_binary(it->second.label)) {
            throw InvalidInputError("valid rating on note without a binary provisional label: " + r.note_id);
        }
        RaterRecord& rec = out[r.rater_id];
        rec.rater_id = r.rater_id;
        ++rec.valid_rating_count;
        const NoteLabel label = it->second.label;
        if ((r.value == RatingValue::Helpful && label == NoteLabel::CurrentlyRatedHelpful) ||
            (r.value == RatingValue::NotHelpful && label == NoteLabel::CurrentlyRatedNotHelpful)) {
            ++rec.valid_match_count;
        }
    }
    for (auto& [id, rec] : out) {
        rec.rater_helpfulness =
            static_cast<double>(rec.valid_match_count) / static_cast<double>(rec.valid_rating_count);
    }
    return out;
}

RaterRecordMap author_stats(const NoteSet& notes, const NoteScoreMap& provisional) {
    RaterRecordMap out;
    std::map<std::string, double> intercept_sum;
    for (const Note& n : notes.notes()) {
        RaterRecord& rec = out[n.author_id];
        rec.rater_id = n.author_id;
        auto it = provisional.find(n.note_id);
        if (it == provisional.end()) continue;
        ++rec.authored_scored_notes;
        if (it->second.label == NoteLabel::CurrentlyRatedHelpful) ++rec.authored_helpful;
        if (it->second.label == NoteLabel::CurrentlyRatedNotHelpful) ++rec.authored_not_helpful;
        intercept_sum[n.author_id] += it->second.intercept;
    }
    for (auto& [id, rec] : out) {
        if (rec.authored_scored_notes > 0) {
            rec.authored_mean_intercept = intercept_sum[id] / static_cast<double>(rec.authored_scored_notes);
        }
    }
    return out;
}

RaterRecordMap merge_records(const RaterRecordMap& raters, const RaterRecordMap& authors) {
    RaterRecordMap out = raters;
    for (const auto& [id, a] : authors) {
        RaterRecord& rec = out[id];
        rec.rater_id = id;
        rec.authored_scored_notes = a.authored_scored_notes;
        rec.authored_helpful = a.authored_helpful;
        rec.authored_not_helpful = a.authored_not_helpful;
        rec.authored_mean_intercept = a.authored_mean_intercept;
    }
    return out;
}

bool passes_user_filter(const RaterRecord& record, const ScoringConfig& config) {
    if (record.valid_rating_count < 1 || !record.rater_helpfulness) return false;
    if (*record.rater_helpfulness < config.rater_helpfulness_min) return false;
    if (record.authored_scored_notes == 0) return true;
    const bool ratio_ok = static_cast<double>(record.authored_helpful) >=
                          config.author_ratio_min * static_cast<double>(record.authored_not_helpful);
    const bool intercept_ok = record.authored_mean_intercept &&
                              *record.authored_mean_intercept >= config.author_mean_intercept_min;
    return ratio_ok && intercept_ok;
}

std::set<std::string> filter_users(RaterRecordMap& records, const ScoringConfig& config) {
    std::set<std::string> included;
    for (auto& [id, rec] : records) {
        rec.included = passes_user_filter(rec, config);
        if (rec.included) included.insert(id);
    }
    return included;
}

void write_rater_stats(std::ostream& out, const RaterRecordMap& records) {
    out << "raterParticipantId\tvalidRatings\traterHelpfulness\tauthoredHelpful\tauthoredNotHelpful\t"
           "meanNoteIntercept\tincluded\n";
    for (const auto& [id, rec] : records) {
        out << id << '\t' << rec.valid_rating_count << '\t'
            << (rec.rater_helpfulness ? format_double(*rec.rater_helpfulness) : "") << '\t'
            << rec.authored_helpful << '\t' << rec.authored_not_helpful << '\t'
            << (rec.authored_mean_intercept ? format_double(*rec.authored_mean_intercept) : "") << '\t'
            << (rec.included ? "true" : "false") << '\n';
    }
}

}  // namespace bridgescore
