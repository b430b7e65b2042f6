#include "bridgescore/pipeline.hpp"

#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "bridgescore/config_io.hpp"
#include "bridgescore/errors.hpp"
#include "bridgescore/format.hpp"
#include "tsv.hpp"

namespace bridgescore {

namespace {

StageCounts count_stage(std::string stage, std::span<const Rating> ratings) {
    std::unordered_set<std::string> raters;
    std::unordered_set<std::string> notes;
    for (const Rating& r : ratings) {
        raters.insert(r.rater_id);
        notes.insert(r.note_id);
    }
    return {std::move(stage), raters.size(), notes.size(), ratings.size()};
}

TrainResult train_stage(const std::string& stage, const RatingsMatrix& matrix, const ScoringConfig& config) {
    if (matrix.empty()) throw PipelineError(stage, "no ratings left to train on");
    try {
        return train(matrix, config);
    } catch (const DivergenceError& e) {
        throw PipelineError(stage, e.what());
    }
}

nlohmann::json report_json(const TrainReport& r) {
    return {
        {"final_loss", r.final_loss},       {"epochs_run", r.epochs_run},
        {"converged", r.converged},         {"rmse_train", r.rmse_train},
        {"loss_history", r.loss_history},
    };
}

}  // namespace

NoteScoreMap score_matrix(const ModelParameters& params, const RatingsMatrix& matrix,
                          std::span<const Rating> ratings, const ScoringConfig& config) {
    std::unordered_map<std::string, std::vector<RatingValue>> values;
    for (const Rating& r : ratings) values[r.note_id].push_back(r.value);

    NoteScoreMap out;
    for (std::size_t col = 0; col < matrix.n_notes(); ++col) {
        const std::string& id = matrix.note_ids()[col];
        auto n = params.note_ordinal(id);
        if (!n) throw IdNotFoundError("note " + id);
        NoteScore s;
        s.note_id = id;
        s.intercept = params.note_intercepts[*n];
        s.factor = params.note_factor(*n)[0];
        s.label = label_note(s.intercept, config);
        s.n_ratings = matrix.ratings_per_note()[col];
        s.helpful_ratio = helpful_ratio(values.at(id));
        out.emplace(id, std::move(s));
    }
    return out;
}

ScoringRun score_notes(const NoteSet& notes, const RatingSet& ratings, const ScoringConfig& config,
                       const TimestampMap* label_published_at) {
    config.validate();
    ScoringRun run;
    run.config = config;
    run.diagnostics.push_back(count_stage("input", ratings.ratings()));

    // Pass 1: density-filtered ratings.
    const std::vector<Rating> pass1 = density_filter_ratings(ratings.ratings(), config);
    run.diagnostics.push_back(count_stage("density_filter", pass1));
    const RatingsMatrix matrix1 = RatingsMatrix::build(pass1);
    if (matrix1.empty()) throw PipelineError("density_filter", "no ratings survive the density filter");
    TrainResult fit1 = train_stage("pass1_train", matrix1, config);
    run.provisional = score_matrix(fit1.params, matrix1, pass1, config);
    run.pass1_params = std::move(fit1.params);
    run.pass1_report = std::move(fit1.report);

    // Helpfulness: validity is judged against every rating a scored note received.
    TimestampMap created_at;
    for (const Note& n : notes.notes()) created_at.emplace(n.note_id, n.created_at);
    RatingSet on_scored(ratings.source());
    for (const Rating& r : ratings.ratings())
        if (run.provisional.contains(r.note_id)) on_scored.add(r);
    const RatingSet valid = valid_ratings(on_scored, run.provisional, created_at, config, label_published_at);
    run.rater_records = merge_records(rater_helpfulness(valid, run.provisional),
                                      author_stats(notes, run.provisional));
    // Pass-1 raters without valid ratings still get a (failing) record.
    for (const std::string& id : matrix1.rater_ids()) {
        RaterRecord blank;
        blank.rater_id = id;
        run.rater_records.emplace(id, std::move(blank));
    }
    run.included_raters = filter_users(run.rater_records, config);

    // Pass 2: included raters only, note minimum re-applied.
    std::vector<Rating> kept;
    for (const Rating& r : pass1)
        if (run.included_raters.contains(r.rater_id)) kept.push_back(r);
    run.diagnostics.push_back(count_stage("user_filter", kept));

    ScoringConfig note_only = config;
    note_only.min_ratings_per_rater = 0;
    note_only.density_filter_fixed_point = false;
    const std::vector<Rating> pass2 = density_filter_ratings(kept, note_only);
    run.diagnostics.push_back(count_stage("note_minimum", pass2));
    const RatingsMatrix matrix2 = RatingsMatrix::build(pass2);
    if (matrix2.empty()) throw PipelineError("note_minimum", "no notes keep enough ratings after user filtering");
    TrainResult fit2 = train_stage("pass2_train", matrix2, config);
    run.final_scores = score_matrix(fit2.params, matrix2, pass2, config);
    run.pass2_params = std::move(fit2.params);
    run.pass2_report = std::move(fit2.report);
    return run;
}

NoteLabel supermajority_label(std::span<const RatingValue> note_ratings, const ScoringConfig& config) {
    if (note_ratings.size() < static_cast<std::size_t>(config.min_ratings_per_note) || note_ratings.empty()) {
        return NoteLabel::NeedsMoreRatings;
    }
    return helpful_ratio(note_ratings) >= config.supermajority_threshold ? NoteLabel::CurrentlyRatedHelpful
                                                                         : NoteLabel::NeedsMoreRatings;
}

std::map<std::string, NoteLabel> supermajority_labels(std::span<const Rating> ratings,
                                                      const ScoringConfig& config,
                                                      const std::set<std::string>* universe) {
    std::map<std::string, std::vector<RatingValue>> values;
    if (universe)
        for (const auto& id : *universe) values[id];
    for (const Rating& r : ratings) {
        if (universe && !universe->contains(r.note_id)) continue;
        values[r.note_id].push_back(r.value);
    }
    std::map<std::string, NoteLabel> out;
    for (const auto& [id, v] : values) out.emplace(id, supermajority_label(v, config));
    return out;
}

ComparisonReport compare_scorers(const ScoringRun& run, const std::map<std::string, NoteLabel>& baseline) {
    if (run.final_scores.size() != baseline.size()) {
        throw InvalidInputError("scorers cover different note sets");
    }
    ComparisonReport report;
    for (const auto& [id, score] : run.final_scores) {
        auto it = baseline.find(id);
        if (it == baseline.end()) throw InvalidInputError("baseline has no label for note " + id);
        report.pairs.push_back({id, score.label, it->second});
        ++report.confusion[static_cast<std::size_t>(score.label)][static_cast<std::size_t>(it->second)];
        if (score.label != it->second) report.disagreements.push_back(id);
    }
    return report;
}

void write_note_scores(std::ostream& out, const NoteScoreMap& scores) {
    out << "noteId\tintercept\tfactor\tlabel\tnRatings\thelpfulRatio\n";
    for (const auto& [id, s] : scores) {
        out << id << '\t' << format_double(s.intercept) << '\t' << format_double(s.factor) << '\t'
            << to_token(s.label) << '\t' << s.n_ratings << '\t' << format_double(s.helpful_ratio) << '\n';
    }
}

NoteScoreMap parse_note_scores(std::istream& in) {
    std::string line;
    if (!detail::read_line(in, line)) throw SchemaError("missing header row");
    const detail::Header header(line, '\t');
    const std::size_t c_id = header.require("noteId");
    const std::size_t c_int = header.require("intercept");
    const std::size_t c_fac = header.require("factor");
    const std::size_t c_label = header.require("label");
    const std::size_t c_n = header.require("nRatings");
    const std::size_t c_ratio = header.require("helpfulRatio");

    NoteScoreMap out;
    std::size_t line_no = 1;
    while (detail::read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto f = detail::split(line, '\t');
        if (f.size() != header.width()) throw RowError("wrong field count", line_no);
        auto intercept = detail::parse_double(f[c_int]);
        auto factor = detail::parse_double(f[c_fac]);
        auto label = note_label_from_token(f[c_label]);
        auto n = detail::parse_int<std::size_t>(f[c_n]);
        auto ratio = detail::parse_double(f[c_ratio]);
        if (!intercept || !factor || !label || !n || !ratio) throw RowError("unparseable note score", line_no);
        NoteScore s{std::string(f[c_id]), *intercept, *factor, *label, *n, *ratio};
        if (!out.emplace(s.note_id, s).second) throw DuplicateError("duplicate note " + s.note_id, line_no);
    }
    return out;
}

void write_comparison(std::ostream& out, const ComparisonReport& report) {
    out << "noteId\tmodelLabel\tbaselineLabel\tagree\n";
    for (const auto& p : report.pairs) {
        out << p.note_id << '\t' << to_token(p.model) << '\t' << to_token(p.baseline) << '\t'
            << (p.model == p.baseline ? "true" : "false") << '\n';
    }
}

std::string diagnostics_json(const ScoringRun& run) {
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& s : run.diagnostics) {
        stages.push_back({{"stage", s.stage}, {"raters", s.raters}, {"notes", s.notes}, {"ratings", s.ratings}});
    }
    std::size_t labels[3] = {0, 0, 0};
    for (const auto& [id, s] : run.final_scores) ++labels[static_cast<std::size_t>(s.label)];
    nlohmann::json j = {
        {"config", run.config},
        {"seed", run.config.seed},
        {"stages", stages},
        {"pass1", report_json(run.pass1_report)},
        {"pass2", report_json(run.pass2_report)},
        {"provisional_notes", run.provisional.size()},
        {"rater_records", run.rater_records.size()},
        {"included_raters", run.included_raters.size()},
        {"final_notes", run.final_scores.size()},
        {"final_labels",
         {{std::string(to_token(NoteLabel::CurrentlyRatedHelpful)), labels[2]},
          {std::string(to_token(NoteLabel::NeedsMoreRatings)), labels[1]},
          {std::string(to_token(NoteLabel::CurrentlyRatedNotHelpful)), labels[0]}}},
    };
    return j.dump(2) + "\n";
}

}  // namespace bridgescore
