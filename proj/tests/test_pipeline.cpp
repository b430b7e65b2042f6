#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <map>
#include <sstream>

#include "bridgescore/errors.hpp"
#include "bridgescore/pipeline.hpp"
#include "bridgescore/synth.hpp"
#include "test_support.hpp"

using namespace bridgescore;
using testsupport::rating;

namespace {

const Community& fixture() {
    static const Community c = generate_community(SynthConfig{});
    return c;
}

const ScoringRun& fixture_run() {
    static const ScoringRun run = score_notes(fixture().notes, fixture().ratings, ScoringConfig{});
    return run;
}

bool is_partisan(NoteCategory c) { return c == NoteCategory::PartisanA || c == NoteCategory::PartisanB; }

std::vector<RatingValue> values(std::size_t helpful, std::size_t not_helpful) {
    std::vector<RatingValue> v(helpful, RatingValue::Helpful);
    v.insert(v.end(), not_helpful, RatingValue::NotHelpful);
    return v;
}

std::string exported(const ScoringRun& run) {
    std::ostringstream out;
    write_note_scores(out, run.final_scores);
    write_rater_stats(out, run.rater_records);
    out << diagnostics_json(run);
    return out.str();
}

}  // namespace

TEST_CASE("score_notes errors") {
    SUBCASE("a single rater leaves nothing after the density filter") {
        NoteSet notes;
        std::vector<Rating> rs;
        for (int n = 0; n < 20; ++n) {
            const std::string id = "n" + std::to_string(n);
            notes.add(Note{id, "a", "t", 0, Classification::Misleading, ""});
            rs.push_back(rating("solo", id, RatingValue::Helpful, 10));
        }
        try {
            score_notes(notes, RatingSet(rs, "t"), ScoringConfig{});
            FAIL("expected PipelineError");
        } catch (const PipelineError& e) {
            CHECK(e.stage() == "density_filter");
        }
    }
    SUBCASE("ratings on unknown notes") {
        NoteSet notes;
        CHECK_THROWS_AS(score_notes(notes, fixture().ratings, ScoringConfig{}), MissingNoteError);
    }
}

TEST_CASE("score_notes on the synthetic fixture") {
    const auto& run = fixture_run();
    const ScoringConfig config;

    SUBCASE("two runs export identical bytes") {
        const auto again = score_notes(fixture().notes, fixture().ratings, config);
        CHECK(exported(again) == exported(run));
        CHECK(again.pass2_params == run.pass2_params);
    }

    SUBCASE("stage counts never grow") {
        REQUIRE(run.diagnostics.size() == 4);
        CHECK(run.diagnostics[0].stage == "input");
        CHECK(run.diagnostics[1].stage == "density_filter");
        CHECK(run.diagnostics[2].stage == "user_filter");
        CHECK(run.diagnostics[3].stage == "note_minimum");
        CHECK(run.diagnostics[0].ratings == fixture().ratings.size());
        for (std::size_t k = 1; k < run.diagnostics.size(); ++k) {
            CHECK(run.diagnostics[k].raters <= run.diagnostics[k - 1].raters);
            CHECK(run.diagnostics[k].notes <= run.diagnostics[k - 1].notes);
            CHECK(run.diagnostics[k].ratings <= run.diagnostics[k - 1].ratings);
        }
        MESSAGE("raters kept by the user filter: " << run.diagnostics[2].raters << " of " << run.diagnostics[1].raters);
    }

    SUBCASE("final scores cover exactly the notes with enough ratings from included raters") {
        std::map<std::string, std::size_t> counts;
        for (const auto& r : density_filter_ratings(fixture().ratings.ratings(), config))
            if (run.included_raters.count(r.rater_id)) ++counts[r.note_id];
        std::set<std::string> expected;
        for (const auto& [id, n] : counts)
            if (n >= static_cast<std::size_t>(config.min_ratings_per_note)) expected.insert(id);
        std::set<std::string> got;
        for (const auto& [id, s] : run.final_scores) {
            got.insert(id);
            CHECK(s.n_ratings == counts.at(id));
        }
        CHECK(got == expected);
    }

    SUBCASE("every exported label is recomputable from the exported intercept") {
        std::stringstream buf;
        write_note_scores(buf, run.final_scores);
        const auto parsed = parse_note_scores(buf);
        REQUIRE(parsed.size() == run.final_scores.size());
        for (const auto& [id, s] : parsed) {
            REQUIRE(s.intercept == run.final_scores.at(id).intercept);
            REQUIRE(label_note(s.intercept, config) == s.label);
        }
    }

    SUBCASE("included raters are exactly the records passing the filter") {
        for (const auto& [id, rec] : run.rater_records) {
            REQUIRE(rec.included == passes_user_filter(rec, config));
            REQUIRE(rec.included == (run.included_raters.count(id) == 1));
        }
    }

    SUBCASE("bridging notes outscore partisan notes on average") {
        double bridging = 0.0, partisan = 0.0;
        int nb = 0, np = 0;
        for (const auto& [id, s] : run.final_scores) {
            const auto cat = fixture().truth.notes.at(id);
            if (cat == NoteCategory::Bridging) {
                bridging += s.intercept;
                ++nb;
            } else if (is_partisan(cat)) {
                partisan += s.intercept;
                ++np;
            }
        }
        REQUIRE(nb > 0);
        REQUIRE(np > 0);
        CHECK(bridging / nb > partisan / np);
    }

    SUBCASE("diagnostics JSON") {
        const auto j = nlohmann::json::parse(diagnostics_json(run));
        CHECK(j.at("seed").get<std::uint64_t>() == config.seed);
        CHECK(j.at("stages").size() == 4);
        CHECK(j.at("pass1").at("loss_history").size() == static_cast<std::size_t>(run.pass1_report.epochs_run));
        CHECK(j.at("pass2").at("final_loss").get<double>() == run.pass2_report.final_loss);
        CHECK(j.at("config").at("lambda_i").get<double>() == config.lambda_i);
    }
}

TEST_CASE("removing an excluded rater leaves final scores unchanged") {
    // Two clusters of ten raters rate every note: five helpful to all, five
    // unhelpful to all, five liked only by each cluster. Raters take turns at
    // being early. A contrarian always rates last, opposite to the
    // cluster-a view, so holds no valid rating and is excluded.
    const std::string contrarian = "contrarian";
    std::vector<std::string> raters;
    for (int i = 0; i < 10; ++i) raters.push_back("a" + std::to_string(i));
    for (int i = 0; i < 10; ++i) raters.push_back("b" + std::to_string(i));

    NoteSet notes;
    std::vector<Rating> rs;
    std::size_t rotation = 0;
    auto add_notes = [&](const std::string& prefix, auto helpful_for) {
        for (int i = 0; i < 5; ++i, rotation += 4) {
            const std::string id = prefix + std::to_string(i);
            notes.add(Note{id, "author", "t", 0, Classification::Misleading, ""});
            for (std::size_t k = 0; k < raters.size(); ++k) {
                const auto& u = raters[(k + rotation) % raters.size()];
                const auto v = helpful_for(u[0]) ? RatingValue::Helpful : RatingValue::NotHelpful;
                rs.push_back(rating(u, id, v, static_cast<Millis>(k + 1) * testsupport::kHour));
            }
            const auto v = helpful_for('a') ? RatingValue::NotHelpful : RatingValue::Helpful;
            rs.push_back(rating(contrarian, id, v, 45 * testsupport::kHour));
        }
    };
    add_notes("good", [](char) { return true; });
    add_notes("bad", [](char) { return false; });
    add_notes("pa", [](char c) { return c == 'a'; });
    add_notes("pb", [](char c) { return c == 'b'; });

    const auto run = score_notes(notes, RatingSet(rs, "t"), ScoringConfig{});
    REQUIRE(run.rater_records.count(contrarian));
    REQUIRE_FALSE(run.rater_records.at(contrarian).included);
    REQUIRE(run.included_raters.size() == raters.size());

    std::erase_if(rs, [&](const Rating& r) { return r.rater_id == contrarian; });
    const auto rerun = score_notes(notes, RatingSet(rs, "t"), ScoringConfig{});
    // Precondition of the property: filtering of everyone else is unchanged.
    REQUIRE(rerun.included_raters == run.included_raters);
    CHECK(rerun.final_scores == run.final_scores);
    CHECK(rerun.pass2_params == run.pass2_params);

    // On this clean fixture the cluster-only notes sit below every
    // universally liked note.
    for (int g = 0; g < 5; ++g)
        for (const char* p : {"pa", "pb"})
            for (int i = 0; i < 5; ++i)
                CHECK(run.final_scores.at("good" + std::to_string(g)).intercept >
                      run.final_scores.at(p + std::to_string(i)).intercept);
}

TEST_CASE("supermajority baseline") {
    const ScoringConfig c;
    CHECK(supermajority_label(values(84, 16), c) == NoteLabel::CurrentlyRatedHelpful);
    CHECK(supermajority_label(values(4, 0), c) == NoteLabel::NeedsMoreRatings);
    CHECK(supermajority_label(values(4, 1), c) == NoteLabel::NeedsMoreRatings);
    CHECK(supermajority_label(values(5, 0), c) == NoteLabel::CurrentlyRatedHelpful);
    CHECK(supermajority_label(values(0, 50), c) == NoteLabel::NeedsMoreRatings);
    CHECK(supermajority_label({}, c) == NoteLabel::NeedsMoreRatings);

    SUBCASE("per-note labels and universe") {
        std::vector<Rating> rs;
        for (int u = 0; u < 5; ++u) rs.push_back(rating("u" + std::to_string(u), "good", RatingValue::Helpful));
        rs.push_back(rating("u0", "thin", RatingValue::Helpful));
        const auto all = supermajority_labels(rs, c);
        CHECK(all.size() == 2);
        CHECK(all.at("good") == NoteLabel::CurrentlyRatedHelpful);
        CHECK(all.at("thin") == NoteLabel::NeedsMoreRatings);
        const std::set<std::string> universe = {"good", "unrated"};
        const auto some = supermajority_labels(rs, c, &universe);
        CHECK(some.size() == 2);
        CHECK(some.at("unrated") == NoteLabel::NeedsMoreRatings);
    }
}

TEST_CASE("compare_scorers") {
    const auto& run = fixture_run();
    std::map<std::string, NoteLabel> same;
    for (const auto& [id, s] : run.final_scores) same[id] = s.label;

    SUBCASE("identical labels") {
        const auto report = compare_scorers(run, same);
        CHECK(report.disagreements.empty());
        CHECK(report.pairs.size() == same.size());
        std::size_t diagonal = 0;
        for (int k = 0; k < 3; ++k) diagonal += report.confusion[k][k];
        CHECK(diagonal == same.size());
    }

    SUBCASE("empty run and empty baseline") {
        const auto report = compare_scorers(ScoringRun{}, {});
        CHECK(report.pairs.empty());
        CHECK(report.disagreements.empty());
    }

    SUBCASE("different note universes") {
        auto missing = same;
        missing.erase(missing.begin());
        CHECK_THROWS_AS(compare_scorers(run, missing), InvalidInputError);
        auto extra = same;
        extra["not-scored"] = NoteLabel::NeedsMoreRatings;
        CHECK_THROWS_AS(compare_scorers(run, extra), InvalidInputError);
    }

    SUBCASE("partisan notes the baseline calls helpful stay below helpful in the model") {
        std::set<std::string> universe;
        for (const auto& [id, s] : run.final_scores) universe.insert(id);
        const auto baseline = supermajority_labels(fixture().ratings.ratings(), ScoringConfig{}, &universe);
        const auto report = compare_scorers(run, baseline);

        std::size_t partisan = 0, baseline_helpful = 0, model_not_helpful_there = 0, model_helpful = 0;
        for (const auto& p : report.pairs) {
            if (!is_partisan(fixture().truth.notes.at(p.note_id))) continue;
            ++partisan;
            if (p.model == NoteLabel::CurrentlyRatedHelpful) ++model_helpful;
            if (p.baseline != NoteLabel::CurrentlyRatedHelpful) continue;
            ++baseline_helpful;
            if (p.model != NoteLabel::CurrentlyRatedHelpful) ++model_not_helpful_there;
        }
        MESSAGE("partisan notes " << partisan << ", baseline helpful " << baseline_helpful << ", model helpful " << model_helpful);
        REQUIRE(partisan >= 50);
        REQUIRE(baseline_helpful > 0);
        CHECK(model_not_helpful_there * 10 >= baseline_helpful * 9);
        CHECK(model_helpful * 10 <= partisan);
    }

    SUBCASE("comparison export") {
        const std::map<std::string, NoteLabel> one = {{"x", NoteLabel::CurrentlyRatedHelpful}};
        ScoringRun small;
        NoteScore s;
        s.note_id = "x";
        s.label = NoteLabel::NeedsMoreRatings;
        small.final_scores["x"] = s;
        const auto report = compare_scorers(small, one);
        CHECK(report.disagreements == std::vector<std::string>{"x"});
        CHECK(report.confusion[1][2] == 1);
        std::ostringstream out;
        write_comparison(out, report);
        CHECK(out.str() == "noteId\tmodelLabel\tbaselineLabel\tagree\nx\tNEEDS_MORE_RATINGS\tCURRENTLY_RATED_HELPFUL\tfalse\n");
    }
}
