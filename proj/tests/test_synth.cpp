#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "bridgescore/errors.hpp"
#include "bridgescore/synth.hpp"
#include "test_support.hpp"

using namespace bridgescore;

namespace {

std::string dump(const Community& c) {
    std::ostringstream out;
    write_notes(out, c.notes);
    write_ratings(out, c.ratings);
    write_ground_truth(out, c.truth);
    return out.str();
}

bool is_partisan(NoteCategory c) { return c == NoteCategory::PartisanA || c == NoteCategory::PartisanB; }

Cluster home_cluster(NoteCategory c) { return c == NoteCategory::PartisanA ? Cluster::A : Cluster::B; }

}  // namespace

TEST_CASE("generate_community is seeded") {
    const SynthConfig config;
    CHECK(dump(generate_community(config)) == dump(generate_community(config)));
    SynthConfig other = config;
    other.seed = config.seed + 1;
    CHECK(dump(generate_community(other)) != dump(generate_community(config)));
}

TEST_CASE("default community shape") {
    const SynthConfig config;
    const auto c = generate_community(config);

    CHECK(c.truth.raters.size() == 200);
    CHECK(c.truth.notes.size() == 200);
    CHECK(c.notes.size() == 200);
    for (const auto& n : c.notes.notes()) REQUIRE(c.truth.notes.count(n.note_id) == 1);

    std::map<std::string, int> per_rater;
    for (const auto& r : c.ratings.ratings()) {
        REQUIRE(c.truth.raters.count(r.rater_id) == 1);
        REQUIRE(c.notes.find(r.note_id) != nullptr);
        ++per_rater[r.rater_id];
    }
    for (const auto& [id, n] : per_rater) {
        REQUIRE(n >= config.ratings_per_rater_min);
        REQUIRE(n <= config.ratings_per_rater_max);
    }

    SUBCASE("ratings follow their note, strictly increasing per note") {
        std::map<std::string, std::vector<Millis>> times;
        for (const auto& r : c.ratings.ratings()) times[r.note_id].push_back(r.created_at);
        for (auto& [id, ts] : times) {
            const Millis created = c.notes.find(id)->created_at;
            std::sort(ts.begin(), ts.end());
            REQUIRE(ts.front() > created);
            for (std::size_t k = 1; k < ts.size(); ++k) REQUIRE(ts[k] > ts[k - 1]);
        }
    }

    SUBCASE("cross-cluster helpful rate on partisan notes is near 0.1") {
        std::size_t helpful = 0, total = 0;
        for (const auto& r : c.ratings.ratings()) {
            const auto cat = c.truth.notes.at(r.note_id);
            if (!is_partisan(cat) || c.truth.raters.at(r.rater_id) == home_cluster(cat)) continue;
            ++total;
            if (r.value == RatingValue::Helpful) ++helpful;
        }
        REQUIRE(total > 0);
        const double rate = static_cast<double>(helpful) / static_cast<double>(total);
        MESSAGE("cross-cluster ratings " << total << ", helpful rate " << rate);
        CHECK(std::abs(rate - 0.1) <= 0.05);
    }

    SUBCASE("bridging notes are rated more helpful than low-quality notes") {
        std::vector<RatingValue> bridging, low;
        for (const auto& r : c.ratings.ratings()) {
            const auto cat = c.truth.notes.at(r.note_id);
            if (cat == NoteCategory::Bridging) bridging.push_back(r.value);
            if (cat == NoteCategory::LowQuality) low.push_back(r.value);
        }
        CHECK(helpful_ratio(bridging) > helpful_ratio(low));
    }

    SUBCASE("every category averages at least the note minimum") {
        std::map<NoteCategory, std::size_t> ratings, notes;
        for (const auto& [id, cat] : c.truth.notes) ++notes[cat];
        for (const auto& r : c.ratings.ratings()) ++ratings[c.truth.notes.at(r.note_id)];
        for (const auto& [cat, n] : notes)
            CHECK(static_cast<double>(ratings[cat]) / static_cast<double>(n) >= config.min_ratings_per_note);
    }

    SUBCASE("somewhat helpful values are present") {
        std::size_t somewhat = 0;
        for (const auto& r : c.ratings.ratings()) somewhat += r.value == RatingValue::SomewhatHelpful;
        const double share = static_cast<double>(somewhat) / static_cast<double>(c.ratings.size());
        CHECK(std::abs(share - config.somewhat_prob) < 0.02);
    }

    SUBCASE("exports pass ingest validation") {
        std::stringstream ratings, notes, truth;
        write_ratings(ratings, c.ratings);
        write_notes(notes, c.notes);
        write_ground_truth(truth, c.truth);
        CHECK(parse_ratings(ratings) == c.ratings);
        CHECK(parse_notes(notes) == c.notes);
        const auto back = parse_ground_truth(truth);
        CHECK(back.notes == c.truth.notes);
        CHECK(back.raters == c.truth.raters);
    }
}

TEST_CASE("no bridging notes requested") {
    SynthConfig config;
    config.n_bridging_notes = 0;
    const auto c = generate_community(config);
    for (const auto& [id, cat] : c.truth.notes) REQUIRE(cat != NoteCategory::Bridging);
    CHECK(c.truth.notes.size() == 150);
}

TEST_CASE("infeasible configurations") {
    auto rejects = [](auto mutate) {
        SynthConfig config;
        mutate(config);
        CHECK_THROWS_AS(config.validate(), ConfigError);
        CHECK_THROWS_AS(generate_community(config), ConfigError);
    };
    rejects([](SynthConfig& c) { c.ratings_per_rater_min = c.ratings_per_rater_max = 0; });
    rejects([](SynthConfig& c) { c.ratings_per_rater_min = 30; c.ratings_per_rater_max = 20; });
    rejects([](SynthConfig& c) { c.n_raters_per_cluster = 0; });
    rejects([](SynthConfig& c) { c.in_cluster_helpful_prob = 1.5; });
    rejects([](SynthConfig& c) { c.somewhat_prob = -0.1; });
    rejects([](SynthConfig& c) { c.n_partisan_notes_per_cluster = -1; });
    // Too few raters to give each note five ratings in expectation.
    rejects([](SynthConfig& c) { c.n_raters_per_cluster = 2; });
}

TEST_CASE("ground truth parsing errors") {
    std::istringstream bad("id\tkind\tcategory\nx\tnote\tSideways\n");
    CHECK_THROWS_AS(parse_ground_truth(bad), RowError);
    std::istringstream no_header("");
    CHECK_THROWS_AS(parse_ground_truth(no_header), SchemaError);
}
