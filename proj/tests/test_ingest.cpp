#include <doctest.h>

#include <map>
#include <random>
#include <sstream>

#include "bridgescore/errors.hpp"
#include "bridgescore/ingest.hpp"
#include "test_support.hpp"

using namespace bridgescore;
using testsupport::rating;

namespace {

constexpr const char* kRatingsHeader = "noteId\traterParticipantId\tcreatedAtMillis\thelpfulnessLevel\n";
constexpr const char* kNotesHeader =
    "noteId\tnoteAuthorParticipantId\ttweetId\tcreatedAtMillis\tclassification\tsummary\n";

RatingSet parse_r(const std::string& text) {
    std::istringstream in(text);
    return parse_ratings(in);
}

NoteSet parse_n(const std::string& text) {
    std::istringstream in(text);
    return parse_notes(in);
}

// Brute-force recount used as the oracle for the density filter examples.
struct Counts {
    std::map<std::string, int> raters;
    std::map<std::string, int> notes;
};

Counts recount(const std::vector<Rating>& rs) {
    Counts c;
    for (const auto& r : rs) {
        ++c.raters[r.rater_id];
        ++c.notes[r.note_id];
    }
    return c;
}

}  // namespace

TEST_CASE("parse_ratings") {
    SUBCASE("one well-formed row") {
        auto rs = parse_r(std::string(kRatingsHeader) + "n1\tu1\t1000\tHELPFUL\n");
        REQUIRE(rs.size() == 1);
        CHECK(rs.ratings()[0] == rating("u1", "n1", RatingValue::Helpful, 1000));
    }
    SUBCASE("header only") { CHECK(parse_r(kRatingsHeader).empty()); }
    SUBCASE("columns located by name, CRLF tolerated") {
        auto rs = parse_r("helpfulnessLevel\textra\tcreatedAtMillis\traterParticipantId\tnoteId\r\n"
                          "SOMEWHAT_HELPFUL\tz\t7\tu\tn\r\n");
        REQUIRE(rs.size() == 1);
        CHECK(rs.ratings()[0] == rating("u", "n", RatingValue::SomewhatHelpful, 7));
    }
    SUBCASE("unknown helpfulness token is a row error at its line") {
        try {
            parse_r(std::string(kRatingsHeader) + "n1\tu1\t1\tHELPFUL\nn2\tu1\t2\tVERY_HELPFUL\n");
            FAIL("expected RowError");
        } catch (const RowError& e) {
            CHECK(e.line() == 3);
        }
    }
    SUBCASE("bad timestamp") {
        CHECK_THROWS_AS(parse_r(std::string(kRatingsHeader) + "n1\tu1\tyesterday\tHELPFUL\n"), RowError);
        CHECK_THROWS_AS(parse_r(std::string(kRatingsHeader) + "n1\tu1\t-5\tHELPFUL\n"), RowError);
    }
    SUBCASE("missing column names the column") {
        try {
            parse_r("noteId\traterParticipantId\thelpfulnessLevel\n");
            FAIL("expected SchemaError");
        } catch (const SchemaError& e) {
            CHECK(std::string(e.what()).find("createdAtMillis") != std::string::npos);
        }
    }
    SUBCASE("empty stream has no header") { CHECK_THROWS_AS(parse_r(""), SchemaError); }
    SUBCASE("duplicate pair reports its line") {
        try {
            parse_r(std::string(kRatingsHeader) + "n1\tu1\t1\tHELPFUL\nn2\tu1\t1\tHELPFUL\nn1\tu1\t3\tNOT_HELPFUL\n");
            FAIL("expected DuplicateError");
        } catch (const DuplicateError& e) {
            CHECK(e.line() == 4);
        }
    }
}

TEST_CASE("parse_notes") {
    SUBCASE("misleading classification") {
        auto ns = parse_n(std::string(kNotesHeader) + "n1\ta1\tt1\t5\tMISINFORMED_OR_POTENTIALLY_MISLEADING\ttext\n");
        REQUIRE(ns.size() == 1);
        CHECK(ns.notes()[0].classification == Classification::Misleading);
        CHECK(ns.notes()[0].author_id == "a1");
    }
    SUBCASE("other classifications") {
        auto ns = parse_n(std::string(kNotesHeader) + "n1\ta\tt\t5\tNOT_MISLEADING\ts\nn2\ta\tt\t5\tWHATEVER\ts\n");
        CHECK(ns.notes()[0].classification == Classification::NotMisleading);
        CHECK(ns.notes()[1].classification == Classification::Unknown);
    }
    SUBCASE("empty body") { CHECK(parse_n(kNotesHeader).empty()); }
    SUBCASE("duplicate note id") {
        CHECK_THROWS_AS(parse_n(std::string(kNotesHeader) + "n1\ta\tt\t5\tNOT_MISLEADING\ts\nn1\tb\tt\t6\tNOT_MISLEADING\ts\n"),
                        DuplicateError);
    }
}

TEST_CASE("property: ratings TSV round trip") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> v(0, 2);
    std::uniform_int_distribution<Millis> t(0, 1'700'000'000'000);
    for (int trial = 0; trial < 20; ++trial) {
        RatingSet rs("generated");
        for (int u = 0; u < 8; ++u)
            for (int n = 0; n < 6; ++n)
                if ((u + n + trial) % 3 != 0)
                    rs.add(rating("rater" + std::to_string(u), "note" + std::to_string(n),
                                  static_cast<RatingValue>(v(rng)), t(rng)));
        std::stringstream buf;
        write_ratings(buf, rs);
        REQUIRE(parse_ratings(buf) == rs);
    }

    NoteSet ns(std::vector<Note>{{"n1", "a", "t", 4, Classification::Misleading, "plain"},
                                 {"n2", "b", "t2", 9, Classification::Unknown, "x"}});
    std::stringstream buf;
    write_notes(buf, ns);
    CHECK(parse_notes(buf) == ns);
}

TEST_CASE("apply_density_filter") {
    const ScoringConfig config;

    SUBCASE("one rater, twenty singly rated notes") {
        std::vector<Rating> rs;
        for (int n = 0; n < 20; ++n) rs.push_back(rating("u", "n" + std::to_string(n), RatingValue::Helpful));
        CHECK(apply_density_filter(RatingSet(rs, "t"), config).empty());
    }

    SUBCASE("ten raters on the same five notes are all kept") {
        // Each rater has only 5 ratings, so use a rater minimum the fixture can meet.
        std::vector<Rating> rs;
        for (int u = 0; u < 10; ++u)
            for (int n = 0; n < 5; ++n)
                rs.push_back(rating("u" + std::to_string(u), "n" + std::to_string(n), RatingValue::Helpful));
        ScoringConfig c = config;
        c.min_ratings_per_rater = 5;
        const auto m = apply_density_filter(RatingSet(rs, "t"), c);
        CHECK(m.n_raters() == 10);
        CHECK(m.n_notes() == 5);
        CHECK(m.n_entries() == 50);
    }

    SUBCASE("a sparse rater takes marginal notes down with it") {
        // Eight regular raters share ten solid notes. Nine marginal notes hold
        // four regular ratings each plus one from a rater with only nine ratings.
        std::vector<Rating> rs;
        for (int s = 0; s < 10; ++s)
            for (int g = 0; g < 8; ++g) rs.push_back(rating("g" + std::to_string(g), "s" + std::to_string(s), RatingValue::Helpful));
        for (int i = 0; i < 9; ++i) {
            const std::string note = "m" + std::to_string(i);
            for (int k = 0; k < 4; ++k) rs.push_back(rating("g" + std::to_string((i + k) % 8), note, RatingValue::NotHelpful));
            rs.push_back(rating("sparse", note, RatingValue::Helpful));
        }

        const Counts before = recount(rs);
        REQUIRE(before.raters.at("sparse") == 9);
        for (int i = 0; i < 9; ++i) REQUIRE(before.notes.at("m" + std::to_string(i)) == 5);

        // Oracle: drop raters below 10 by raw count, then notes below 5.
        std::vector<Rating> expected;
        for (const auto& r : rs)
            if (before.raters.at(r.rater_id) >= 10) expected.push_back(r);
        const Counts mid = recount(expected);
        std::erase_if(expected, [&](const Rating& r) { return mid.notes.at(r.note_id) < 5; });
        const Counts after = recount(expected);
        REQUIRE(after.raters.size() == 8);
        REQUIRE(after.notes.size() == 10);

        const auto m = apply_density_filter(RatingSet(rs, "t"), config);
        CHECK(m.n_raters() == after.raters.size());
        CHECK(m.n_notes() == after.notes.size());
        CHECK(m.n_entries() == expected.size());
        CHECK_FALSE(m.rater_ordinal("sparse").has_value());
        for (int i = 0; i < 9; ++i) CHECK_FALSE(m.note_ordinal("m" + std::to_string(i)).has_value());
        for (std::size_t c = 0; c < m.n_notes(); ++c)
            CHECK(m.ratings_per_note()[c] == static_cast<std::size_t>(after.notes.at(m.note_ids()[c])));
    }

    SUBCASE("single pass versus fixed point") {
        // r has 10 raw ratings, one on a note nobody else rates. The note filter
        // drops that note, leaving r at 9; only the fixed-point variant then
        // removes r (and everything that depended on r).
        std::vector<Rating> rs;
        for (int n = 0; n < 9; ++n) rs.push_back(rating("r", "n" + std::to_string(n), RatingValue::Helpful));
        rs.push_back(rating("r", "lonely", RatingValue::Helpful));
        for (int n = 0; n < 10; ++n)
            for (int g = 1; g <= 4; ++g) rs.push_back(rating("g" + std::to_string(g), "n" + std::to_string(n), RatingValue::Helpful));

        const RatingSet set(rs, "t");
        const auto once = apply_density_filter(set, config);
        CHECK(once.rater_ordinal("r").has_value());
        ScoringConfig fp = config;
        fp.density_filter_fixed_point = true;
        const auto fixed = apply_density_filter(set, fp);
        CHECK_FALSE(fixed.rater_ordinal("r").has_value());
        for (auto c : fixed.ratings_per_note()) CHECK(c >= 5u);
        for (auto c : fixed.ratings_per_rater()) CHECK(c >= 10u);
    }

    SUBCASE("property: note minimum holds and output is order-deterministic") {
        std::mt19937_64 rng(23);
        std::bernoulli_distribution rated(0.3);
        for (int trial = 0; trial < 30; ++trial) {
            std::vector<Rating> rs;
            for (int u = 0; u < 30; ++u)
                for (int n = 0; n < 40; ++n)
                    if (rated(rng)) rs.push_back(rating("u" + std::to_string(u), "n" + std::to_string(n), RatingValue::Helpful));
            std::shuffle(rs.begin(), rs.end(), rng);
            const RatingSet set(rs, "t");
            const auto a = apply_density_filter(set, config);
            const auto b = apply_density_filter(set, config);
            for (auto c : a.ratings_per_note()) REQUIRE(c >= 5u);
            REQUIRE(a.rater_ids() == b.rater_ids());
            REQUIRE(a.note_ids() == b.note_ids());
            REQUIRE(a.n_entries() == b.n_entries());
        }
    }
}
