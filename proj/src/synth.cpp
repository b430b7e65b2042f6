#include "bridgescore/synth.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <vector>

#include "bridgescore/errors.hpp"
#include "tsv.hpp"

namespace bridgescore {

namespace {

constexpr Millis kEpochBase = 1'650'000'000'000;  // 2022-04-15
constexpr Millis kMinute = 60'000;

struct SynthNote {
    std::string id;
    NoteCategory category;
    Millis created_at;
};

std::string padded(std::string_view prefix, int i) {
    std::string digits = std::to_string(i);
    if (digits.size() < 4) digits.insert(0, 4 - digits.size(), '0');
    return std::string(prefix) + digits;
}

// Sampling weight of a note for a rater of `cluster`, before normalization.
double exposure(const SynthConfig& c, Cluster cluster, NoteCategory category) {
    const double neutral_share = 1.0 - c.own_partisan_share - c.other_partisan_share;
    const int neutral_notes = c.n_bridging_notes + c.n_low_quality_notes;
    switch (category) {
        case NoteCategory::PartisanA:
        case NoteCategory::PartisanB: {
            const bool own = (category == NoteCategory::PartisanA) == (cluster == Cluster::A);
            return (own ? c.own_partisan_share : c.other_partisan_share) / c.n_partisan_notes_per_cluster;
        }
        case NoteCategory::Bridging:
        case NoteCategory::LowQuality: return neutral_share / neutral_notes;
    }
    return 0.0;
}

double helpful_probability(const SynthConfig& c, Cluster cluster, NoteCategory category) {
    switch (category) {
        case NoteCategory::PartisanA:
            return cluster == Cluster::A ? c.in_cluster_helpful_prob : c.cross_cluster_helpful_prob_partisan;
        case NoteCategory::PartisanB:
            return cluster == Cluster::B ? c.in_cluster_helpful_prob : c.cross_cluster_helpful_prob_partisan;
        case NoteCategory::Bridging: return c.helpful_prob_bridging;
        case NoteCategory::LowQuality: return c.helpful_prob_low_quality;
    }
    return 0.0;
}

std::vector<NoteCategory> present_categories(const SynthConfig& c) {
    std::vector<NoteCategory> out;
    if (c.n_partisan_notes_per_cluster > 0) {
        out.push_back(NoteCategory::PartisanA);
        out.push_back(NoteCategory::PartisanB);
    }
    if (c.n_bridging_notes > 0) out.push_back(NoteCategory::Bridging);
    if (c.n_low_quality_notes > 0) out.push_back(NoteCategory::LowQuality);
    return out;
}

int category_size(const SynthConfig& c, NoteCategory category) {
    switch (category) {
        case NoteCategory::PartisanA:
        case NoteCategory::PartisanB: return c.n_partisan_notes_per_cluster;
        case NoteCategory::Bridging: return c.n_bridging_notes;
        case NoteCategory::LowQuality: return c.n_low_quality_notes;
    }
    return 0;
}

}  // namespace

std::string_view to_token(NoteCategory c) noexcept {
    switch (c) {
        case NoteCategory::PartisanA: return "PartisanA";
        case NoteCategory::PartisanB: return "PartisanB";
        case NoteCategory::Bridging: return "Bridging";
        case NoteCategory::LowQuality: return "LowQuality";
    }
    return "";
}

std::string_view to_token(Cluster c) noexcept { return c == Cluster::A ? "A" : "B"; }

void SynthConfig::validate() const {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    auto prob = [&](double p, const char* name) {
        require(p >= 0.0 && p <= 1.0, std::string(name) + " must lie in [0, 1]");
    };
    prob(in_cluster_helpful_prob, "in_cluster_helpful_prob");
    prob(cross_cluster_helpful_prob_partisan, "cross_cluster_helpful_prob_partisan");
    prob(helpful_prob_bridging, "helpful_prob_bridging");
    prob(helpful_prob_low_quality, "helpful_prob_low_quality");
    prob(somewhat_prob, "somewhat_prob");
    prob(own_partisan_share, "own_partisan_share");
    prob(other_partisan_share, "other_partisan_share");
    require(own_partisan_share + other_partisan_share <= 1.0, "partisan shares must sum to at most 1");

    require(n_raters_per_cluster >= 1, "n_raters_per_cluster must be >= 1");
    require(n_partisan_notes_per_cluster >= 0 && n_bridging_notes >= 0 && n_low_quality_notes >= 0,
            "note counts must be >= 0");
    const int total_notes = 2 * n_partisan_notes_per_cluster + n_bridging_notes + n_low_quality_notes;
    require(total_notes >= 1, "community has no notes");
    require(ratings_per_rater_min >= 0 && ratings_per_rater_min <= ratings_per_rater_max,
            "ratings per rater range is invalid");
    require(ratings_per_rater_max <= total_notes, "ratings_per_rater_max exceeds the number of notes");
    require(ratings_per_rater_max >= min_ratings_per_rater,
            "raters cannot reach min_ratings_per_rater with this ratings range");

    // Expected ratings per note, per category, must reach the note minimum.
    const double mean_k = 0.5 * (ratings_per_rater_min + ratings_per_rater_max);
    const auto categories = present_categories(*this);
    for (NoteCategory target : categories) {
        double expected = 0.0;
        for (Cluster cluster : {Cluster::A, Cluster::B}) {
            double total_weight = 0.0;
            for (NoteCategory cat : categories) total_weight += exposure(*this, cluster, cat) * category_size(*this, cat);
            if (total_weight <= 0.0) continue;
            const double per_rater = std::min(1.0, mean_k * exposure(*this, cluster, target) / total_weight);
            expected += n_raters_per_cluster * per_rater;
        }
        require(expected >= min_ratings_per_note,
                "infeasible density: " + std::string(to_token(target)) + " notes expect " +
                    std::to_string(expected) + " ratings, below " + std::to_string(min_ratings_per_note));
    }
}

Community generate_community(const SynthConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.seed);

    std::vector<SynthNote> notes;
    auto add_notes = [&](NoteCategory cat, std::string_view prefix, int count) {
        for (int i = 0; i < count; ++i) notes.push_back({padded(prefix, i), cat, 0});
    };
    add_notes(NoteCategory::PartisanA, "note-pa-", config.n_partisan_notes_per_cluster);
    add_notes(NoteCategory::PartisanB, "note-pb-", config.n_partisan_notes_per_cluster);
    add_notes(NoteCategory::Bridging, "note-br-", config.n_bridging_notes);
    add_notes(NoteCategory::LowQuality, "note-lq-", config.n_low_quality_notes);
    // Creation order is shuffled so categories interleave in time.
    std::vector<std::size_t> order(notes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t pos = 0; pos < order.size(); ++pos)
        notes[order[pos]].created_at = kEpochBase + static_cast<Millis>(pos) * 10 * kMinute;

    struct Rater {
        std::string id;
        Cluster cluster;
    };
    std::vector<Rater> raters;
    for (int i = 0; i < config.n_raters_per_cluster; ++i) raters.push_back({padded("rater-a-", i), Cluster::A});
    for (int i = 0; i < config.n_raters_per_cluster; ++i) raters.push_back({padded("rater-b-", i), Cluster::B});

    // Weighted sampling without replacement (exponential keys).
    std::vector<std::vector<std::size_t>> raters_of_note(notes.size());
    std::uniform_int_distribution<int> count_dist(config.ratings_per_rater_min, config.ratings_per_rater_max);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t r = 0; r < raters.size(); ++r) {
        const int k = count_dist(rng);
        std::vector<std::pair<double, std::size_t>> keys;
        keys.reserve(notes.size());
        for (std::size_t n = 0; n < notes.size(); ++n) {
            const double w = exposure(config, raters[r].cluster, notes[n].category);
            const double u = unit(rng);
            if (w <= 0.0) continue;
            keys.emplace_back(std::log(std::max(u, 1e-300)) / w, n);
        }
        const auto take = std::min<std::size_t>(static_cast<std::size_t>(k), keys.size());
        std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(take), keys.end(),
                          [](const auto& a, const auto& b) { return a.first > b.first; });
        for (std::size_t i = 0; i < take; ++i) raters_of_note[keys[i].second].push_back(r);
    }

    std::vector<Rating> ratings;
    std::uniform_int_distribution<Millis> gap(5 * kMinute, 180 * kMinute);
    for (std::size_t n = 0; n < notes.size(); ++n) {
        auto& who = raters_of_note[n];
        std::shuffle(who.begin(), who.end(), rng);
        Millis t = notes[n].created_at;
        for (std::size_t r : who) {
            t += gap(rng);
            const double p = helpful_probability(config, raters[r].cluster, notes[n].category);
            RatingValue v = std::bernoulli_distribution(p)(rng) ? RatingValue::Helpful : RatingValue::NotHelpful;
            if (std::bernoulli_distribution(config.somewhat_prob)(rng)) v = RatingValue::SomewhatHelpful;
            ratings.push_back({raters[r].id, notes[n].id, v, t});
        }
    }
    std::sort(ratings.begin(), ratings.end(), [](const Rating& a, const Rating& b) {
        if (a.created_at != b.created_at) return a.created_at < b.created_at;
        if (a.rater_id != b.rater_id) return a.rater_id < b.rater_id;
        return a.note_id < b.note_id;
    });

    Community out;
    std::vector<Note> note_rows;
    for (std::size_t n = 0; n < notes.size(); ++n) {
        const auto& sn = notes[n];
        const Classification cls =
            sn.category == NoteCategory::LowQuality ? Classification::NotMisleading : Classification::Misleading;
        note_rows.push_back({sn.id, padded("author-", static_cast<int>(n)), padded("tweet-", static_cast<int>(n)),
                             sn.created_at, cls, std::string(to_token(sn.category)) + " synthetic note"});
        out.truth.notes.emplace(sn.id, sn.category);
    }
    std::sort(note_rows.begin(), note_rows.end(),
              [](const Note& a, const Note& b) { return a.created_at < b.created_at; });
    out.notes = NoteSet(std::move(note_rows));
    out.ratings = RatingSet(std::move(ratings), "synthetic");
    for (const auto& r : raters) out.truth.raters.emplace(r.id, r.cluster);
    return out;
}

void write_ground_truth(std::ostream& out, const GroundTruth& truth) {
    out << "id\tkind\tcategory\n";
    for (const auto& [id, cat] : truth.notes) out << id << "\tnote\t" << to_token(cat) << '\n';
    for (const auto& [id, cl] : truth.raters) out << id << "\trater\t" << to_token(cl) << '\n';
}

GroundTruth parse_ground_truth(std::istream& in) {
    std::string line;
    if (!detail::read_line(in, line)) throw SchemaError("missing header row");
    const detail::Header header(line, '\t');
    const std::size_t c_id = header.require("id");
    const std::size_t c_kind = header.require("kind");
    const std::size_t c_cat = header.require("category");
    GroundTruth gt;
    std::size_t line_no = 1;
    while (detail::read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto f = detail::split(line, '\t');
        if (f.size() != header.width()) throw RowError("wrong field count", line_no);
        const std::string id(f[c_id]);
        if (f[c_kind] == "note") {
            if (f[c_cat] == "PartisanA") gt.notes[id] = NoteCategory::PartisanA;
            else if (f[c_cat] == "PartisanB") gt.notes[id] = NoteCategory::PartisanB;
            else if (f[c_cat] == "Bridging") gt.notes[id] = NoteCategory::Bridging;
            else if (f[c_cat] == "LowQuality") gt.notes[id] = NoteCategory::LowQuality;
            else throw RowError("unknown note category", line_no);
        } else if (f[c_kind] == "rater") {
            if (f[c_cat] == "A") gt.raters[id] = Cluster::A;
            else if (f[c_cat] == "B") gt.raters[id] = Cluster::B;
            else throw RowError("unknown rater cluster", line_no);
        } else {
            throw RowError("unknown kind", line_no);
        }
    }
    return gt;
}

}  // namespace bridgescore
