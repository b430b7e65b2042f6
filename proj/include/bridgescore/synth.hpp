#pragma once
// Seeded two-cluster rating communities with known note categories.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

#include "bridgescore/ingest.hpp"

namespace bridgescore {

enum class NoteCategory { PartisanA, PartisanB, Bridging, LowQuality };
enum class Cluster { A, B };

std::string_view to_token(NoteCategory c) noexcept;
std::string_view to_token(Cluster c) noexcept;

struct SynthConfig {
    int n_raters_per_cluster = 100;
    int n_partisan_notes_per_cluster = 50;
    int n_bridging_notes = 50;
    int n_low_quality_notes = 50;
    int ratings_per_rater_min = 15;
    int ratings_per_rater_max = 40;

    double in_cluster_helpful_prob = 0.9;
    double cross_cluster_helpful_prob_partisan = 0.1;
    double helpful_prob_bridging = 0.85;
    double helpful_prob_low_quality = 0.2;
    // Replaces the drawn value with SomewhatHelpful.
    double somewhat_prob = 0.07;

    // Exposure: expected share of a rater's ratings landing on partisan notes
    // of their own / the other cluster. The remainder is spread evenly over
    // bridging and low-quality notes.
    double own_partisan_share = 0.45;
    double other_partisan_share = 0.05;

    // Density the generated community has to support in expectation.
    int min_ratings_per_note = 5;
    int min_ratings_per_rater = 10;

    std::uint64_t seed = 7;

    // Throws ConfigError when the community would be empty or too sparse.
    void validate() const;
};

struct GroundTruth {
    std::map<std::string, NoteCategory> notes;
    std::map<std::string, Cluster> raters;
};

struct Community {
    NoteSet notes;
    RatingSet ratings;
    GroundTruth truth;
};

Community generate_community(const SynthConfig& config);

// id, kind (note|rater), category
void write_ground_truth(std::ostream& out, const GroundTruth& truth);
GroundTruth parse_ground_truth(std::istream& in);

}  // namespace bridgescore
