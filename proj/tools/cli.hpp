#pragma once
// Batch commands behind the bridgescore executable. Each returns a process
// exit status:
//   0 success, 1 unexpected failure, 2 input/schema/config error,
//   3 pipeline error, 4 replay digest mismatch.

#include <iosfwd>
#include <string>
#include <vector>

#include "bridgescore/core_model.hpp"
#include "bridgescore/synth.hpp"

namespace bridgescore::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kFailure = 1, kInputError = 2, kPipelineError = 3, kReplayMismatch = 4 };

struct ScoreOptions {
    std::string notes_path;
    std::string ratings_path;
    std::string out_dir = ".";
    ScoringConfig config;
};

struct SynthOptions {
    std::string out_dir = ".";
    SynthConfig config;
};

struct AbtestOptions {
    std::string input_path;
    std::string out_dir = ".";
};

// Writes note_scores.tsv, rater_stats.tsv, diagnostics.json, manifest.json.
int cmd_score(const ScoreOptions& opts, std::ostream& log);
// Writes notes.tsv, ratings.tsv, ground_truth.tsv, manifest.json.
int cmd_synth(const SynthOptions& opts, std::ostream& log);
// Writes abtest_report.tsv, manifest.json.
int cmd_abtest(const AbtestOptions& opts, std::ostream& log);
// Runs the scorer and the supermajority baseline on the same input and
// writes comparison.tsv, comparison.json, manifest.json.
int cmd_compare(const ScoreOptions& opts, std::ostream& log);
// Re-runs the command recorded in a manifest into `out_dir` and checks
// that input and output digests match.
int cmd_replay(const std::string& manifest_path, const std::string& out_dir, std::ostream& log);

std::string sha256_file(const std::string& path);

// Full command-line entry point.
int run(int argc, char** argv);

}  // namespace bridgescore::cli
