#include "cli.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bridgescore/abstats.hpp"
#include "bridgescore/config_io.hpp"
#include "bridgescore/errors.hpp"
#include "bridgescore/ingest.hpp"
#include "bridgescore/pipeline.hpp"

namespace bridgescore::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Maps library exceptions onto exit codes.
int guarded(std::ostream& log, const std::function<int()>& body) {
    try {
        return body();
    } catch (const PipelineError& e) {
        log << "error: " << e.what() << '\n';
        return kPipelineError;
    } catch (const DivergenceError& e) {
        log << "error: " << e.what() << '\n';
        return kPipelineError;
    } catch (const EmptyInputError& e) {
        log << "error: " << e.what() << '\n';
        return kPipelineError;
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const json::exception& e) {
        log << "error: malformed manifest: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kFailure;
    }
}

fs::path prepare_out_dir(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec || !fs::is_directory(p)) throw InvalidInputError("cannot create output directory " + dir);
    return p;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInputError("cannot write " + path.string());
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    auto out = open_out(path);
    out << text;
}

json file_entry(const std::string& role, const fs::path& path) {
    return {{"role", role}, {"path", fs::absolute(path).lexically_normal().string()}, {"sha256", sha256_file(path.string())}};
}

void write_manifest(const fs::path& dir, json manifest, const std::vector<std::string>& outputs) {
    json outs = json::array();
    for (const auto& name : outputs) outs.push_back({{"name", name}, {"sha256", sha256_file((dir / name).string())}});
    manifest["tool_version"] = kToolVersion;
    manifest["outputs"] = outs;
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

int run_score(const ScoreOptions& opts, std::ostream& log) {
    const NoteSet notes = read_notes_file(opts.notes_path);
    const RatingSet ratings = read_ratings_file(opts.ratings_path);
    const ScoringRun run = score_notes(notes, ratings, opts.config);
    const fs::path dir = prepare_out_dir(opts.out_dir);

    {
        auto out = open_out(dir / "note_scores.tsv");
        write_note_scores(out, run.final_scores);
    }
    {
        auto out = open_out(dir / "rater_stats.tsv");
        write_rater_stats(out, run.rater_records);
    }
    write_text(dir / "diagnostics.json", diagnostics_json(run));

    json manifest = {{"command", "score"},
                     {"seed", opts.config.seed},
                     {"config", opts.config},
                     {"inputs", {file_entry("notes", opts.notes_path), file_entry("ratings", opts.ratings_path)}}};
    write_manifest(dir, manifest, {"note_scores.tsv", "rater_stats.tsv", "diagnostics.json"});

    for (const auto& s : run.diagnostics) {
        log << s.stage << ": " << s.raters << " raters, " << s.notes << " notes, " << s.ratings << " ratings\n";
    }
    return kOk;
}

int run_synth(const SynthOptions& opts, std::ostream& log) {
    const Community community = generate_community(opts.config);
    const fs::path dir = prepare_out_dir(opts.out_dir);
    {
        auto out = open_out(dir / "notes.tsv");
        write_notes(out, community.notes);
    }
    {
        auto out = open_out(dir / "ratings.tsv");
        write_ratings(out, community.ratings);
    }
    {
        auto out = open_out(dir / "ground_truth.tsv");
        write_ground_truth(out, community.truth);
    }
    json manifest = {{"command", "synth"}, {"seed", opts.config.seed}, {"synth_config", opts.config},
                     {"inputs", json::array()}};
    write_manifest(dir, manifest, {"notes.tsv", "ratings.tsv", "ground_truth.tsv"});
    log << "generated " << community.notes.size() << " notes and " << community.ratings.size() << " ratings\n";
    return kOk;
}

int run_abtest(const AbtestOptions& opts, std::ostream& log) {
    std::ifstream in(opts.input_path, std::ios::binary);
    if (!in) throw SchemaError("cannot open A/B input " + opts.input_path);
    const auto rows = parse_ab_rows(in);

    std::ostringstream report;
    write_delta_header(report);
    for (const AbRow& row : rows) {
        DeltaReport d;
        try {
            d = engagement_delta(row.test, row.control);
        } catch (const UndefinedRatioError& e) {
            throw RowError(std::string(e.what()) + " (" + row.label + ")", row.line);
        }
        write_delta_row(report, row.label, d);
    }

    const fs::path dir = prepare_out_dir(opts.out_dir);
    write_text(dir / "abtest_report.tsv", report.str());
    json manifest = {{"command", "abtest"}, {"inputs", {file_entry("abtest", opts.input_path)}}};
    write_manifest(dir, manifest, {"abtest_report.tsv"});
    log << "ci = pctDifference +/- 100 * 1.96 * standardError / pooledRate\n";
    return kOk;
}

int run_compare(const ScoreOptions& opts, std::ostream& log) {
    const NoteSet notes = read_notes_file(opts.notes_path);
    const RatingSet ratings = read_ratings_file(opts.ratings_path);
    const ScoringRun run = score_notes(notes, ratings, opts.config);

    std::set<std::string> universe;
    for (const auto& [id, s] : run.final_scores) universe.insert(id);
    const auto baseline = supermajority_labels(ratings.ratings(), opts.config, &universe);
    const ComparisonReport report = compare_scorers(run, baseline);

    const fs::path dir = prepare_out_dir(opts.out_dir);
    {
        auto out = open_out(dir / "comparison.tsv");
        write_comparison(out, report);
    }
    json confusion = json::object();
    for (int m = 0; m < 3; ++m) {
        json row = json::object();
        for (int b = 0; b < 3; ++b)
            row[std::string(to_token(static_cast<NoteLabel>(b)))] = report.confusion[m][b];
        confusion[std::string(to_token(static_cast<NoteLabel>(m)))] = row;
    }
    json summary = {{"notes", report.pairs.size()},
                    {"disagreements", report.disagreements.size()},
                    {"confusion_model_by_baseline", confusion}};
    write_text(dir / "comparison.json", summary.dump(2) + "\n");

    json manifest = {{"command", "compare"},
                     {"seed", opts.config.seed},
                     {"config", opts.config},
                     {"inputs", {file_entry("notes", opts.notes_path), file_entry("ratings", opts.ratings_path)}}};
    write_manifest(dir, manifest, {"comparison.tsv", "comparison.json"});
    log << report.disagreements.size() << " of " << report.pairs.size() << " notes labeled differently\n";
    return kOk;
}

std::string input_path(const json& manifest, const std::string& role) {
    for (const auto& in : manifest.at("inputs"))
        if (in.at("role") == role) return in.at("path").get<std::string>();
    throw InvalidInputError("manifest has no '" + role + "' input");
}

int run_replay(const std::string& manifest_path, const std::string& out_dir, std::ostream& log) {
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw SchemaError("cannot open manifest " + manifest_path);
    const json manifest = json::parse(in);

    for (const auto& input : manifest.at("inputs")) {
        const auto path = input.at("path").get<std::string>();
        if (!fs::exists(path) || sha256_file(path) != input.at("sha256").get<std::string>()) {
            log << "replay: input changed or missing: " << path << '\n';
            return kReplayMismatch;
        }
    }

    const std::string command = manifest.at("command");
    int status = kFailure;
    if (command == "score" || command == "compare") {
        ScoreOptions opts;
        opts.notes_path = input_path(manifest, "notes");
        opts.ratings_path = input_path(manifest, "ratings");
        opts.out_dir = out_dir;
        opts.config = manifest.at("config").get<ScoringConfig>();
        status = command == "score" ? run_score(opts, log) : run_compare(opts, log);
    } else if (command == "synth") {
        SynthOptions opts;
        opts.out_dir = out_dir;
        opts.config = manifest.at("synth_config").get<SynthConfig>();
        status = run_synth(opts, log);
    } else if (command == "abtest") {
        AbtestOptions opts;
        opts.input_path = input_path(manifest, "abtest");
        opts.out_dir = out_dir;
        status = run_abtest(opts, log);
    } else {
        throw InvalidInputError("manifest names unknown command '" + command + "'");
    }
    if (status != kOk) return status;

    bool same = true;
    for (const auto& output : manifest.at("outputs")) {
        const auto name = output.at("name").get<std::string>();
        const auto digest = sha256_file((fs::path(out_dir) / name).string());
        if (digest != output.at("sha256").get<std::string>()) {
            log << "replay: digest mismatch for " << name << '\n';
            same = false;
        }
    }
    if (same) log << "replay: all output digests match\n";
    return same ? kOk : kReplayMismatch;
}

void add_scoring_flags(CLI::App* sub, ScoringConfig& c) {
    sub->add_option("--lambda-i", c.lambda_i, "Intercept regularization")->capture_default_str();
    sub->add_option("--lambda-f", c.lambda_f, "Factor regularization")->capture_default_str();
    sub->add_option("--helpful-threshold", c.helpful_threshold)->capture_default_str();
    sub->add_option("--not-helpful-threshold", c.not_helpful_threshold)->capture_default_str();
    sub->add_option("--min-note-ratings", c.min_ratings_per_note)->capture_default_str();
    sub->add_option("--min-rater-ratings", c.min_ratings_per_rater)->capture_default_str();
    sub->add_option("--rater-helpfulness-min", c.rater_helpfulness_min)->capture_default_str();
    sub->add_option("--seed", c.seed, "Initialization seed (BRIDGESCORE_SEED overrides)")->capture_default_str();
    sub->add_option("--learning-rate", c.learning_rate)->capture_default_str();
    sub->add_option("--max-epochs", c.max_epochs)->capture_default_str();
    sub->add_option("--tolerance", c.convergence_tolerance, "Relative loss improvement to stop at")
        ->capture_default_str();
    sub->add_option("--factor-dim", c.factor_dim, "Latent factor dimension (experimental above 1)")
        ->capture_default_str();
    sub->add_flag("--density-fixed-point", c.density_filter_fixed_point,
                  "Iterate density filters until nothing changes");
}

// BRIDGESCORE_SEED, when set, wins over --seed.
template <typename Seed>
void apply_seed_env(Seed& seed) {
    if (const char* env = std::getenv("BRIDGESCORE_SEED"); env && *env) {
        try {
            seed = static_cast<Seed>(std::stoull(env));
        } catch (const std::exception&) {
            throw ConfigError(std::string("BRIDGESCORE_SEED is not an unsigned integer: ") + env);
        }
    }
}

}  // namespace

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInputError("cannot read " + path);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md.data(), &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return hex.str();
}

int cmd_score(const ScoreOptions& opts, std::ostream& log) {
    return guarded(log, [&] { return run_score(opts, log); });
}

int cmd_synth(const SynthOptions& opts, std::ostream& log) {
    return guarded(log, [&] { return run_synth(opts, log); });
}

int cmd_abtest(const AbtestOptions& opts, std::ostream& log) {
    return guarded(log, [&] { return run_abtest(opts, log); });
}

int cmd_compare(const ScoreOptions& opts, std::ostream& log) {
    return guarded(log, [&] { return run_compare(opts, log); });
}

int cmd_replay(const std::string& manifest_path, const std::string& out_dir, std::ostream& log) {
    return guarded(log, [&] { return run_replay(manifest_path, out_dir, log); });
}

int run(int argc, char** argv) {
    CLI::App app{"Bridging-based note scoring"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    ScoreOptions score;
    auto* score_cmd = app.add_subcommand("score", "Score notes from notes/ratings TSV files");
    score_cmd->add_option("--notes", score.notes_path, "Notes TSV")->required();
    score_cmd->add_option("--ratings", score.ratings_path, "Ratings TSV")->required();
    score_cmd->add_option("--out-dir", score.out_dir)->capture_default_str();
    add_scoring_flags(score_cmd, score.config);

    ScoreOptions compare;
    auto* compare_cmd = app.add_subcommand("compare", "Compare the scorer with the supermajority baseline");
    compare_cmd->add_option("--notes", compare.notes_path, "Notes TSV")->required();
    compare_cmd->add_option("--ratings", compare.ratings_path, "Ratings TSV")->required();
    compare_cmd->add_option("--out-dir", compare.out_dir)->capture_default_str();
    add_scoring_flags(compare_cmd, compare.config);
    compare_cmd->add_option("--supermajority-threshold", compare.config.supermajority_threshold)
        ->capture_default_str();

    SynthOptions synth;
    auto& sc = synth.config;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic two-cluster community");
    synth_cmd->add_option("--out-dir", synth.out_dir)->capture_default_str();
    synth_cmd->add_option("--seed", sc.seed, "Generator seed (BRIDGESCORE_SEED overrides)")->capture_default_str();
    synth_cmd->add_option("--raters-per-cluster", sc.n_raters_per_cluster)->capture_default_str();
    synth_cmd->add_option("--partisan-notes", sc.n_partisan_notes_per_cluster, "Per cluster")->capture_default_str();
    synth_cmd->add_option("--bridging-notes", sc.n_bridging_notes)->capture_default_str();
    synth_cmd->add_option("--low-quality-notes", sc.n_low_quality_notes)->capture_default_str();
    synth_cmd->add_option("--ratings-min", sc.ratings_per_rater_min, "Min ratings per rater")->capture_default_str();
    synth_cmd->add_option("--ratings-max", sc.ratings_per_rater_max, "Max ratings per rater")->capture_default_str();
    synth_cmd->add_option("--in-cluster-prob", sc.in_cluster_helpful_prob)->capture_default_str();
    synth_cmd->add_option("--cross-cluster-prob", sc.cross_cluster_helpful_prob_partisan)->capture_default_str();
    synth_cmd->add_option("--bridging-prob", sc.helpful_prob_bridging)->capture_default_str();
    synth_cmd->add_option("--low-quality-prob", sc.helpful_prob_low_quality)->capture_default_str();
    synth_cmd->add_option("--somewhat-prob", sc.somewhat_prob)->capture_default_str();
    synth_cmd->add_option("--own-partisan-share", sc.own_partisan_share)->capture_default_str();
    synth_cmd->add_option("--other-partisan-share", sc.other_partisan_share)->capture_default_str();

    AbtestOptions abtest;
    auto* abtest_cmd = app.add_subcommand("abtest", "Engagement deltas with pooled standard errors");
    abtest_cmd->add_option("--input", abtest.input_path, "TSV: label, testCount, testImpressions, "
                                                         "controlCount, controlImpressions")
        ->required();
    abtest_cmd->add_option("--out-dir", abtest.out_dir)->capture_default_str();

    std::string manifest_path;
    std::string replay_dir;
    auto* replay_cmd = app.add_subcommand("replay", "Re-run a manifest and verify output digests");
    replay_cmd->add_option("manifest", manifest_path)->required();
    replay_cmd->add_option("--out-dir", replay_dir)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*score_cmd) {
            apply_seed_env(score.config.seed);
            return cmd_score(score, std::cerr);
        }
        if (*compare_cmd) {
            apply_seed_env(compare.config.seed);
            return cmd_compare(compare, std::cerr);
        }
        if (*synth_cmd) {
            apply_seed_env(sc.seed);
            return cmd_synth(synth, std::cerr);
        }
        if (*abtest_cmd) return cmd_abtest(abtest, std::cerr);
        if (*replay_cmd) return cmd_replay(manifest_path, replay_dir, std::cerr);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kFailure;
}

}  // namespace bridgescore::cli
