#pragma once
// Engagement-rate deltas between a test and a control arm, with a pooled
// binomial standard error.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace bridgescore {

struct ArmCounts {
    std::int64_t interactions = 0;
    std::int64_t impressions = 0;

    // Throws InvalidInputError unless 0 <= interactions <= impressions and impressions > 0.
    void validate() const;
};

struct DeltaReport {
    double rate_test = 0.0;
    double rate_control = 0.0;
    double pct_diff = 0.0;  // percent
    double pooled_rate = 0.0;
    double standard_error = 0.0;  // absolute, on the rate scale
    double ci_low = 0.0;          // percent
    double ci_high = 0.0;         // percent
};

inline constexpr double kZ95 = 1.96;

// pct_diff = 100 (rate_test / rate_control - 1)
// se       = sqrt((1/n_test + 1/n_control) p (1 - p)), p pooled over both arms
// ci       = pct_diff -/+ 100 * 1.96 * se / p
// The interval divides the absolute SE by the pooled rate to put it on the
// relative scale of pct_diff.
//
// Throws UndefinedRatioError when the control arm has no interactions.
DeltaReport engagement_delta(const ArmCounts& test, const ArmCounts& control);

struct AbRow {
    std::string label;
    ArmCounts test;
    ArmCounts control;
    std::size_t line = 0;  // 1-based, header is line 1
};

// Columns: label, testCount, testImpressions, controlCount, controlImpressions.
// Throws SchemaError / RowError with the offending line.
std::vector<AbRow> parse_ab_rows(std::istream& in);

// label, pctDifference, ciLower, ciUpper, rateTest, rateControl, standardError
void write_delta_header(std::ostream& out);
void write_delta_row(std::ostream& out, const std::string& label, const DeltaReport& report);

}  // namespace bridgescore
