#include "bridgescore/abstats.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "bridgescore/errors.hpp"
#include "bridgescore/format.hpp"
#include "tsv.hpp"

namespace bridgescore {

void ArmCounts::validate() const {
    if (impressions <= 0) throw InvalidInputError("impressions must be positive");
    if (interactions < 0 || interactions > impressions) {
        throw InvalidInputError("interactions must lie in [0, impressions]");
    }
}

DeltaReport engagement_delta(const ArmCounts& test, const ArmCounts& control) {
    test.validate();
    control.validate();
    if (control.interactions == 0) throw UndefinedRatioError("control arm has no interactions");

    const double n_test = static_cast<double>(test.impressions);
    const double n_control = static_cast<double>(control.impressions);

    DeltaReport r;
    r.rate_test = static_cast<double>(test.interactions) / n_test;
    r.rate_control = static_cast<double>(control.interactions) / n_control;
    r.pct_diff = 100.0 * (r.rate_test / r.rate_control - 1.0);
    r.pooled_rate = static_cast<double>(test.interactions + control.interactions) / (n_test + n_control);
    r.standard_error = std::sqrt((1.0 / n_test + 1.0 / n_control) * r.pooled_rate * (1.0 - r.pooled_rate));
    const double half_width = 100.0 * kZ95 * r.standard_error / r.pooled_rate;
    r.ci_low = r.pct_diff - half_width;
    r.ci_high = r.pct_diff + half_width;
    return r;
}

std::vector<AbRow> parse_ab_rows(std::istream& in) {
    std::string line;
    if (!detail::read_line(in, line)) throw SchemaError("missing header row");
    const detail::Header header(line, '\t');
    const std::size_t c_label = header.require("label");
    const std::size_t c_tc = header.require("testCount");
    const std::size_t c_ti = header.require("testImpressions");
    const std::size_t c_cc = header.require("controlCount");
    const std::size_t c_ci = header.require("controlImpressions");

    std::vector<AbRow> rows;
    std::size_t line_no = 1;
    while (detail::read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto f = detail::split(line, '\t');
        if (f.size() != header.width()) throw RowError("wrong field count", line_no);
        auto tc = detail::parse_int<std::int64_t>(f[c_tc]);
        auto ti = detail::parse_int<std::int64_t>(f[c_ti]);
        auto cc = detail::parse_int<std::int64_t>(f[c_cc]);
        auto ci = detail::parse_int<std::int64_t>(f[c_ci]);
        if (!tc || !ti || !cc || !ci) throw RowError("counts must be integers", line_no);
        AbRow row{std::string(f[c_label]), {*tc, *ti}, {*cc, *ci}, line_no};
        try {
            row.test.validate();
            row.control.validate();
        } catch (const InvalidInputError& e) {
            throw RowError(e.what(), line_no);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_delta_header(std::ostream& out) {
    out << "label\tpctDifference\tciLower\tciUpper\trateTest\trateControl\tstandardError\n";
}

void write_delta_row(std::ostream& out, const std::string& label, const DeltaReport& r) {
    out << label << '\t' << format_double(r.pct_diff) << '\t' << format_double(r.ci_low) << '\t'
        << format_double(r.ci_high) << '\t' << format_double(r.rate_test) << '\t'
        << format_double(r.rate_control) << '\t' << format_double(r.standard_error) << '\n';
}

}  // namespace bridgescore
