#include "cheapsub/estimate.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <string>

#include "cheapsub/errors.hpp"
#include "cheapsub/format.hpp"

namespace cheapsub {

Sample take_rows(const Sample& s, std::span<const std::size_t> rows)
{
    Sample out;
    out.values.reserve(rows.size());
    for (auto r : rows) out.values.push_back(s.values.at(r));
    return out;
}

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

Sample read_sample_csv(std::istream& in, std::string_view column)
{
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty input: expected a header row");
    const auto header = split_csv_line(line);
    std::size_t col = 0;
    if (!column.empty()) {
        col = header.size();
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (trim(header[c]) == column) col = c;
        }
        if (col == header.size()) throw DataError("column '" + std::string(column) + "' not found in header");
    }

    Sample s;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        const std::string where = "line " + std::to_string(line_no);
        if (fields.size() != header.size()) {
            throw DataError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
        }
        const auto text = trim(fields[col]);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
            throw DataError(where + ": '" + std::string(text) + "' is not a finite number");
        }
        s.values.push_back(v);
    }
    return s;
}

namespace {

double checked_mean(std::span<const double> values)
{
    if (values.size() < 2) throw DataError("mean estimator needs at least 2 values");
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    if (!std::isfinite(mean)) throw DataError("mean estimator: non-finite input");
    return mean;
}

}  // namespace

EstimateWithIF fit_mean(std::span<const double> values)
{
    const double mean = checked_mean(values);
    std::vector<double> influence;
    influence.reserve(values.size());
    for (double v : values) influence.push_back(v - mean);
    return {mean, std::move(influence)};
}

double MeanEstimator::fit_point(const Sample& s) const { return checked_mean(s.values); }

}  // namespace cheapsub
