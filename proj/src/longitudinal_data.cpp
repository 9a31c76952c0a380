#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "cheapsub/errors.hpp"
#include "cheapsub/format.hpp"
#include "cheapsub/longitudinal.hpp"

namespace cheapsub {

namespace {

constexpr std::array<const char*, 8> kColumns = {"W0", "A0", "C1", "Y1", "W1", "A1", "C2", "Y2"};

std::string row_label(std::size_t row) { return "row " + std::to_string(row + 1); }

bool is_binary(std::int8_t v) noexcept { return v == 0 || v == 1; }

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_real(std::string_view text, const std::string& where)
{
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || end != text.data() + text.size() || !std::isfinite(value)) {
        throw DataError(where + ": expected a finite number, got '" + std::string(text) + "'");
    }
    return value;
}

std::int8_t parse_flag(std::string_view text, const std::string& where)
{
    text = trim(text);
    if (text.empty()) return kMissing;
    if (text == "0") return 0;
    if (text == "1") return 1;
    throw DataError(where + ": expected 0, 1 or empty, got '" + std::string(text) + "'");
}

void write_flag(std::ostream& out, std::int8_t v)
{
    if (v != kMissing) out << static_cast<int>(v);
}

}  // namespace

LongitudinalDataset take_rows(const LongitudinalDataset& d, std::span<const std::size_t> rows)
{
    LongitudinalDataset out;
    out.records.reserve(rows.size());
    for (auto r : rows) out.records.push_back(d.records.at(r));
    return out;
}

void validate(const LongitudinalDataset& data)
{
    for (std::size_t i = 0; i < data.records.size(); ++i) {
        const auto& r = data.records[i];
        auto fail = [&](const std::string& what) { throw DataError(row_label(i) + ": " + what); };
        if (!std::isfinite(r.w0)) fail("W0 must be finite");
        if (!is_binary(r.a0)) fail("A0 must be 0 or 1");
        if (!is_binary(r.c1)) fail("C1 must be 0 or 1");
        const bool w1_missing = std::isnan(r.w1);
        if (!w1_missing && !std::isfinite(r.w1)) fail("W1 must be finite or missing");
        if (r.c1 == 0) {
            if (r.y1 != kMissing || !w1_missing || r.a1 != kMissing || r.y2 != kMissing) {
                fail("censored at time 1 (C1=0) but later variables are recorded");
            }
            if (r.c2 != 0) fail("C1=0 requires C2=0");
            continue;
        }
        if (!is_binary(r.y1)) fail("C1=1 requires Y1 in {0,1}");
        if (r.y1 == 1) {
            if (!w1_missing || r.a1 != kMissing) fail("Y1=1 requires W1 and A1 missing");
            if (r.c2 == 0) fail("Y1=1 cannot be censored at time 2");
            if (r.y2 == 0) fail("Y1=1 requires Y2 missing or 1 (absorbing event)");
            continue;
        }
        if (w1_missing || !is_binary(r.a1) || !is_binary(r.c2)) fail("C1=1, Y1=0 requires W1, A1 and C2 observed");
        if (r.c2 == 1 && !is_binary(r.y2)) fail("C2=1 requires Y2 in {0,1}");
        if (r.c2 == 0 && r.y2 != kMissing) fail("C2=0 requires Y2 missing");
    }
}

void normalize_absorbing(LongitudinalDataset& data)
{
    validate(data);
    for (auto& r : data.records) {
        if (r.y1 == 1) r.y2 = 1;
    }
}

LongitudinalDataset read_longitudinal_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty input: expected header W0,A0,C1,Y1,W1,A1,C2,Y2");
    const auto header = split_csv_line(line);
    bool header_ok = header.size() == kColumns.size();
    for (std::size_t c = 0; header_ok && c < kColumns.size(); ++c) header_ok = trim(header[c]) == kColumns[c];
    if (!header_ok) throw DataError("bad header '" + line + "': expected W0,A0,C1,Y1,W1,A1,C2,Y2");

    LongitudinalDataset data;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        const std::string where = "line " + std::to_string(line_no);
        if (fields.size() != kColumns.size()) {
            throw DataError(where + ": expected 8 fields, got " + std::to_string(fields.size()));
        }
        LongitudinalRecord r;
        r.w0 = parse_real(fields[0], where + " W0");
        r.a0 = parse_flag(fields[1], where + " A0");
        r.c1 = parse_flag(fields[2], where + " C1");
        r.y1 = parse_flag(fields[3], where + " Y1");
        r.w1 = trim(fields[4]).empty() ? std::numeric_limits<double>::quiet_NaN() : parse_real(fields[4], where + " W1");
        r.a1 = parse_flag(fields[5], where + " A1");
        r.c2 = parse_flag(fields[6], where + " C2");
        r.y2 = parse_flag(fields[7], where + " Y2");
        data.records.push_back(r);
    }
    normalize_absorbing(data);
    return data;
}

void write_longitudinal_csv(std::ostream& out, const LongitudinalDataset& data)
{
    out << "W0,A0,C1,Y1,W1,A1,C2,Y2\n";
    for (const auto& r : data.records) {
        out << format_double(r.w0) << ',';
        write_flag(out, r.a0);
        out << ',';
        write_flag(out, r.c1);
        out << ',';
        write_flag(out, r.y1);
        out << ',';
        if (!std::isnan(r.w1)) out << format_double(r.w1);
        out << ',';
        write_flag(out, r.a1);
        out << ',';
        write_flag(out, r.c2);
        out << ',';
        write_flag(out, r.y2);
        out << '\n';
    }
}

}  // namespace cheapsub
