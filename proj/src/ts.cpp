#include "svar/ts.hpp"

#include "svar/error.hpp"
#include "svar/format.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace svar::ts {

namespace {

int parse_int(std::string_view text, std::string_view what) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        throw Error(ErrorCode::ParseError, "invalid " + std::string(what) + " '" + std::string(text) + "'");
    return value;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        auto next = line.find(sep, pos);
        out.push_back(trim(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return in;
}

void require_positive(std::span<const double> values, std::string_view id) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0))
            throw Error(ErrorCode::NonPositiveValue,
                        "series '" + std::string(id) + "' has non-positive value at position " + std::to_string(i));
    }
}

}  // namespace

// --- calendar --------------------------------------------------------------

std::string YearMonth::str() const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
    return buf;
}

YearMonth YearMonth::parse(std::string_view text) {
    text = trim(text);
    auto parts = split(text, '-');
    if (parts.size() < 2 || parts.size() > 3 || parts[0].size() != 4 || parts[1].size() != 2)
        throw Error(ErrorCode::ParseError, "invalid month '" + std::string(text) + "' (expected YYYY-MM)");
    YearMonth ym{parse_int(parts[0], "year"), parse_int(parts[1], "month")};
    if (ym.month < 1 || ym.month > 12)
        throw Error(ErrorCode::ParseError, "month out of range in '" + std::string(text) + "'");
    return ym;
}

std::string MonthRange::str() const { return first.str() + ":" + last.str(); }

MonthRange MonthRange::parse(std::string_view text) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos)
        throw Error(ErrorCode::ParseError, "invalid month range '" + std::string(text) + "' (expected FROM:TO)");
    MonthRange r{YearMonth::parse(text.substr(0, colon)), YearMonth::parse(text.substr(colon + 1))};
    if (r.empty()) throw Error(ErrorCode::EmptyWindow, "range " + std::string(text) + " is empty");
    return r;
}

std::string YearQuarter::str() const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-Q%d", year, quarter);
    return buf;
}

YearQuarter YearQuarter::parse(std::string_view text) {
    text = trim(text);
    if (text.size() != 7 || text[4] != '-' || (text[5] != 'Q' && text[5] != 'q'))
        throw Error(ErrorCode::ParseError, "invalid quarter '" + std::string(text) + "' (expected YYYY-Qn)");
    YearQuarter q{parse_int(text.substr(0, 4), "year"), parse_int(text.substr(6, 1), "quarter")};
    if (q.quarter < 1 || q.quarter > 4)
        throw Error(ErrorCode::ParseError, "quarter out of range in '" + std::string(text) + "'");
    return q;
}

// --- containers ------------------------------------------------------------

MonthlySeries::MonthlySeries(std::string id, YearMonth start, std::vector<double> values, std::string units)
    : id_(std::move(id)), start_(start), values_(std::move(values)), units_(std::move(units)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]))
            throw Error(ErrorCode::GapError, "series '" + id_ + "' has a missing value at " +
                                                 (start_ + static_cast<int>(i)).str());
    }
}

double MonthlySeries::at(YearMonth m) const {
    if (values_.empty() || !range().contains(m))
        throw Error(ErrorCode::InvalidArgument, m.str() + " outside series '" + id_ + "'");
    return values_[static_cast<std::size_t>(m - start_)];
}

MonthlySeries MonthlySeries::slice(const MonthRange& window) const {
    if (window.empty()) throw Error(ErrorCode::EmptyWindow, "empty slice of '" + id_ + "'");
    if (values_.empty() || !range().contains(window))
        throw Error(ErrorCode::InvalidArgument,
                    "window " + window.str() + " not inside series '" + id_ + "' (" +
                        (values_.empty() ? std::string("empty") : range().str()) + ")");
    auto offset = static_cast<std::size_t>(window.first - start_);
    std::vector<double> v(values_.begin() + offset, values_.begin() + offset + window.length());
    return {id_, window.first, std::move(v), units_};
}

MonthlySeries MonthlySeries::with_id(std::string id) const { return {std::move(id), start_, values_, units_}; }

Panel::Panel(std::vector<MonthlySeries> columns) : columns_(std::move(columns)) {
    if (columns_.empty()) throw Error(ErrorCode::InvalidArgument, "panel needs at least one column");
    const auto r = columns_.front().range();
    if (columns_.front().size() == 0) throw Error(ErrorCode::InvalidArgument, "panel columns are empty");
    for (const auto& c : columns_) {
        if (c.size() != columns_.front().size() || c.start() != r.first)
            throw Error(ErrorCode::InvalidArgument, "panel column '" + c.id() + "' spans " + c.range().str() +
                                                        ", expected " + r.str());
    }
}

std::vector<std::string> Panel::names() const {
    std::vector<std::string> out;
    for (const auto& c : columns_) out.push_back(c.id());
    return out;
}

std::optional<std::size_t> Panel::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
        if (columns_[i].id() == name) return i;
    return std::nullopt;
}

Eigen::MatrixXd Panel::matrix() const {
    Eigen::MatrixXd m(rows(), cols());
    for (std::size_t j = 0; j < cols(); ++j)
        for (std::size_t i = 0; i < rows(); ++i) m(i, j) = columns_[j][i];
    return m;
}

Panel Panel::slice(const MonthRange& window) const {
    std::vector<MonthlySeries> out;
    for (const auto& c : columns_) out.push_back(c.slice(window));
    return Panel(std::move(out));
}

Panel Panel::with_column(std::size_t i, MonthlySeries replacement) const {
    auto copy = columns_;
    copy.at(i) = std::move(replacement);
    return Panel(std::move(copy));
}

QuarterlySeries::QuarterlySeries(std::string id, YearQuarter start, std::vector<double> values)
    : id_(std::move(id)), start_(start), values_(std::move(values)) {}

// --- transforms --------------------------------------------------------------

MonthlySeries log_diff(const MonthlySeries& s) {
    if (s.size() < 2) throw Error(ErrorCode::TooShort, "log_diff needs at least 2 observations");
    require_positive(s.values(), s.id());
    std::vector<double> out(s.size() - 1);
    for (std::size_t t = 0; t + 1 < s.size(); ++t) out[t] = std::log(s[t + 1]) - std::log(s[t]);
    return {s.id(), s.start() + 1, std::move(out), s.units()};
}

QuarterlySeries log_diff(const QuarterlySeries& s) {
    if (s.size() < 2) throw Error(ErrorCode::TooShort, "log_diff needs at least 2 observations");
    require_positive(s.values(), s.id());
    std::vector<double> out(s.size() - 1);
    for (std::size_t t = 0; t + 1 < s.size(); ++t) out[t] = std::log(s[t + 1]) - std::log(s[t]);
    return {s.id(), s.start() + 1, std::move(out)};
}

MonthlySeries log(const MonthlySeries& s) {
    require_positive(s.values(), s.id());
    std::vector<double> out(s.size());
    std::transform(s.values().begin(), s.values().end(), out.begin(), [](double v) { return std::log(v); });
    return {s.id(), s.start(), std::move(out), s.units()};
}

MonthlySeries demean(const MonthlySeries& s, const std::optional<MonthRange>& window) {
    if (s.size() == 0) throw Error(ErrorCode::EmptyWindow, "cannot demean an empty series");
    const MonthRange w = window.value_or(s.range());
    if (w.empty()) throw Error(ErrorCode::EmptyWindow, "demean window is empty");
    if (!s.range().contains(w))
        throw Error(ErrorCode::EmptyWindow,
                    "demean window " + w.str() + " not inside series '" + s.id() + "' (" + s.range().str() + ")");
    const auto window_slice = s.slice(w);
    const auto part = window_slice.values();
    const double mean = std::accumulate(part.begin(), part.end(), 0.0) / static_cast<double>(part.size());
    std::vector<double> out(s.values().begin(), s.values().end());
    for (auto& v : out) v -= mean;
    return {s.id(), s.start(), std::move(out), s.units()};
}

Panel align(const std::vector<MonthlySeries>& series) {
    if (series.empty()) throw Error(ErrorCode::InvalidArgument, "align needs at least one series");
    YearMonth first = series.front().start();
    YearMonth last = series.front().end();
    for (const auto& s : series) {
        if (s.size() == 0) throw Error(ErrorCode::NoOverlap, "series '" + s.id() + "' is empty");
        first = std::max(first, s.start());
        last = std::min(last, s.end());
    }
    if (last < first) throw Error(ErrorCode::NoOverlap, "series have no common months");
    std::vector<MonthlySeries> out;
    out.reserve(series.size());
    for (const auto& s : series) out.push_back(s.slice({first, last}));
    return Panel(std::move(out));
}

QuarterlySeries quarterly_average(const MonthlySeries& s) {
    if (s.size() == 0) throw Error(ErrorCode::NoCompleteQuarter, "empty series");
    // First month that opens a quarter, and last month that closes one.
    YearMonth first = s.start();
    while ((first.month - 1) % 3 != 0) first = first + 1;
    YearMonth last = s.end();
    while (last.month % 3 != 0) last = last - 1;
    if (last < first || (last - first + 1) < 3)
        throw Error(ErrorCode::NoCompleteQuarter, "series '" + s.id() + "' covers no complete quarter");
    const int nq = (last - first + 1) / 3;
    std::vector<double> out(static_cast<std::size_t>(nq));
    auto offset = static_cast<std::size_t>(first - s.start());
    for (int q = 0; q < nq; ++q) {
        const std::size_t i = offset + static_cast<std::size_t>(3 * q);
        // Anchored on the first month so a flat quarter averages to itself exactly.
        out[static_cast<std::size_t>(q)] = s[i] + ((s[i + 1] - s[i]) + (s[i + 2] - s[i])) / 3.0;
    }
    return {s.id(), YearQuarter{first.year, first.quarter()}, std::move(out)};
}

MonthlySeries seasonal_adjust(const MonthlySeries& s) {
    if (s.size() < 24) throw Error(ErrorCode::TooShort, "seasonal adjustment needs at least 24 months");
    const auto n = static_cast<Eigen::Index>(s.size());
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, 12);
    Eigen::VectorXd y(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        X(t, 0) = 1.0;
        const int month = (s.start() + static_cast<int>(t)).month;
        if (month > 1) X(t, month - 1) = 1.0;  // January is the base month
        y(t) = s[static_cast<std::size_t>(t)];
    }
    const Eigen::VectorXd beta = X.householderQr().solve(y);
    const Eigen::VectorXd resid = y - X * beta;
    const double mean = y.mean();
    std::vector<double> out(s.size());
    for (Eigen::Index t = 0; t < n; ++t) out[static_cast<std::size_t>(t)] = resid(t) + mean;
    return {s.id(), s.start(), std::move(out), s.units()};
}

// --- CSV ---------------------------------------------------------------------

namespace {

struct RawRow {
    std::string date;
    std::optional<double> value;
    int line;
};

std::vector<RawRow> read_two_column_csv(std::istream& in, const std::string& id) {
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    std::vector<RawRow> rows;
    while (std::getline(in, line)) {
        ++lineno;
        auto view = trim(line);
        if (view.empty()) continue;
        if (!header_seen) {
            if (lineno == 1 && view.size() >= 3 && static_cast<unsigned char>(view[0]) == 0xEF) view.remove_prefix(3);
            if (lower(view) != "date,value")
                throw Error(ErrorCode::ParseError, "'" + id + "': expected header 'date,value', got '" +
                                                       std::string(view) + "'");
            header_seen = true;
            continue;
        }
        auto fields = split(view, ',');
        if (fields.size() != 2)
            throw Error(ErrorCode::ParseError, "'" + id + "' line " + std::to_string(lineno) + ": expected 2 fields");
        RawRow row{std::string(fields[0]), std::nullopt, lineno};
        double v = 0.0;
        if (!fields[1].empty() && fields[1] != "." && lower(fields[1]) != "na" && lower(fields[1]) != "nan") {
            if (!parse_double(fields[1], v))
                throw Error(ErrorCode::ParseError, "'" + id + "' line " + std::to_string(lineno) + ": bad value '" +
                                                       std::string(fields[1]) + "'");
            row.value = v;
        }
        rows.push_back(std::move(row));
    }
    if (!header_seen) throw Error(ErrorCode::ParseError, "'" + id + "': empty CSV");
    return rows;
}

}  // namespace

MonthlySeries read_monthly_csv(std::istream& in, std::string id) {
    auto rows = read_two_column_csv(in, id);
    if (rows.empty()) throw Error(ErrorCode::ParseError, "'" + id + "': no observations");
    std::vector<double> values;
    values.reserve(rows.size());
    const YearMonth start = YearMonth::parse(rows.front().date);
    YearMonth expected = start;
    for (const auto& r : rows) {
        const YearMonth m = YearMonth::parse(r.date);
        if (m > expected)
            throw Error(ErrorCode::GapError, "'" + id + "' is missing month " + expected.str());
        if (m < expected)
            throw Error(ErrorCode::ParseError, "'" + id + "' line " + std::to_string(r.line) +
                                                   ": dates not strictly increasing at " + m.str());
        if (!r.value) throw Error(ErrorCode::GapError, "'" + id + "' has no value for month " + m.str());
        values.push_back(*r.value);
        expected = expected + 1;
    }
    return {std::move(id), start, std::move(values)};
}

MonthlySeries load_monthly_csv(const std::filesystem::path& path, std::string id) {
    auto in = open_or_throw(path);
    return read_monthly_csv(in, id.empty() ? path.stem().string() : std::move(id));
}

void write_monthly_csv(std::ostream& out, const MonthlySeries& s) {
    out << "date,value\n";
    for (std::size_t i = 0; i < s.size(); ++i)
        out << (s.start() + static_cast<int>(i)).str() << ',' << format_double(s[i]) << '\n';
}

std::string to_csv(const MonthlySeries& s) {
    std::ostringstream os;
    write_monthly_csv(os, s);
    return os.str();
}

QuarterlySeries read_quarterly_csv(std::istream& in, std::string id) {
    auto rows = read_two_column_csv(in, id);
    if (rows.empty()) throw Error(ErrorCode::ParseError, "'" + id + "': no observations");
    const YearQuarter start = YearQuarter::parse(rows.front().date);
    YearQuarter expected = start;
    std::vector<double> values;
    for (const auto& r : rows) {
        const YearQuarter q = YearQuarter::parse(r.date);
        if (q > expected) throw Error(ErrorCode::GapError, "'" + id + "' is missing quarter " + expected.str());
        if (q < expected)
            throw Error(ErrorCode::ParseError, "'" + id + "': dates not strictly increasing at " + q.str());
        if (!r.value) throw Error(ErrorCode::GapError, "'" + id + "' has no value for quarter " + q.str());
        values.push_back(*r.value);
        expected = expected + 1;
    }
    return {std::move(id), start, std::move(values)};
}

QuarterlySeries load_quarterly_csv(const std::filesystem::path& path, std::string id) {
    auto in = open_or_throw(path);
    return read_quarterly_csv(in, id.empty() ? path.stem().string() : std::move(id));
}

void write_quarterly_csv(std::ostream& out, const QuarterlySeries& s) {
    out << "date,value\n";
    for (std::size_t i = 0; i < s.size(); ++i)
        out << (s.start() + static_cast<int>(i)).str() << ',' << format_double(s[i]) << '\n';
}

void write_panel_csv(std::ostream& out, const Panel& panel) {
    out << "date";
    for (const auto& name : panel.names()) out << ',' << name;
    out << '\n';
    for (std::size_t t = 0; t < panel.rows(); ++t) {
        out << (panel.start() + static_cast<int>(t)).str();
        for (std::size_t j = 0; j < panel.cols(); ++j) out << ',' << format_double(panel.column(j)[t]);
        out << '\n';
    }
}

Panel read_panel_csv(std::istream& in) {
    std::string line;
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;
    std::optional<YearMonth> start;
    YearMonth expected{};
    while (std::getline(in, line)) {
        auto view = trim(line);
        if (view.empty()) continue;
        auto fields = split(view, ',');
        if (names.empty()) {
            if (fields.size() < 2 || lower(fields[0]) != "date")
                throw Error(ErrorCode::ParseError, "panel CSV header must start with 'date'");
            for (std::size_t j = 1; j < fields.size(); ++j) names.emplace_back(fields[j]);
            cols.resize(names.size());
            continue;
        }
        if (fields.size() != names.size() + 1) throw Error(ErrorCode::ParseError, "ragged panel CSV row");
        const YearMonth m = YearMonth::parse(fields[0]);
        if (!start) {
            start = m;
            expected = m;
        }
        if (m != expected) throw Error(ErrorCode::GapError, "panel CSV is missing month " + expected.str());
        for (std::size_t j = 0; j < names.size(); ++j) {
            double v = 0.0;
            if (!parse_double(fields[j + 1], v))
                throw Error(ErrorCode::GapError, "panel CSV has no value for '" + names[j] + "' at " + m.str());
            cols[j].push_back(v);
        }
        expected = expected + 1;
    }
    if (!start) throw Error(ErrorCode::ParseError, "panel CSV has no rows");
    std::vector<MonthlySeries> series;
    for (std::size_t j = 0; j < names.size(); ++j) series.emplace_back(names[j], *start, std::move(cols[j]));
    return Panel(std::move(series));
}

Panel load_panel_csv(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    return read_panel_csv(in);
}

}  // namespace svar::ts
