#pragma once

#include <Eigen/Dense>

#include <compare>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace svar::ts {

/// Calendar month. No day, time-of-day or timezone semantics.
struct YearMonth {
    int year = 1970;
    int month = 1;  // 1..12

    /// Months since year 0, January.
    constexpr int index() const { return year * 12 + (month - 1); }
    static constexpr YearMonth from_index(int idx) {
        int y = idx >= 0 ? idx / 12 : -((-idx + 11) / 12);
        return {y, idx - y * 12 + 1};
    }
    constexpr YearMonth operator+(int months) const { return from_index(index() + months); }
    constexpr YearMonth operator-(int months) const { return from_index(index() - months); }
    constexpr int operator-(YearMonth other) const { return index() - other.index(); }
    constexpr auto operator<=>(const YearMonth& other) const { return index() <=> other.index(); }
    constexpr bool operator==(const YearMonth& other) const = default;

    /// Quarter of the year, 1..4.
    constexpr int quarter() const { return (month - 1) / 3 + 1; }

    std::string str() const;  // "YYYY-MM"
    /// Accepts "YYYY-MM" and "YYYY-MM-DD" (the day is ignored).
    static YearMonth parse(std::string_view text);
};

/// Inclusive range of months.
struct MonthRange {
    YearMonth first;
    YearMonth last;

    int length() const { return last - first + 1; }
    bool empty() const { return last < first; }
    bool contains(YearMonth m) const { return first <= m && m <= last; }
    bool contains(const MonthRange& r) const { return contains(r.first) && contains(r.last); }
    bool operator==(const MonthRange&) const = default;

    std::string str() const;  // "YYYY-MM:YYYY-MM"
    static MonthRange parse(std::string_view text);
};

struct YearQuarter {
    int year = 1970;
    int quarter = 1;  // 1..4

    constexpr int index() const { return year * 4 + (quarter - 1); }
    static constexpr YearQuarter from_index(int idx) {
        int y = idx >= 0 ? idx / 4 : -((-idx + 3) / 4);
        return {y, idx - y * 4 + 1};
    }
    constexpr YearQuarter operator+(int q) const { return from_index(index() + q); }
    constexpr int operator-(YearQuarter other) const { return index() - other.index(); }
    constexpr auto operator<=>(const YearQuarter& other) const { return index() <=> other.index(); }
    constexpr bool operator==(const YearQuarter& other) const = default;

    constexpr YearMonth first_month() const { return {year, (quarter - 1) * 3 + 1}; }

    std::string str() const;  // "YYYY-Qn"
    static YearQuarter parse(std::string_view text);
};

/// Gap-free monthly observations starting at `start`.
class MonthlySeries {
public:
    MonthlySeries() = default;
    MonthlySeries(std::string id, YearMonth start, std::vector<double> values, std::string units = {});

    const std::string& id() const { return id_; }
    const std::string& units() const { return units_; }
    YearMonth start() const { return start_; }
    YearMonth end() const { return start_ + (static_cast<int>(values_.size()) - 1); }
    MonthRange range() const { return {start(), end()}; }
    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double at(YearMonth m) const;

    MonthlySeries slice(const MonthRange& window) const;
    MonthlySeries with_id(std::string id) const;

private:
    std::string id_;
    YearMonth start_{};
    std::vector<double> values_;
    std::string units_;
};

/// Monthly series sharing one month range. Column order fixes the recursive ordering.
class Panel {
public:
    Panel() = default;
    explicit Panel(std::vector<MonthlySeries> columns);

    std::size_t cols() const { return columns_.size(); }
    std::size_t rows() const { return columns_.empty() ? 0 : columns_.front().size(); }
    YearMonth start() const { return columns_.front().start(); }
    MonthRange range() const { return columns_.front().range(); }
    const std::vector<MonthlySeries>& columns() const { return columns_; }
    const MonthlySeries& column(std::size_t i) const { return columns_.at(i); }
    std::vector<std::string> names() const;
    std::optional<std::size_t> index_of(std::string_view name) const;

    /// rows() x cols() matrix, one row per month.
    Eigen::MatrixXd matrix() const;
    Panel slice(const MonthRange& window) const;
    Panel with_column(std::size_t i, MonthlySeries replacement) const;

private:
    std::vector<MonthlySeries> columns_;
};

class QuarterlySeries {
public:
    QuarterlySeries() = default;
    QuarterlySeries(std::string id, YearQuarter start, std::vector<double> values);

    const std::string& id() const { return id_; }
    YearQuarter start() const { return start_; }
    YearQuarter end() const { return start_ + (static_cast<int>(values_.size()) - 1); }
    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

private:
    std::string id_;
    YearQuarter start_{};
    std::vector<double> values_;
};

// --- transforms -----------------------------------------------------------

MonthlySeries log_diff(const MonthlySeries& s);
QuarterlySeries log_diff(const QuarterlySeries& s);

/// Natural log of every value. Throws NonPositiveValue.
MonthlySeries log(const MonthlySeries& s);

/// Subtract the mean computed over `window` (full range when absent).
MonthlySeries demean(const MonthlySeries& s, const std::optional<MonthRange>& window = std::nullopt);

/// Truncate every series to the common month range.
Panel align(const std::vector<MonthlySeries>& series);

/// Mean of each calendar quarter fully covered by `s`; partial quarters are dropped.
QuarterlySeries quarterly_average(const MonthlySeries& s);

/// Month-of-year dummy adjustment: residual of a regression on a constant and 11 month
/// dummies, with the overall sample mean added back.
MonthlySeries seasonal_adjust(const MonthlySeries& s);

// --- CSV: header `date,value`, dates YYYY-MM (monthly) or YYYY-Qn (quarterly) ---

MonthlySeries read_monthly_csv(std::istream& in, std::string id);
MonthlySeries load_monthly_csv(const std::filesystem::path& path, std::string id = {});
void write_monthly_csv(std::ostream& out, const MonthlySeries& s);
std::string to_csv(const MonthlySeries& s);

QuarterlySeries read_quarterly_csv(std::istream& in, std::string id);
QuarterlySeries load_quarterly_csv(const std::filesystem::path& path, std::string id = {});
void write_quarterly_csv(std::ostream& out, const QuarterlySeries& s);

/// Wide panel CSV: `date,<name1>,<name2>,...`.
void write_panel_csv(std::ostream& out, const Panel& panel);
Panel read_panel_csv(std::istream& in);
Panel load_panel_csv(const std::filesystem::path& path);

}  // namespace svar::ts
