#pragma once

#include <chrono>
#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hsvol {

using Date = std::chrono::year_month_day;

/// Parses a strict ISO-8601 calendar date (YYYY-MM-DD).
std::optional<Date> parse_date(std::string_view text);
std::string format_date(const Date& date);

struct Observation {
    Date date;
    double value = 0.0;
};

/**
 * Dated, strictly increasing observations of a single risk factor.
 *
 * Construction validates the invariants: at least two observations, finite
 * values and strictly increasing dates. Consecutive rows are one step apart
 * regardless of the calendar gap between them.
 */
class PriceSeries {
public:
    PriceSeries(std::vector<Observation> observations, std::string label);

    /// Synthetic daily dates starting at `start`; used for generated data.
    static PriceSeries from_values(std::span<const double> values, std::string label = "synthetic",
                                   Date start = Date{std::chrono::year{2000}, std::chrono::January,
                                                     std::chrono::day{1}});

    [[nodiscard]] std::size_t size() const noexcept { return observations_.size(); }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }
    [[nodiscard]] const std::vector<Observation>& observations() const noexcept { return observations_; }
    [[nodiscard]] double value(std::size_t k) const { return observations_.at(k).value; }
    [[nodiscard]] const Date& date(std::size_t k) const { return observations_.at(k).date; }
    [[nodiscard]] double front() const noexcept { return observations_.front().value; }
    [[nodiscard]] double back() const noexcept { return observations_.back().value; }
    [[nodiscard]] std::vector<double> values() const;

    /// Observations with `from <= date <= to`. Throws InvalidWindow when
    /// fewer than two observations remain.
    [[nodiscard]] PriceSeries window(const Date& from, const Date& to) const;

private:
    std::vector<Observation> observations_;
    std::string label_;
};

enum class ShiftKind { Absolute, Relative };

/// values[k-1] is the shift from observation k-1 to k.
struct ShiftSeries {
    ShiftKind kind = ShiftKind::Absolute;
    std::vector<double> values;
};

/// Reads `date,value` CSV. Blank lines and lines starting with `#` are
/// skipped; rows are sorted by date.
PriceSeries ingest_csv(std::istream& source, std::string label);
PriceSeries ingest_csv_file(const std::string& path);

/// Inverse of ingest_csv, using shortest round-trip float formatting.
std::string serialize_csv(const PriceSeries& series);

ShiftSeries absolute_shifts(const PriceSeries& series);

/// Throws DenominatorTooSmall carrying the observation index of the first
/// denominator S_{k-1} <= eps.
ShiftSeries relative_shifts(const PriceSeries& series, double eps);

/// 1e-8 * median |S|, floored at the smallest normal double.
double default_relative_eps(const PriceSeries& series);

inline ShiftSeries relative_shifts(const PriceSeries& series) {
    return relative_shifts(series, default_relative_eps(series));
}

} // namespace hsvol
