#include "hsvol/timeseries.hpp"

#include "hsvol/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace hsvol {

namespace {

std::string_view trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    double out = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, out);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        return std::nullopt;
    }
    return out;
}

std::string shortest(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

} // namespace

std::optional<Date> parse_date(std::string_view text) {
    text = trim(text);
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    auto field = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        int out = 0;
        const auto* first = text.data() + pos;
        const auto [ptr, ec] = std::from_chars(first, first + len, out);
        if (ec != std::errc{} || ptr != first + len) {
            return std::nullopt;
        }
        return out;
    };
    const auto y = field(0, 4);
    const auto m = field(5, 2);
    const auto d = field(8, 2);
    if (!y || !m || !d || *m < 1 || *d < 1) {
        return std::nullopt;
    }
    Date date{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
              std::chrono::day{static_cast<unsigned>(*d)}};
    if (!date.ok()) {
        return std::nullopt;
    }
    return date;
}

std::string format_date(const Date& date) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

PriceSeries::PriceSeries(std::vector<Observation> observations, std::string label)
    : observations_(std::move(observations)), label_(std::move(label)) {
    if (observations_.size() < 2) {
        throw Error(ErrorKind::SeriesTooShort, "price series needs at least 2 observations, got " +
                                                   std::to_string(observations_.size()));
    }
    for (std::size_t k = 0; k < observations_.size(); ++k) {
        if (!std::isfinite(observations_[k].value)) {
            throw Error(ErrorKind::NonFiniteValue, "non-finite value at observation " + std::to_string(k), k);
        }
        if (k > 0 && !(observations_[k - 1].date < observations_[k].date)) {
            if (observations_[k - 1].date == observations_[k].date) {
                throw Error(ErrorKind::DuplicateDate, "duplicate date " + format_date(observations_[k].date), k);
            }
            throw Error(ErrorKind::InvalidParameter, "dates must be strictly increasing", k);
        }
    }
}

PriceSeries PriceSeries::from_values(std::span<const double> values, std::string label, Date start) {
    std::vector<Observation> obs;
    obs.reserve(values.size());
    const std::chrono::sys_days first{start};
    for (std::size_t k = 0; k < values.size(); ++k) {
        obs.push_back({Date{first + std::chrono::days{static_cast<long>(k)}}, values[k]});
    }
    return PriceSeries(std::move(obs), std::move(label));
}

std::vector<double> PriceSeries::values() const {
    std::vector<double> out;
    out.reserve(observations_.size());
    for (const auto& o : observations_) {
        out.push_back(o.value);
    }
    return out;
}

PriceSeries PriceSeries::window(const Date& from, const Date& to) const {
    if (to < from) {
        throw Error(ErrorKind::InvalidWindow, "window end " + format_date(to) + " precedes start " + format_date(from));
    }
    std::vector<Observation> sub;
    for (const auto& o : observations_) {
        if (!(o.date < from) && !(to < o.date)) {
            sub.push_back(o);
        }
    }
    if (sub.size() < 2) {
        throw Error(ErrorKind::InvalidWindow, "window [" + format_date(from) + ", " + format_date(to) +
                                                  "] holds " + std::to_string(sub.size()) +
                                                  " observations; need at least 2");
    }
    return PriceSeries(std::move(sub), label_);
}

PriceSeries ingest_csv(std::istream& source, std::string label) {
    std::vector<Observation> obs;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(source, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty() || text.front() == '#') {
            continue;
        }
        if (!header_seen) {
            if (text != "date,value") {
                throw Error(ErrorKind::MalformedRow,
                            "line " + std::to_string(line_no) + ": expected header 'date,value'", line_no);
            }
            header_seen = true;
            continue;
        }
        const auto comma = text.find(',');
        if (comma == std::string_view::npos || text.find(',', comma + 1) != std::string_view::npos) {
            throw Error(ErrorKind::MalformedRow, "line " + std::to_string(line_no) + ": expected 2 fields", line_no);
        }
        const auto date = parse_date(text.substr(0, comma));
        if (!date) {
            throw Error(ErrorKind::MalformedRow, "line " + std::to_string(line_no) + ": invalid date", line_no);
        }
        const auto value = parse_double(text.substr(comma + 1));
        if (!value) {
            throw Error(ErrorKind::MalformedRow, "line " + std::to_string(line_no) + ": invalid value", line_no);
        }
        if (!std::isfinite(*value)) {
            throw Error(ErrorKind::NonFiniteValue, "line " + std::to_string(line_no) + ": non-finite value",
                        line_no);
        }
        obs.push_back({*date, *value});
    }
    if (!header_seen) {
        throw Error(ErrorKind::MalformedRow, "missing header 'date,value'", line_no);
    }
    std::stable_sort(obs.begin(), obs.end(),
                     [](const Observation& a, const Observation& b) { return a.date < b.date; });
    for (std::size_t k = 1; k < obs.size(); ++k) {
        if (obs[k].date == obs[k - 1].date) {
            throw Error(ErrorKind::DuplicateDate, "duplicate date " + format_date(obs[k].date), k);
        }
    }
    if (obs.size() < 2) {
        throw Error(ErrorKind::SeriesTooShort,
                    "need at least 2 rows, got " + std::to_string(obs.size()));
    }
    return PriceSeries(std::move(obs), std::move(label));
}

PriceSeries ingest_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open " + path);
    }
    return ingest_csv(in, path);
}

std::string serialize_csv(const PriceSeries& series) {
    std::ostringstream out;
    out << "date,value\n";
    for (const auto& o : series.observations()) {
        out << format_date(o.date) << ',' << shortest(o.value) << '\n';
    }
    return out.str();
}

ShiftSeries absolute_shifts(const PriceSeries& series) {
    ShiftSeries out{ShiftKind::Absolute, {}};
    out.values.reserve(series.size() - 1);
    const auto& obs = series.observations();
    for (std::size_t k = 1; k < obs.size(); ++k) {
        out.values.push_back(obs[k].value - obs[k - 1].value);
    }
    return out;
}

ShiftSeries relative_shifts(const PriceSeries& series, double eps) {
    if (!(eps > 0.0)) {
        throw Error(ErrorKind::InvalidParameter, "relative-shift threshold must be positive");
    }
    ShiftSeries out{ShiftKind::Relative, {}};
    out.values.reserve(series.size() - 1);
    const auto& obs = series.observations();
    for (std::size_t k = 1; k < obs.size(); ++k) {
        const double denom = obs[k - 1].value;
        if (!(denom > eps)) {
            throw Error(ErrorKind::DenominatorTooSmall,
                        "denominator S[" + std::to_string(k - 1) + "] = " + shortest(denom) +
                            " is not above threshold " + shortest(eps),
                        k - 1);
        }
        out.values.push_back(obs[k].value / denom - 1.0);
    }
    return out;
}

double default_relative_eps(const PriceSeries& series) {
    std::vector<double> mags;
    mags.reserve(series.size());
    for (const auto& o : series.observations()) {
        mags.push_back(std::abs(o.value));
    }
    const auto mid = mags.size() / 2;
    std::nth_element(mags.begin(), mags.begin() + static_cast<long>(mid), mags.end());
    double median = mags[mid];
    if (mags.size() % 2 == 0) {
        const double lower = *std::max_element(mags.begin(), mags.begin() + static_cast<long>(mid));
        median = 0.5 * (median + lower);
    }
    return std::max(1e-8 * median, std::numeric_limits<double>::min());
}

} // namespace hsvol
