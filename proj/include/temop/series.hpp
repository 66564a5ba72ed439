#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "temop/error.hpp"

namespace temop {

/// Ordered real-valued observations, oldest first. Labels (dates) are optional
/// and, when present, align one-to-one with values.
struct TimeSeries {
    std::vector<double> values;
    std::optional<std::vector<std::string>> labels;

    std::size_t size() const noexcept { return values.size(); }
    bool empty() const noexcept { return values.empty(); }
    std::span<const double> view() const noexcept { return values; }
};

/// Direction code of one transition: +1 for non-decreasing, -1 for decreasing.
using TrendCode = std::int8_t;

/// Sequence of direction codes. A window of i values yields a pattern of i-1 codes.
struct TrendPattern {
    std::vector<TrendCode> codes;

    std::size_t size() const noexcept { return codes.size(); }
    bool empty() const noexcept { return codes.empty(); }

    friend auto operator<=>(const TrendPattern&, const TrendPattern&) = default;
    friend bool operator==(const TrendPattern&, const TrendPattern&) = default;
};

inline std::string to_string(const TrendPattern& pattern) {
    std::string out = "(";
    for (std::size_t k = 0; k < pattern.size(); ++k) {
        if (k) out += ',';
        out += pattern.codes[k] > 0 ? "+1" : "-1";
    }
    out += ')';
    return out;
}

/// One training sample: `x` holds `lag` consecutive values, `y` the value that follows.
struct Window {
    std::vector<double> x;
    double y = 0.0;
    TrendCode y_trend = 1;
    std::size_t start = 0; // index of x[0] in the source series
};

namespace detail {

inline void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) fail(ErrorKind::InvalidInput, std::string(what) + " must be finite");
}

inline void require_all_finite(std::span<const double> xs, const char* what) {
    for (double v : xs) require_finite(v, what);
}

} // namespace detail

/// Throws unless every value is finite and labels (if any) match values in length.
inline void validate(const TimeSeries& series) {
    detail::require_all_finite(series.values, "series value");
    if (series.labels && series.labels->size() != series.values.size()) {
        fail(ErrorKind::InvalidInput, "series has " + std::to_string(series.labels->size()) +
                                          " labels for " + std::to_string(series.values.size()) +
                                          " values");
    }
}

inline TrendCode trend_encode_scalar(double prev, double cur) {
    detail::require_finite(prev, "previous value");
    detail::require_finite(cur, "current value");
    return cur >= prev ? TrendCode{1} : TrendCode{-1};
}

inline TrendPattern trend_encode_window(std::span<const double> x) {
    TrendPattern pattern;
    if (x.empty()) return pattern;
    pattern.codes.reserve(x.size() - 1);
    for (std::size_t k = 0; k + 1 < x.size(); ++k) {
        pattern.codes.push_back(trend_encode_scalar(x[k], x[k + 1]));
    }
    if (x.size() == 1) detail::require_finite(x[0], "window value");
    return pattern;
}

/// Fraction of positions where the two patterns agree. Two empty patterns
/// overlap fully.
inline double overlap(const TrendPattern& a, const TrendPattern& b) {
    if (a.size() != b.size()) {
        fail(ErrorKind::InvalidInput, "overlap of patterns with lengths " + std::to_string(a.size()) +
                                          " and " + std::to_string(b.size()));
    }
    if (a.empty()) return 1.0;
    std::size_t same = 0;
    for (std::size_t k = 0; k < a.size(); ++k) same += a.codes[k] == b.codes[k];
    return static_cast<double>(same) / static_cast<double>(a.size());
}

/// All complete windows of `lag` values plus the following label value.
/// A series of length n produces n - lag windows.
inline std::vector<Window> make_windows(std::span<const double> series, std::size_t lag) {
    if (lag < 1) fail(ErrorKind::InvalidInput, "lag order must be at least 1");
    if (series.size() < lag + 1) {
        fail(ErrorKind::InsufficientData, "lag " + std::to_string(lag) + " needs at least " +
                                              std::to_string(lag + 1) + " values, got " +
                                              std::to_string(series.size()));
    }
    detail::require_all_finite(series, "series value");

    std::vector<Window> windows;
    windows.reserve(series.size() - lag);
    for (std::size_t j = 0; j + lag < series.size(); ++j) {
        Window w;
        w.x.assign(series.begin() + static_cast<std::ptrdiff_t>(j),
                   series.begin() + static_cast<std::ptrdiff_t>(j + lag));
        w.y = series[j + lag];
        w.y_trend = trend_encode_scalar(w.x.back(), w.y);
        w.start = j;
        windows.push_back(std::move(w));
    }
    return windows;
}

inline std::vector<Window> make_windows(const TimeSeries& series, std::size_t lag) {
    return make_windows(series.view(), lag);
}

} // namespace temop
