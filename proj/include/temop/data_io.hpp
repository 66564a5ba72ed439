#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "temop/error.hpp"
#include "temop/series.hpp"
#include "temop/train.hpp"

namespace temop {

struct CsvConfig {
    std::string date_column = "Date";
    std::string price_column = "Price";
    std::optional<char> thousands_separator = ',';
    char decimal_point = '.';
    bool ascending = true; // oldest first after parsing
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

/// Splits one CSV record on commas, honouring double-quoted fields.
inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        const char ch = line[k];
        if (quoted) {
            if (ch == '"' && k + 1 < line.size() && line[k + 1] == '"') {
                cur += '"';
                ++k;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.emplace_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    fields.emplace_back(trim(cur));
    return fields;
}

inline std::optional<unsigned> month_from_name(std::string_view name) {
    static constexpr std::string_view names[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                 "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    if (name.size() < 3) return std::nullopt;
    for (unsigned k = 0; k < 12; ++k) {
        if (name.substr(0, 3) == names[k]) return k + 1;
    }
    return std::nullopt;
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
    s = trim(s);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

/// Accepts YYYY-MM-DD, MM/DD/YYYY and "Mon DD, YYYY".
inline std::optional<std::chrono::sys_days> parse_date(std::string_view text) {
    using namespace std::chrono;
    text = trim(text);
    int y = 0;
    unsigned mo = 0;
    unsigned d = 0;
    bool ok = false;
    if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
        ok = parse_int(text.substr(0, 4), y) && parse_int(text.substr(5, 2), mo) &&
             parse_int(text.substr(8, 2), d);
    } else if (const auto s1 = text.find('/'); s1 != std::string_view::npos) {
        const auto s2 = text.find('/', s1 + 1);
        ok = s2 != std::string_view::npos && parse_int(text.substr(0, s1), mo) &&
             parse_int(text.substr(s1 + 1, s2 - s1 - 1), d) && parse_int(text.substr(s2 + 1), y);
    } else if (const auto comma = text.find(','); comma != std::string_view::npos) {
        const auto space = text.find(' ');
        const auto month = month_from_name(text.substr(0, space));
        ok = month && space < comma && parse_int(text.substr(space + 1, comma - space - 1), d) &&
             parse_int(text.substr(comma + 1), y);
        if (month) mo = *month;
    }
    if (!ok) return std::nullopt;
    const year_month_day ymd{year{y}, month{mo}, day{d}};
    if (!ymd.ok()) return std::nullopt;
    return sys_days{ymd};
}

inline std::string iso_date(std::chrono::sys_days day) {
    const std::chrono::year_month_day ymd{day};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

inline std::optional<double> parse_price(std::string_view text, const CsvConfig& config) {
    std::string cleaned;
    for (char ch : trim(text)) {
        if (config.thousands_separator && ch == *config.thousands_separator) continue;
        cleaned += ch == config.decimal_point ? '.' : ch;
    }
    if (cleaned.empty()) return std::nullopt;
    double v = 0.0;
    const char* first = cleaned.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, cleaned.data() + cleaned.size(), v);
    if (ec != std::errc{} || ptr != cleaned.data() + cleaned.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

inline std::string shortest(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace detail

inline TimeSeries parse_csv(std::istream& in, const CsvConfig& config = {}) {
    if (config.thousands_separator && *config.thousands_separator == config.decimal_point) {
        fail(ErrorKind::InvalidInput, "thousands separator and decimal point must differ");
    }
    std::string line;
    if (!std::getline(in, line)) fail(ErrorKind::Parse, "empty file");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    const auto header = detail::split_csv_line(line);
    auto column = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) fail(ErrorKind::Parse, "missing column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t date_col = column(config.date_column);
    const std::size_t price_col = column(config.price_column);

    struct Row {
        std::chrono::sys_days day;
        std::string label;
        double price;
    };
    std::vector<Row> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_csv_line(line);
        const std::string where = "line " + std::to_string(line_no);
        if (fields.size() <= std::max(date_col, price_col)) {
            fail(ErrorKind::Parse, where + ": expected at least " +
                                       std::to_string(std::max(date_col, price_col) + 1) + " fields");
        }
        const auto day = detail::parse_date(fields[date_col]);
        if (!day) fail(ErrorKind::Parse, where + ": cannot parse date '" + fields[date_col] + "'");
        const auto price = detail::parse_price(fields[price_col], config);
        if (!price) fail(ErrorKind::Parse, where + ": cannot parse price '" + fields[price_col] + "'");
        rows.push_back({*day, fields[date_col], *price});
    }
    if (rows.empty()) fail(ErrorKind::Parse, "file has a header but no data rows");

    std::stable_sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
        return config.ascending ? a.day < b.day : a.day > b.day;
    });
    for (std::size_t k = 1; k < rows.size(); ++k) {
        if (rows[k].day == rows[k - 1].day) {
            fail(ErrorKind::Parse, "duplicate date '" + rows[k].label + "'");
        }
    }

    TimeSeries out;
    out.labels.emplace();
    out.values.reserve(rows.size());
    out.labels->reserve(rows.size());
    for (auto& r : rows) {
        out.values.push_back(r.price);
        out.labels->push_back(std::move(r.label));
    }
    return out;
}

inline TimeSeries load_csv(const std::filesystem::path& path, const CsvConfig& config = {}) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "'");
    return parse_csv(in, config);
}

/// Canonical "Date,Price" form. Unlabelled series get consecutive ISO dates
/// starting 2000-01-01.
inline void write_csv(std::ostream& out, const TimeSeries& series) {
    validate(series);
    using namespace std::chrono;
    const sys_days start{year{2000} / January / 1};
    out << "Date,Price\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const std::string label = series.labels ? (*series.labels)[k]
                                                : detail::iso_date(start + days{static_cast<int>(k)});
        out << label << ',' << detail::shortest(series.values[k]) << '\n';
    }
}

inline void write_csv(const std::filesystem::path& path, const TimeSeries& series) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
    write_csv(out, series);
    if (!out) fail(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Model persistence

inline constexpr int kModelFormatVersion = 1;

namespace detail {

using nlohmann::json;

/// FNV-1a, 64 bit.
inline std::string checksum_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline json class_to_json(const ClassStats& c) {
    json j = {{"count", c.count}};
    if (c.empty()) return j;
    j["mean"] = std::vector<double>(c.mean.data(), c.mean.data() + c.mean.size());
    j["std"] = std::vector<double>(c.std.data(), c.std.data() + c.std.size());
    json rows = json::array();
    for (Eigen::Index r = 0; r < c.inv_cov.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index col = 0; col < c.inv_cov.cols(); ++col) row.push_back(c.inv_cov(r, col));
        rows.push_back(std::move(row));
    }
    j["inv_cov"] = std::move(rows);
    return j;
}

inline ClassStats class_from_json(const json& j, std::size_t dim) {
    ClassStats c;
    c.count = j.at("count").get<std::size_t>();
    if (c.count == 0) return c;
    const auto mean = j.at("mean").get<std::vector<double>>();
    const auto sd = j.at("std").get<std::vector<double>>();
    const auto inv = j.at("inv_cov").get<std::vector<std::vector<double>>>();
    if (mean.size() != dim || sd.size() != dim || inv.size() != dim) {
        fail(ErrorKind::Corrupt, "class statistics do not match lag dimension " + std::to_string(dim));
    }
    const auto n = static_cast<Eigen::Index>(dim);
    c.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), n);
    c.std = Eigen::Map<const Eigen::VectorXd>(sd.data(), n);
    c.inv_cov.resize(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& row = inv[static_cast<std::size_t>(r)];
        if (row.size() != dim) fail(ErrorKind::Corrupt, "inverse covariance is not square");
        for (Eigen::Index col = 0; col < n; ++col) c.inv_cov(r, col) = row[static_cast<std::size_t>(col)];
    }
    return c;
}

inline json model_payload(const TemopModel& model) {
    json lags = json::array();
    for (const LagModel& lm : model.lag_models) {
        json subsets = json::array();
        for (const SubsetModel& s : lm.subsets) {
            std::vector<int> pattern(s.pattern.codes.begin(), s.pattern.codes.end());
            subsets.push_back({{"pattern", pattern},
                               {"total", s.total},
                               {"plus", class_to_json(s.plus)},
                               {"minus", class_to_json(s.minus)}});
        }
        lags.push_back({{"lag", lm.lag}, {"subsets", std::move(subsets)}});
    }
    return {{"format_version", kModelFormatVersion},
            {"m", model.m},
            {"q", model.q},
            {"lambda", model.lambda},
            {"train_len", model.train_len},
            {"lags", std::move(lags)}};
}

inline TemopModel model_from_payload(const json& j) {
    TemopModel model;
    model.m = j.at("m").get<std::size_t>();
    model.q = j.at("q").get<std::size_t>();
    model.lambda = j.at("lambda").get<double>();
    model.train_len = j.at("train_len").get<std::size_t>();
    const json& lags = j.at("lags");
    if (!lags.is_array() || lags.size() != model.q || model.q == 0) {
        fail(ErrorKind::Corrupt, "lag list does not hold q entries");
    }
    for (std::size_t k = 0; k < lags.size(); ++k) {
        LagModel lm;
        lm.lag = lags[k].at("lag").get<std::size_t>();
        if (lm.lag != k + 1) fail(ErrorKind::Corrupt, "lag models out of order");
        for (const json& s : lags[k].at("subsets")) {
            SubsetModel sub;
            for (int code : s.at("pattern").get<std::vector<int>>()) {
                if (code != 1 && code != -1) fail(ErrorKind::Corrupt, "pattern code outside {-1, 1}");
                sub.pattern.codes.push_back(static_cast<TrendCode>(code));
            }
            if (sub.pattern.size() + 1 != lm.lag) fail(ErrorKind::Corrupt, "pattern length mismatch");
            sub.total = s.at("total").get<std::size_t>();
            sub.plus = class_from_json(s.at("plus"), lm.lag);
            sub.minus = class_from_json(s.at("minus"), lm.lag);
            if (sub.plus.count + sub.minus.count != sub.total) {
                fail(ErrorKind::Corrupt, "class counts do not add up to the subset total");
            }
            lm.subsets.push_back(std::move(sub));
        }
        model.lag_models.push_back(std::move(lm));
    }
    return model;
}

} // namespace detail

inline std::string serialize_model(const TemopModel& model) {
    nlohmann::json doc = detail::model_payload(model);
    doc["checksum"] = detail::checksum_hex(doc.dump());
    return doc.dump(1) + "\n";
}

inline TemopModel deserialize_model(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Corrupt, std::string("malformed or truncated model file (") + e.what() + ")");
    }
    if (!doc.is_object() || !doc.contains("format_version") || !doc["format_version"].is_number_integer()) {
        fail(ErrorKind::Corrupt, "model file lacks a format_version");
    }
    const int version = doc["format_version"].get<int>();
    if (version != kModelFormatVersion) {
        fail(ErrorKind::UnsupportedVersion, "model format version " + std::to_string(version) +
                                                " (supported: " + std::to_string(kModelFormatVersion) + ")");
    }
    if (!doc.contains("checksum") || !doc["checksum"].is_string()) {
        fail(ErrorKind::Corrupt, "model file lacks a checksum");
    }
    const std::string stored = doc["checksum"].get<std::string>();
    doc.erase("checksum");
    if (detail::checksum_hex(doc.dump()) != stored) fail(ErrorKind::Corrupt, "checksum mismatch");
    try {
        return detail::model_from_payload(doc);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Corrupt, std::string("model payload has the wrong shape (") + e.what() + ")");
    }
}

inline void save_model(const TemopModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
    out << serialize_model(model);
    if (!out) fail(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

inline TemopModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize_model(buf.str());
}

// ---------------------------------------------------------------------------
// Synthetic series

enum class SyntheticKind { RandomWalk, Trending, Alternating };

inline std::optional<SyntheticKind> parse_synthetic_kind(std::string_view name) {
    if (name == "random_walk") return SyntheticKind::RandomWalk;
    if (name == "trending") return SyntheticKind::Trending;
    if (name == "alternating") return SyntheticKind::Alternating;
    return std::nullopt;
}

/// random_walk: Gaussian steps from 100, floored at 1. trending: strictly
/// increasing. alternating: strict up/down zigzag starting with an up move.
inline TimeSeries generate_synthetic(SyntheticKind kind, std::size_t n, std::uint64_t seed) {
    if (n < 1) fail(ErrorKind::InvalidInput, "synthetic series length must be at least 1");
    TimeSeries out;
    out.values.reserve(n);
    std::mt19937_64 rng(seed);
    switch (kind) {
    case SyntheticKind::RandomWalk: {
        std::normal_distribution<double> step(0.0, 1.0);
        double v = 100.0;
        for (std::size_t k = 0; k < n; ++k) {
            out.values.push_back(v);
            v = std::max(v + step(rng), 1.0);
        }
        break;
    }
    case SyntheticKind::Trending: {
        std::uniform_real_distribution<double> inc(0.1, 1.0);
        double v = 100.0;
        for (std::size_t k = 0; k < n; ++k) {
            out.values.push_back(v);
            v += inc(rng);
        }
        break;
    }
    case SyntheticKind::Alternating: {
        std::uniform_real_distribution<double> amp(0.5, 1.5);
        for (std::size_t k = 0; k < n; ++k) out.values.push_back(k % 2 == 0 ? 100.0 : 100.0 + amp(rng));
        break;
    }
    }
    return out;
}

} // namespace temop
