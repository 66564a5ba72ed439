#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "temop/error.hpp"
#include "temop/infer.hpp"
#include "temop/metrics.hpp"
#include "temop/series.hpp"
#include "temop/train.hpp"

namespace temop {

/// Chronological layout: train | gap | val1 | gap | val2 | gap | test,
/// or train | gap | test when validations are disabled.
struct SplitSpec {
    std::size_t train_len = 3000;
    std::size_t val_len = 300;
    std::size_t test_len = 300;
    std::size_t gap_len = 30;
    bool use_validations = true;

    std::size_t required_length() const noexcept {
        return use_validations ? train_len + 2 * val_len + test_len + 3 * gap_len
                               : train_len + test_len + gap_len;
    }
};

struct Segment {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end - begin; }
    friend bool operator==(const Segment&, const Segment&) = default;
};

struct SplitResult {
    Segment train_range;
    std::optional<Segment> val1_range;
    std::optional<Segment> val2_range;
    Segment test_range;
    Segment context_range; // values immediately preceding the test segment

    TimeSeries train;
    TimeSeries val1;
    TimeSeries val2;
    TimeSeries test;
    TimeSeries test_context;
};

inline constexpr std::size_t kDefaultContextLen = 30;

namespace detail {

inline TimeSeries slice(const TimeSeries& series, Segment seg) {
    TimeSeries out;
    const auto b = static_cast<std::ptrdiff_t>(seg.begin);
    const auto e = static_cast<std::ptrdiff_t>(seg.end);
    out.values.assign(series.values.begin() + b, series.values.begin() + e);
    if (series.labels) out.labels.emplace(series.labels->begin() + b, series.labels->begin() + e);
    return out;
}

} // namespace detail

inline SplitResult split(const TimeSeries& series, const SplitSpec& spec,
                         std::size_t context_len = kDefaultContextLen) {
    if (spec.train_len == 0 || spec.test_len == 0 || spec.gap_len == 0 ||
        (spec.use_validations && spec.val_len == 0)) {
        fail(ErrorKind::InvalidInput, "split segment lengths must be positive");
    }
    const std::size_t required = spec.required_length();
    if (series.size() < required) {
        fail(ErrorKind::InsufficientData, "split needs at least " + std::to_string(required) +
                                              " values, got " + std::to_string(series.size()));
    }

    SplitResult out;
    std::size_t cursor = 0;
    auto take = [&cursor](std::size_t len) {
        Segment seg{cursor, cursor + len};
        cursor = seg.end;
        return seg;
    };
    out.train_range = take(spec.train_len);
    cursor += spec.gap_len;
    if (spec.use_validations) {
        out.val1_range = take(spec.val_len);
        cursor += spec.gap_len;
        out.val2_range = take(spec.val_len);
        cursor += spec.gap_len;
    }
    out.test_range = take(spec.test_len);
    const std::size_t ctx = std::min(context_len, out.test_range.begin);
    out.context_range = Segment{out.test_range.begin - ctx, out.test_range.begin};

    out.train = detail::slice(series, out.train_range);
    if (out.val1_range) out.val1 = detail::slice(series, *out.val1_range);
    if (out.val2_range) out.val2 = detail::slice(series, *out.val2_range);
    out.test = detail::slice(series, out.test_range);
    out.test_context = detail::slice(series, out.context_range);
    return out;
}

/// Records which positions were read to score each point.
struct AccessAudit {
    struct Entry {
        std::size_t target = 0;
        Segment read;
    };
    std::vector<Entry> entries;

    bool leak_free() const noexcept {
        return std::all_of(entries.begin(), entries.end(),
                           [](const Entry& e) { return e.read.end <= e.target; });
    }
};

/// Scores every test value with the fixed model, feeding it only the `q`
/// values that precede it. Early points draw history from the tail; later
/// ones from realized test values. Indices are reported in the coordinates
/// of `tail ++ test` shifted by `origin` (the tail's position in its series).
inline std::vector<ScoredPoint> walk_forward(const TemopModel& model, std::span<const double> pre_test_tail,
                                             std::span<const double> test, AccessAudit* audit = nullptr,
                                             std::size_t origin = 0) {
    if (pre_test_tail.size() < std::max<std::size_t>(model.q, 1)) {
        fail(ErrorKind::InsufficientHistory, "walk-forward needs a tail of at least q = " +
                                                 std::to_string(model.q) + " values, got " +
                                                 std::to_string(pre_test_tail.size()));
    }
    std::vector<double> joined(pre_test_tail.begin(), pre_test_tail.end());
    joined.insert(joined.end(), test.begin(), test.end());
    const std::span<const double> all(joined);
    const std::size_t base = pre_test_tail.size();

    std::vector<ScoredPoint> points;
    points.reserve(test.size());
    for (std::size_t k = 0; k < test.size(); ++k) {
        const std::size_t target = base + k;
        const Segment read{target - model.q, target};
        const ScoreBreakdown score = predict_proba(model, all.subspan(read.begin, read.size()));
        if (audit) {
            audit->entries.push_back({origin + target, Segment{origin + read.begin, origin + read.end}});
        }
        const double prev = all[target - 1];
        ScoredPoint p;
        p.index = origin + target;
        p.p_up = score.p_up;
        p.label = trend_encode_scalar(prev, all[target]);
        p.realized_return = all[target] / prev - 1.0;
        points.push_back(p);
    }
    return points;
}

struct EvalOptions {
    SplitSpec split;
    TrainOptions train;
    double threshold = 0.5;
    double rf = 0.0;
    StrategyMode mode = StrategyMode::LongOrCash;
    std::string series_id;
};

struct EvalReport {
    std::vector<ScoredPoint> per_point;
    double acc = 0.0;
    double f1 = 0.0;
    // Undefined when the test labels hold a single class or returns have no variance.
    std::optional<double> roc_auc;
    std::optional<double> pr_auc;
    std::optional<double> sr;
    std::size_t q = 0;
    EvalOptions options;
    std::vector<std::size_t> subsets_per_lag;
};

namespace detail {

template <class F>
std::optional<double> defined_or_empty(F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::UndefinedMetric) throw;
        return std::nullopt;
    }
}

} // namespace detail

/// Fills every metric field of `report` from its `per_point` entries.
inline void compute_metrics(EvalReport& report) {
    const std::span<const ScoredPoint> pts(report.per_point);
    const ConfusionCounts c = confusion(pts, report.options.threshold);
    report.acc = accuracy(c);
    report.f1 = f1(c);
    report.roc_auc = detail::defined_or_empty([&] { return roc_auc(pts); });
    report.pr_auc = detail::defined_or_empty([&] { return pr_auc(pts); });
    report.sr = detail::defined_or_empty([&] {
        const auto rets = strategy_returns(pts, report.options.threshold, report.options.mode);
        return sharpe_ratio(rets, report.options.rf);
    });
}

inline EvalReport evaluate(const TimeSeries& series, const EvalOptions& options = {},
                           AccessAudit* audit = nullptr) {
    validate(series);
    const std::size_t context_len = std::max(kDefaultContextLen, options.train.lag_cap);
    const SplitResult parts = split(series, options.split, context_len);
    const TemopModel model = train(parts.train, options.train);

    EvalReport report;
    report.options = options;
    report.q = model.q;
    for (const LagModel& lm : model.lag_models) report.subsets_per_lag.push_back(lm.subsets.size());
    report.per_point = walk_forward(model, parts.test_context.view(), parts.test.view(), audit,
                                    parts.context_range.begin);
    compute_metrics(report);
    return report;
}

} // namespace temop
