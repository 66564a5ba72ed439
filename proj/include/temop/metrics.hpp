#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "temop/error.hpp"
#include "temop/infer.hpp"
#include "temop/series.hpp"

namespace temop {

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const noexcept { return tp + fp + tn + fn; }
};

/// One walk-forward prediction together with what actually happened.
struct ScoredPoint {
    std::size_t index = 0; // position of the predicted value in the source series
    double p_up = 0.5;
    TrendCode label = 1;
    double realized_return = 0.0;
};

enum class StrategyMode { LongOrCash, LongShort };

inline ConfusionCounts confusion(std::span<const ScoredPoint> points, double threshold = 0.5) {
    ConfusionCounts c;
    for (const ScoredPoint& p : points) {
        const bool predicted_up = classify(p.p_up, threshold) > 0;
        const bool actual_up = p.label > 0;
        if (predicted_up && actual_up) ++c.tp;
        else if (predicted_up) ++c.fp;
        else if (actual_up) ++c.fn;
        else ++c.tn;
    }
    return c;
}

inline double accuracy(const ConfusionCounts& c) {
    if (c.total() == 0) fail(ErrorKind::UndefinedMetric, "accuracy of an empty prediction set");
    return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

/// Harmonic mean of precision and recall. Zero when there are no true positives.
inline double f1(const ConfusionCounts& c) {
    if (c.tp == 0) return 0.0;
    const double precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    const double recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    return 2.0 * precision * recall / (precision + recall);
}

/// ROC area as the Mann-Whitney statistic: the chance that a random positive
/// outranks a random negative, ties counting one half.
inline double roc_auc(std::span<const ScoredPoint> points) {
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return points[a].p_up < points[b].p_up; });

    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
    // Twice the U statistic keeps every partial sum an exact integer.
    double twice_u = 0.0;
    std::size_t negatives_below = 0;
    for (std::size_t lo = 0; lo < order.size();) {
        std::size_t hi = lo;
        std::size_t pos_in_tie = 0;
        std::size_t neg_in_tie = 0;
        while (hi < order.size() && points[order[hi]].p_up == points[order[lo]].p_up) {
            (points[order[hi]].label > 0 ? pos_in_tie : neg_in_tie) += 1;
            ++hi;
        }
        twice_u += static_cast<double>(pos_in_tie) *
                   (2.0 * static_cast<double>(negatives_below) + static_cast<double>(neg_in_tie));
        negatives_below += neg_in_tie;
        n_pos += pos_in_tie;
        n_neg += neg_in_tie;
        lo = hi;
    }
    if (n_pos == 0 || n_neg == 0) {
        fail(ErrorKind::UndefinedMetric, "ROC AUC needs both positive and negative labels");
    }
    return twice_u / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

/// Area under the precision-recall curve from a descending-score sweep with
/// step-wise interpolation; tied scores form a single threshold.
inline double pr_auc(std::span<const ScoredPoint> points) {
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return points[a].p_up > points[b].p_up; });

    const auto n_pos = static_cast<std::size_t>(
        std::count_if(points.begin(), points.end(), [](const ScoredPoint& p) { return p.label > 0; }));
    if (n_pos == 0) fail(ErrorKind::UndefinedMetric, "PR AUC needs at least one positive label");

    double area = 0.0;
    double prev_recall = 0.0;
    std::size_t tp = 0;
    std::size_t seen = 0;
    for (std::size_t lo = 0; lo < order.size();) {
        std::size_t hi = lo;
        while (hi < order.size() && points[order[hi]].p_up == points[order[lo]].p_up) {
            tp += points[order[hi]].label > 0;
            ++hi;
        }
        seen += hi - lo;
        const double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
        const double precision = static_cast<double>(tp) / static_cast<double>(seen);
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
        lo = hi;
    }
    return area;
}

inline std::vector<double> strategy_returns(std::span<const ScoredPoint> points, double threshold = 0.5,
                                            StrategyMode mode = StrategyMode::LongOrCash) {
    std::vector<double> out;
    out.reserve(points.size());
    for (const ScoredPoint& p : points) {
        if (classify(p.p_up, threshold) > 0) out.push_back(p.realized_return);
        else out.push_back(mode == StrategyMode::LongShort ? -p.realized_return : 0.0);
    }
    return out;
}

/// Per-step Sharpe ratio, sample standard deviation, no annualization.
inline double sharpe_ratio(std::span<const double> returns, double rf = 0.0) {
    if (returns.size() < 2) fail(ErrorKind::UndefinedMetric, "Sharpe ratio needs at least two returns");
    const auto [lo, hi] = std::minmax_element(returns.begin(), returns.end());
    if (*lo == *hi) fail(ErrorKind::UndefinedMetric, "Sharpe ratio of zero-variance returns");
    const double n = static_cast<double>(returns.size());
    const double mean = std::accumulate(returns.begin(), returns.end(), 0.0) / n;
    double ss = 0.0;
    for (double r : returns) ss += (r - mean) * (r - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    if (!(sd > 0.0)) fail(ErrorKind::UndefinedMetric, "Sharpe ratio of zero-variance returns");
    return (mean - rf) / sd;
}

} // namespace temop
