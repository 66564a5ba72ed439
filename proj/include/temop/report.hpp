#pragma once

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "temop/eval.hpp"

namespace temop {

namespace detail {

inline nlohmann::json optional_number(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

/// Fixed 9 significant digits, locale independent.
inline std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace detail

inline nlohmann::json report_to_json(const EvalReport& report) {
    using nlohmann::json;
    json points = json::array();
    for (const ScoredPoint& p : report.per_point) {
        points.push_back({{"index", p.index},
                          {"p_up", p.p_up},
                          {"label", static_cast<int>(p.label)},
                          {"realized_return", p.realized_return}});
    }
    const EvalOptions& o = report.options;
    json split = {{"train_len", o.split.train_len},
                  {"val_len", o.split.val_len},
                  {"test_len", o.split.test_len},
                  {"gap_len", o.split.gap_len},
                  {"use_validations", o.split.use_validations}};
    json meta = {{"m", o.train.m},
                 {"lambda", o.train.lambda},
                 {"lag_cap", o.train.lag_cap},
                 {"threshold", o.threshold},
                 {"rf", o.rf},
                 {"strategy", o.mode == StrategyMode::LongShort ? "long_short" : "long_or_cash"},
                 {"series_id", o.series_id},
                 {"split", std::move(split)},
                 {"subsets_per_lag", report.subsets_per_lag}};
    return {{"acc", report.acc},
            {"f1", report.f1},
            {"roc_auc", detail::optional_number(report.roc_auc)},
            {"pr_auc", detail::optional_number(report.pr_auc)},
            {"sr", detail::optional_number(report.sr)},
            {"q", report.q},
            {"model_meta", std::move(meta)},
            {"per_point", std::move(points)}};
}

inline void write_report_csv(std::ostream& out, const EvalReport& report) {
    out << "index,p_up,label,realized_return\n";
    for (const ScoredPoint& p : report.per_point) {
        out << p.index << ',' << detail::fmt9(p.p_up) << ',' << static_cast<int>(p.label) << ','
            << detail::fmt9(p.realized_return) << '\n';
    }
}

/// Single-row table in the column order ACC, F1, AUC, SR (plus PR-AUC and q).
inline void write_report_table(std::ostream& out, const EvalReport& report) {
    auto cell = [](const std::optional<double>& v) { return v ? detail::fmt9(*v) : std::string("n/a"); };
    out << "series\tACC\tF1\tAUC\tSR\tPR-AUC\tq\n";
    out << (report.options.series_id.empty() ? "-" : report.options.series_id) << '\t'
        << detail::fmt9(report.acc) << '\t' << detail::fmt9(report.f1) << '\t' << cell(report.roc_auc)
        << '\t' << cell(report.sr) << '\t' << cell(report.pr_auc) << '\t' << report.q << '\n';
}

} // namespace temop
