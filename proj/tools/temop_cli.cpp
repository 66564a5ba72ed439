// temop: batch front end for training, prediction, evaluation and synthetic data.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "temop/temop.hpp"

namespace {

using temop::detail::fmt9;

constexpr int kExitUsage = 64;

int exit_code(temop::ErrorKind kind) {
    switch (kind) {
    case temop::ErrorKind::InvalidInput: return 2;
    case temop::ErrorKind::InsufficientData: return 3;
    case temop::ErrorKind::InsufficientHistory: return 4;
    case temop::ErrorKind::UndefinedMetric: return 5;
    case temop::ErrorKind::Io: return 6;
    case temop::ErrorKind::Parse: return 7;
    case temop::ErrorKind::Corrupt: return 8;
    case temop::ErrorKind::UnsupportedVersion: return 9;
    case temop::ErrorKind::Internal: return 70;
    }
    return 70;
}

struct CsvFlags {
    std::string date_column = "Date";
    std::string price_column = "Price";
    std::string thousands = ",";
    std::string decimal = ".";
    bool descending = false;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--date-column", date_column, "Date column name")->capture_default_str();
        cmd.add_option("--price-column", price_column, "Price column name")->capture_default_str();
        cmd.add_option("--thousands", thousands, "Thousands separator (empty for none)")->capture_default_str();
        cmd.add_option("--decimal", decimal, "Decimal point character")->capture_default_str();
        cmd.add_flag("--descending", descending, "Keep newest rows first");
    }

    temop::CsvConfig config() const {
        temop::CsvConfig c;
        c.date_column = date_column;
        c.price_column = price_column;
        if (thousands.size() > 1 || decimal.size() != 1) {
            temop::fail(temop::ErrorKind::InvalidInput, "separators must be single characters");
        }
        c.thousands_separator = thousands.empty() ? std::nullopt : std::optional<char>(thousands[0]);
        c.decimal_point = decimal[0];
        c.ascending = !descending;
        return c;
    }
};

struct TrainFlags {
    std::size_t m = temop::kDefaultMinSupport;
    double lambda = temop::kDefaultRidge;
    std::size_t lag_cap = temop::kDefaultLagCap;

    void add_to(CLI::App& cmd) {
        cmd.add_option("-m,--min-support", m, "Minimum windows per trend-pattern subset")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd.add_option("--lambda", lambda, "Covariance ridge")->check(CLI::PositiveNumber)->capture_default_str();
        cmd.add_option("--lag-cap", lag_cap, "Largest lag order considered")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    }

    temop::TrainOptions options() const { return {m, lambda, lag_cap}; }
};

/// Writes to the named file, or stdout when the path is empty or "-".
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_) temop::fail(temop::ErrorKind::Io, "cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

int run_train(const std::string& csv_path, const std::string& model_out, const CsvFlags& csv,
              const TrainFlags& flags) {
    const temop::TimeSeries series = temop::load_csv(csv_path, csv.config());
    const temop::TemopModel model = temop::train(series, flags.options());
    temop::save_model(model, model_out);
    std::cout << "q=" << model.q << "\n";
    for (const temop::LagModel& lm : model.lag_models) {
        std::size_t min_support = SIZE_MAX;
        for (const auto& s : lm.subsets) min_support = std::min(min_support, s.total);
        std::cout << "lag " << lm.lag << ": subsets=" << lm.subsets.size() << " min_support=" << min_support
                  << "\n";
    }
    return 0;
}

int run_predict(const std::string& model_path, const std::string& history_path, const std::vector<double>& values,
                const CsvFlags& csv, double threshold, bool verbose) {
    const temop::TemopModel model = temop::load_model(model_path);
    std::vector<double> history = values;
    if (!history_path.empty()) history = temop::load_csv(history_path, csv.config()).values;
    if (history.size() < model.q) {
        temop::fail(temop::ErrorKind::InsufficientHistory,
                    "model has q = " + std::to_string(model.q) + " and needs that many history values, got " +
                        std::to_string(history.size()));
    }
    const temop::ScoreBreakdown score = temop::predict_proba(model, history);
    const int cls = temop::classify(score.p_up, threshold);
    if (verbose) {
        std::cout << "lag\ts_plus_trend\ts_plus_dist\ts_minus_trend\ts_minus_dist\n";
        for (std::size_t k = 0; k < score.per_lag.size(); ++k) {
            const auto& s = score.per_lag[k];
            std::cout << k + 1 << '\t' << fmt9(s.s_plus_trend) << '\t' << fmt9(s.s_plus_dist) << '\t'
                      << fmt9(s.s_minus_trend) << '\t' << fmt9(s.s_minus_dist) << '\n';
        }
        std::cout << "total_plus=" << fmt9(score.total_plus) << " total_minus=" << fmt9(score.total_minus)
                  << '\n';
    }
    std::cout << "p_up=" << fmt9(score.p_up) << " class=" << (cls > 0 ? "+1" : "-1") << '\n';
    return 0;
}

int run_evaluate(const std::string& csv_path, const CsvFlags& csv, const temop::EvalOptions& options,
                 const std::string& format, const std::string& out_path) {
    const temop::TimeSeries series = temop::load_csv(csv_path, csv.config());
    const temop::EvalReport report = temop::evaluate(series, options);
    Output out(out_path);
    if (format == "json") out.stream() << temop::report_to_json(report).dump(2) << '\n';
    else if (format == "csv") temop::write_report_csv(out.stream(), report);
    else temop::write_report_table(out.stream(), report);
    return 0;
}

int run_synth(const std::string& kind_name, std::size_t n, std::uint64_t seed, const std::string& out_path) {
    const auto kind = temop::parse_synthetic_kind(kind_name);
    if (!kind) temop::fail(temop::ErrorKind::InvalidInput, "unknown synthetic kind '" + kind_name + "'");
    const temop::TimeSeries series = temop::generate_synthetic(*kind, n, seed);
    Output out(out_path);
    temop::write_csv(out.stream(), series);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-lag probabilistic trend forecaster"};
    app.require_subcommand(1);

    CsvFlags csv;
    TrainFlags train_flags;

    std::string train_csv;
    std::string model_out;
    auto* train_cmd = app.add_subcommand("train", "Fit a model on a price CSV and save it");
    train_cmd->add_option("csv", train_csv, "Input CSV")->required();
    train_cmd->add_option("-o,--model", model_out, "Model output path")->required();
    csv.add_to(*train_cmd);
    train_flags.add_to(*train_cmd);

    std::string model_in;
    std::string history_path;
    std::vector<double> values;
    double threshold = 0.5;
    bool verbose = false;
    auto* predict_cmd = app.add_subcommand("predict", "Probability that the next value does not fall");
    predict_cmd->add_option("--model", model_in, "Model file")->required();
    auto* hist_opt = predict_cmd->add_option("--history", history_path, "History CSV (oldest first after parsing)");
    auto* val_opt = predict_cmd->add_option("--values", values, "History values, oldest first");
    hist_opt->excludes(val_opt);
    predict_cmd->add_option("--threshold", threshold, "Up-class threshold")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    predict_cmd->add_flag("-v,--verbose", verbose, "Print per-lag scores");
    csv.add_to(*predict_cmd);

    std::string eval_csv;
    std::string format = "table";
    std::string eval_out;
    bool no_validations = false;
    bool long_short = false;
    temop::EvalOptions eval_opts;
    auto* eval_cmd = app.add_subcommand("evaluate", "Train, walk forward over the test segment and report metrics");
    eval_cmd->add_option("csv", eval_csv, "Input CSV")->required();
    eval_cmd->add_option("--format", format, "Report format")
        ->check(CLI::IsMember({"json", "csv", "table"}))
        ->capture_default_str();
    eval_cmd->add_option("-o,--output", eval_out, "Report output path (default stdout)");
    eval_cmd->add_option("--train-len", eval_opts.split.train_len)->check(CLI::PositiveNumber)->capture_default_str();
    eval_cmd->add_option("--val-len", eval_opts.split.val_len)->check(CLI::PositiveNumber)->capture_default_str();
    eval_cmd->add_option("--test-len", eval_opts.split.test_len)->check(CLI::PositiveNumber)->capture_default_str();
    eval_cmd->add_option("--gap", eval_opts.split.gap_len)->check(CLI::PositiveNumber)->capture_default_str();
    eval_cmd->add_flag("--no-validations", no_validations, "Use the train | gap | test layout");
    eval_cmd->add_option("--threshold", eval_opts.threshold)->check(CLI::Range(0.0, 1.0))->capture_default_str();
    eval_cmd->add_option("--rf", eval_opts.rf, "Per-step risk-free rate")->capture_default_str();
    eval_cmd->add_flag("--long-short", long_short, "Short when a fall is predicted instead of holding cash");
    eval_cmd->add_option("--series-id", eval_opts.series_id, "Name recorded in the report");
    csv.add_to(*eval_cmd);
    train_flags.add_to(*eval_cmd);

    std::string synth_kind;
    std::size_t synth_n = 0;
    std::uint64_t seed = 42;
    std::string synth_out;
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic price series as CSV");
    synth_cmd->add_option("kind", synth_kind, "random_walk | trending | alternating")
        ->required()
        ->check(CLI::IsMember({"random_walk", "trending", "alternating"}));
    synth_cmd->add_option("n", synth_n, "Number of values")->required()->check(CLI::PositiveNumber);
    synth_cmd->add_option("--seed", seed)->capture_default_str();
    synth_cmd->add_option("-o,--output", synth_out, "Output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*train_cmd) return run_train(train_csv, model_out, csv, train_flags);
        if (*predict_cmd) {
            if (history_path.empty() && values.empty()) {
                std::cerr << "predict: one of --history or --values is required\n";
                return kExitUsage;
            }
            return run_predict(model_in, history_path, values, csv, threshold, verbose);
        }
        if (*eval_cmd) {
            eval_opts.split.use_validations = !no_validations;
            eval_opts.train = train_flags.options();
            eval_opts.mode = long_short ? temop::StrategyMode::LongShort : temop::StrategyMode::LongOrCash;
            if (eval_opts.series_id.empty()) eval_opts.series_id = std::filesystem::path(eval_csv).stem().string();
            return run_evaluate(eval_csv, csv, eval_opts, format, eval_out);
        }
        if (*synth_cmd) return run_synth(synth_kind, synth_n, seed, synth_out);
    } catch (const temop::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(temop::ErrorKind::Internal);
    }
    return kExitUsage;
}
