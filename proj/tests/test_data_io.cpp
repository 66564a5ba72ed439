#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <functional>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "temop/data_io.hpp"
#include "temop/infer.hpp"
#include "test_support.hpp"

using namespace temop;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::Internal;
}

std::string error_text(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

TimeSeries parse(const std::string& text, const CsvConfig& cfg = {}) {
    std::istringstream in(text);
    return parse_csv(in, cfg);
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

void require_identical(const TemopModel& a, const TemopModel& b) {
    REQUIRE(a.m == b.m);
    REQUIRE(a.q == b.q);
    REQUIRE(same_bits(a.lambda, b.lambda));
    REQUIRE(a.train_len == b.train_len);
    REQUIRE(a.lag_models.size() == b.lag_models.size());
    for (std::size_t i = 0; i < a.lag_models.size(); ++i) {
        const auto& la = a.lag_models[i];
        const auto& lb = b.lag_models[i];
        REQUIRE(la.lag == lb.lag);
        REQUIRE(la.subsets.size() == lb.subsets.size());
        for (std::size_t k = 0; k < la.subsets.size(); ++k) {
            const auto& sa = la.subsets[k];
            const auto& sb = lb.subsets[k];
            CHECK(sa.pattern == sb.pattern);
            CHECK(sa.total == sb.total);
            for (auto [ca, cb] : {std::pair{&sa.plus, &sb.plus}, std::pair{&sa.minus, &sb.minus}}) {
                REQUIRE(ca->count == cb->count);
                REQUIRE(ca->mean.size() == cb->mean.size());
                for (Eigen::Index d = 0; d < ca->mean.size(); ++d) {
                    CHECK(same_bits(ca->mean(d), cb->mean(d)));
                    CHECK(same_bits(ca->std(d), cb->std(d)));
                    for (Eigen::Index e = 0; e < ca->mean.size(); ++e) {
                        CHECK(same_bits(ca->inv_cov(d, e), cb->inv_cov(d, e)));
                    }
                }
            }
        }
    }
}

} // namespace

TEST_CASE("load_csv strips thousands separators and sorts oldest first", "[data_io]") {
    const TimeSeries ts = parse(
        "\"Date\",\"Price\",\"Open\"\n"
        "\"01/03/2020\",\"28,989.73\",\"29,000.00\"\n"
        "\"01/02/2020\",\"29,348.10\",\"28,900.00\"\n");
    REQUIRE(ts.size() == 2);
    CHECK(ts.values[0] == 29348.10);
    CHECK(ts.values[1] == 28989.73);
    REQUIRE(ts.labels);
    CHECK((*ts.labels)[0] == "01/02/2020");

    CsvConfig newest_first;
    newest_first.ascending = false;
    const TimeSeries desc = parse("Date,Price\n2020-01-02,1\n2020-01-03,2\n", newest_first);
    CHECK(desc.values == std::vector<double>{2, 1});
}

TEST_CASE("load_csv accepts month-name dates and custom separators", "[data_io]") {
    CsvConfig euro;
    euro.thousands_separator = '.';
    euro.decimal_point = ',';
    euro.price_column = "Close";
    const TimeSeries ts = parse("Date,Close\n\"Jan 03, 2020\",\"1.234,5\"\n\"Jan 02, 2020\",\"1.000,25\"\n", euro);
    CHECK(ts.values == std::vector<double>{1000.25, 1234.5});

    CsvConfig clash;
    clash.decimal_point = ',';
    CHECK(kind_of([&] { parse("Date,Price\n", clash); }) == ErrorKind::InvalidInput);
}

TEST_CASE("load_csv diagnostics", "[data_io]") {
    CHECK(kind_of([] { parse(""); }) == ErrorKind::Parse);
    CHECK(error_text([] { parse(""); }).find("empty file") != std::string::npos);
    CHECK(error_text([] { parse("Date,Close\n2020-01-01,1\n"); }).find("missing column 'Price'") !=
          std::string::npos);
    const std::string gap = error_text([] { parse("Date,Price\n2020-01-01,1\n2020-01-02,-\n"); });
    CHECK(gap.find("line 3") != std::string::npos);
    CHECK(gap.find("'-'") != std::string::npos);
    CHECK(error_text([] { parse("Date,Price\n2020-01-01,1\n2020-01-01,2\n"); }).find("duplicate date") !=
          std::string::npos);
    CHECK(error_text([] { parse("Date,Price\n2020-13-01,1\n"); }).find("cannot parse date") != std::string::npos);
    CHECK(error_text([] { parse("Date,Price\n"); }).find("no data rows") != std::string::npos);
    CHECK(kind_of([] { load_csv("/nonexistent/prices.csv"); }) == ErrorKind::Io);
}

TEST_CASE("load_csv reads every row of a large file", "[data_io]") {
    const fs::path path = fs::temp_directory_path() / "temop_rows_4020.csv";
    {
        std::ofstream out(path);
        out << "\"Date\",\"Price\"\n";
        // Newest first, with thousands separators, like a typical export.
        for (int k = 4019; k >= 0; --k) {
            const auto day = std::chrono::sys_days{std::chrono::year{2000} / 1 / 1} + std::chrono::days{k};
            const std::chrono::year_month_day ymd{day};
            out << '"' << static_cast<unsigned>(ymd.month()) << '/' << static_cast<unsigned>(ymd.day()) << '/'
                << static_cast<int>(ymd.year()) << "\",\"1," << (100 + k % 900) << ".50\"\n";
        }
    }
    std::size_t rows = 0;
    {
        std::ifstream in(path);
        std::string line;
        while (std::getline(in, line)) ++rows;
    }
    const TimeSeries ts = load_csv(path);
    CHECK(ts.size() == rows - 1);
    CHECK(ts.size() == 4020);
    CHECK(ts.values.front() == 1100.5);
    fs::remove(path);
}

TEST_CASE("write_csv then load_csv reproduces the series", "[data_io][property]") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        TimeSeries ts{testing_support::random_walk(200, seed), std::nullopt};
        for (double& v : ts.values) v = v * 137.035999 + 1e-7 * static_cast<double>(seed);
        std::stringstream buf;
        write_csv(buf, ts);
        const TimeSeries back = parse_csv(buf);
        REQUIRE(back.size() == ts.size());
        for (std::size_t k = 0; k < ts.size(); ++k) CHECK(same_bits(back.values[k], ts.values[k]));

        std::stringstream again;
        write_csv(again, back);
        const TimeSeries third = parse_csv(again);
        CHECK(third.values == back.values);
        CHECK(*third.labels == *back.labels);
    }
}

TEST_CASE("model round trip is bit-exact", "[data_io]") {
    const auto z = testing_support::random_walk(400, 17);
    const TemopModel model = train(z, {10, 0.1, 30});
    const TemopModel back = deserialize_model(serialize_model(model));
    require_identical(model, back);
    for (std::size_t end = model.q; end <= z.size(); end += 13) {
        const auto hist = std::span<const double>(z).first(end);
        CHECK(same_bits(predict_proba(model, hist).p_up, predict_proba(back, hist).p_up));
    }
    CHECK(serialize_model(back) == serialize_model(model));

    const fs::path path = fs::temp_directory_path() / "temop_model_roundtrip.json";
    save_model(model, path);
    require_identical(model, load_model(path));
    fs::remove(path);
}

TEST_CASE("model file with empty classes round-trips", "[data_io]") {
    std::vector<double> z(100);
    for (std::size_t k = 0; k < z.size(); ++k) z[k] = static_cast<double>(k);
    const TemopModel model = train(z, {5, 0.1, 4});
    REQUIRE(model.lag_models[0].subsets[0].minus.empty());
    require_identical(model, deserialize_model(serialize_model(model)));
}

TEST_CASE("model file corruption and versioning", "[data_io]") {
    const auto z = testing_support::random_walk(200, 2);
    const std::string text = serialize_model(train(z, {5, 0.1, 30}));

    CHECK(kind_of([&] { deserialize_model(text.substr(0, text.size() / 2)); }) == ErrorKind::Corrupt);
    CHECK(kind_of([&] { deserialize_model(""); }) == ErrorKind::Corrupt);

    auto doc = nlohmann::json::parse(text);
    doc["format_version"] = 2;
    CHECK(kind_of([&] { deserialize_model(doc.dump()); }) == ErrorKind::UnsupportedVersion);

    auto tampered = nlohmann::json::parse(text);
    tampered["lags"][0]["subsets"][0]["total"] = 1;
    CHECK(kind_of([&] { deserialize_model(tampered.dump()); }) == ErrorKind::Corrupt);

    auto no_sum = nlohmann::json::parse(text);
    no_sum.erase("checksum");
    CHECK(kind_of([&] { deserialize_model(no_sum.dump()); }) == ErrorKind::Corrupt);

    CHECK(kind_of([] { load_model("/nonexistent/model.json"); }) == ErrorKind::Io);
}

TEST_CASE("model file carries the documented fields", "[data_io]") {
    const auto z = testing_support::random_walk(200, 6);
    const auto doc = nlohmann::json::parse(serialize_model(train(z, {5, 0.1, 30})));
    for (const char* key : {"format_version", "m", "q", "lambda", "train_len", "lags", "checksum"}) {
        CHECK(doc.contains(key));
    }
    const auto& subset = doc["lags"][1]["subsets"][0];
    CHECK(subset["pattern"].is_array());
    CHECK(subset["pattern"][0].is_number_integer());
    for (const char* key : {"count", "mean", "std", "inv_cov"}) CHECK(subset["plus"].contains(key));
}

TEST_CASE("generate_synthetic", "[data_io]") {
    const TimeSeries up = generate_synthetic(SyntheticKind::Trending, 5, 3);
    REQUIRE(up.size() == 5);
    for (std::size_t k = 1; k < up.size(); ++k) CHECK(up.values[k] > up.values[k - 1]);

    const TimeSeries zig = generate_synthetic(SyntheticKind::Alternating, 4, 3);
    CHECK(trend_encode_window(zig.values) == TrendPattern{{1, -1, 1}});

    const TimeSeries a = generate_synthetic(SyntheticKind::RandomWalk, 1000, 42);
    const TimeSeries b = generate_synthetic(SyntheticKind::RandomWalk, 1000, 42);
    CHECK(a.values == b.values);
    CHECK(*std::min_element(a.values.begin(), a.values.end()) >= 1.0);
    CHECK(generate_synthetic(SyntheticKind::RandomWalk, 1000, 43).values != a.values);

    CHECK(kind_of([] { generate_synthetic(SyntheticKind::Trending, 0, 1); }) == ErrorKind::InvalidInput);
    CHECK(parse_synthetic_kind("random_walk") == SyntheticKind::RandomWalk);
    CHECK_FALSE(parse_synthetic_kind("sideways"));
}
