#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "oracle/naive.hpp"
#include "tradenet/analysis.hpp"
#include "tradenet/error.hpp"

#include <algorithm>
#include <cmath>

using namespace tradenet;

namespace {

MetricsRow row_for(const std::string& sector, int year, double avg_degree) {
    MetricsRow r;
    r.sector = sector;
    r.year = year;
    r.node_count = 10;
    r.average_degree = avg_degree;
    r.average_clustering = 0.5;
    r.density = avg_degree / 9.0;
    r.triangle_count = static_cast<uint64_t>(avg_degree * 10);
    r.diameter = 2;
    r.component_count = 1;
    return r;
}

std::string check_token(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.token();
    }
    return "";
}

} // namespace

TEST_CASE("series assembly keeps year order and skips missing years") {
    std::vector<MetricsRow> rows = {row_for("S", 1997, 3.0), row_for("S", 1995, 1.0),
                                    row_for("T", 1996, 9.0), row_for("S", 1996, 2.0)};
    auto series = assemble_series(rows, "S", "avg_degree");
    CHECK(series.points ==
          std::vector<std::pair<int, double>>{{1995, 1.0}, {1996, 2.0}, {1997, 3.0}});

    std::vector<MetricsRow> gap = {row_for("S", 1995, 1.0), row_for("S", 1997, 3.0)};
    auto sparse = assemble_series(gap, "S", "avg_degree");
    CHECK(sparse.points == std::vector<std::pair<int, double>>{{1995, 1.0}, {1997, 3.0}});
}

TEST_CASE("series assembly is order-independent") {
    testutil::Rng rng(61);
    std::vector<MetricsRow> rows;
    for (int year = 1995; year <= 2010; ++year) rows.push_back(row_for("S", year, year * 0.25));
    auto sorted = assemble_series(rows, "S", "avg_degree");
    for (size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[rng.below(i)]);
    CHECK(assemble_series(rows, "S", "avg_degree").points == sorted.points);
}

TEST_CASE("absent diameters leave no points") {
    MetricsRow empty_year;
    empty_year.sector = "S";
    empty_year.year = 1995;
    std::vector<MetricsRow> rows = {empty_year, row_for("S", 1996, 2.0)};
    auto series = assemble_series(rows, "S", "diameter");
    CHECK(series.points == std::vector<std::pair<int, double>>{{1996, 2.0}});
}

TEST_CASE("unknown sector or metric is an error") {
    std::vector<MetricsRow> rows = {row_for("S", 1995, 1.0)};
    CHECK(check_token([&] { assemble_series(rows, "Q", "avg_degree"); }) == "unknown_sector");
    CHECK(check_token([&] { assemble_series(rows, "S", "bogus"); }) == "unknown_metric");
}

// --- pearson -----------------------------------------------------------------

TEST_CASE("perfect linear relationships") {
    std::vector<double> x = {1, 2, 3, 4};
    std::vector<double> y;
    for (double v : x) y.push_back(2.0 * v + 1.0);
    CHECK(pearson(x, y) == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<double> x3 = {1, 2, 3};
    std::vector<double> neg = {-1, -2, -3};
    CHECK(pearson(x3, neg) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("the hand-computed 0.5 example") {
    std::vector<double> x = {1, 2, 3};
    std::vector<double> y = {1, 3, 2};
    CHECK(pearson(x, y) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("pearson error contracts") {
    std::vector<double> x = {1, 2, 3};
    std::vector<double> y = {1, 2};
    CHECK(check_token([&] { pearson(x, y); }) == "length_mismatch");
    std::vector<double> one = {1.0};
    CHECK(check_token([&] { pearson(one, one); }) == "insufficient_points");
    std::vector<double> constant = {2.0, 2.0, 2.0};
    CHECK(check_token([&] { pearson(constant, x); }) == "undefined_correlation");
    CHECK(check_token([&] { pearson(x, constant); }) == "undefined_correlation");
    std::vector<double> nearly = {0.1, 0.1, 0.1}; // not exactly representable
    CHECK(check_token([&] { pearson(nearly, x); }) == "undefined_correlation");
}

TEST_CASE("pearson matches the textbook oracle on random series") {
    testutil::Rng rng(62);
    for (int i = 0; i < 100; ++i) {
        size_t n = 2 + rng.below(40);
        std::vector<double> x(n), y(n);
        for (size_t j = 0; j < n; ++j) {
            x[j] = (rng.uniform() - 0.5) * 1e6;
            y[j] = (rng.uniform() - 0.5) * 1e6;
        }
        double got = pearson(x, y);
        double expected = oracle::pearson(x, y);
        CHECK(std::abs(got - std::clamp(expected, -1.0, 1.0)) <= 1e-12);
    }
}

TEST_CASE("pearson is symmetric, affine-invariant and bounded") {
    testutil::Rng rng(63);
    for (int i = 0; i < 50; ++i) {
        size_t n = 3 + rng.below(30);
        std::vector<double> x(n), y(n);
        for (size_t j = 0; j < n; ++j) {
            x[j] = rng.uniform() * 100.0;
            y[j] = rng.uniform() * 100.0;
        }
        double r = pearson(x, y);
        CHECK(pearson(y, x) == r); // exact: the formula is computationally symmetric
        CHECK(r >= -1.0);
        CHECK(r <= 1.0);

        double a = (rng.uniform() - 0.5) * 10.0;
        if (a == 0.0) a = 1.0;
        double b = (rng.uniform() - 0.5) * 100.0;
        std::vector<double> ax(n);
        for (size_t j = 0; j < n; ++j) ax[j] = a * x[j] + b;
        double sign = a > 0 ? 1.0 : -1.0;
        CHECK(pearson(ax, y) == doctest::Approx(sign * r).epsilon(1e-12));
    }
}

TEST_CASE("near-collinear input stays inside [-1, 1]") {
    testutil::Rng rng(64);
    for (int i = 0; i < 200; ++i) {
        size_t n = 2 + rng.below(10);
        std::vector<double> x(n), y(n);
        for (size_t j = 0; j < n; ++j) {
            x[j] = rng.uniform() * 1e12;
            y[j] = 3.0 * x[j] + rng.uniform() * 1e-6;
        }
        double r = pearson(x, y);
        CHECK(r >= -1.0);
        CHECK(r <= 1.0);
    }
}

// --- correlate_all --------------------------------------------------------------

TEST_CASE("an affine metric series correlates perfectly with GDP") {
    std::vector<MetricsRow> rows;
    std::vector<std::pair<int, double>> gdp_points;
    for (int year = 1995; year <= 2004; ++year) {
        double g = 3.0e13 + (year - 1995) * 1.0e12;
        gdp_points.emplace_back(year, g);
        rows.push_back(row_for("S", year, 2.0 + (year - 1995) * 0.1)); // affine in gdp
    }
    auto gdp = GdpSeries::from_points(gdp_points);
    auto report = correlate_all(rows, gdp, YearRange{1995, 2004});
    auto& cell = report.rows.at("S").at("avg_degree");
    REQUIRE(cell.r.has_value());
    CHECK(*cell.r == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("correlate_all matches a by-hand formula recomputation") {
    testutil::Rng rng(65);
    std::vector<MetricsRow> rows;
    std::vector<std::pair<int, double>> gdp_points;
    std::vector<std::string> sectors = {"A", "B", "C"};
    for (int year = 1995; year <= 2004; ++year) {
        gdp_points.emplace_back(year, 3.0e13 * (1.0 + 0.03 * (year - 1995)) +
                                          rng.uniform() * 1e11);
        for (const auto& s : sectors) {
            MetricsRow r = row_for(s, year, 1.0 + rng.uniform() * 10.0);
            r.average_clustering = rng.uniform();
            r.density = rng.uniform();
            r.triangle_count = rng.below(5000);
            r.diameter = static_cast<int>(1 + rng.below(5));
            r.node_count = 50 + rng.below(100);
            rows.push_back(r);
        }
    }
    auto gdp = GdpSeries::from_points(gdp_points);
    YearRange range{1995, 2004};
    auto report = correlate_all(rows, gdp, range);

    for (const auto& s : sectors) {
        for (auto metric : kMetricNames) {
            std::vector<double> xs, ys;
            for (const auto& row : rows) {
                if (row.sector != s) continue;
                if (!range.contains(row.year)) continue;
                auto v = metric_value(row, metric);
                auto g = gdp.value(row.year);
                if (v && g) {
                    xs.push_back(*v);
                    ys.push_back(*g);
                }
            }
            // align year order
            const auto& cell = report.rows.at(s).at(std::string(metric));
            REQUIRE(cell.r.has_value());
            CHECK(std::abs(*cell.r - oracle::pearson(xs, ys)) <= 1e-12);
        }
    }
}

TEST_CASE("constant series produce marked undefined cells") {
    std::vector<MetricsRow> rows;
    std::vector<std::pair<int, double>> gdp_points;
    for (int year = 1995; year <= 1999; ++year) {
        gdp_points.emplace_back(year, 1e13 + year * 1e10);
        rows.push_back(row_for("S", year, 5.0)); // constant avg_degree
    }
    auto report = correlate_all(rows, GdpSeries::from_points(gdp_points), YearRange{1995, 1999});
    const auto& cell = report.rows.at("S").at("avg_degree");
    CHECK(!cell.r.has_value());
    CHECK(cell.note == "zero_variance");
}

TEST_CASE("insufficient overlap is marked, not omitted") {
    std::vector<MetricsRow> rows = {row_for("S", 1995, 1.0), row_for("S", 1996, 2.0)};
    auto gdp = GdpSeries::from_points({{2000, 1e13}, {2001, 1.1e13}});
    auto report = correlate_all(rows, gdp, YearRange{1995, 2001});
    const auto& cell = report.rows.at("S").at("avg_degree");
    CHECK(!cell.r.has_value());
    CHECK(cell.note == "insufficient_overlap");
}

// --- volume series ---------------------------------------------------------------

TEST_CASE("the two-year hand example") {
    std::vector<TradeRecord> records = {
        testutil::rec(1995, "A", "B", "0101", 60.0, 40.0),  // V(A,1995) = 100
        testutil::rec(1996, "A", "B", "0101", 100.0, 50.0), // V(A,1996) = 150
    };
    auto v = volume_series(records, YearRange{1995, 1996});
    CHECK(v.avg_change.at(1996) == 50.0);
    CHECK(v.avg_pct_change.at(1996) == 0.5);
    CHECK(v.zero_denominator_count.at(1996) == 0);
    CHECK(v.outliers.empty());
    CHECK(v.per_country_volume.at("A").at(1995) == 100.0);
}

TEST_CASE("zero-denominator countries are excluded and counted") {
    std::vector<TradeRecord> records = {
        testutil::rec(1995, "A", "X", "0101", 100.0, 0.0),
        testutil::rec(1996, "A", "X", "0101", 150.0, 0.0),
        testutil::rec(1995, "B", "X", "0101", 0.0, 0.0), // V(B,1995) = 0
        testutil::rec(1996, "B", "X", "0101", 10.0, 0.0),
    };
    auto v = volume_series(records, YearRange{1995, 1996});
    CHECK(v.zero_denominator_count.at(1996) == 1);
    CHECK(v.avg_pct_change.at(1996) == 0.5);                  // only A contributes
    CHECK(v.avg_change.at(1996) == doctest::Approx(30.0));    // (50 + 10) / 2
}

TEST_CASE("a spike is flagged and the two averages diverge") {
    std::vector<TradeRecord> records;
    // eleven countries moving < 5 percent, one jumping 50x
    for (int i = 0; i < 11; ++i) {
        std::string c = "C" + std::to_string(i);
        records.push_back(testutil::rec(1999, c, "X", "0101", 1000.0, 0.0));
        records.push_back(testutil::rec(2000, c, "X", "0101", 1000.0 + 10.0 * i, 0.0));
    }
    records.push_back(testutil::rec(1999, "TLS", "X", "0101", 100.0, 0.0));
    records.push_back(testutil::rec(2000, "TLS", "X", "0101", 5000.0, 0.0));

    auto v = volume_series(records, YearRange{1999, 2000});
    REQUIRE(v.outliers.size() == 1);
    CHECK(v.outliers[0].country == "TLS");
    CHECK(v.outliers[0].year == 2000);
    CHECK(v.outliers[0].pct_change == doctest::Approx(49.0));
    CHECK(v.avg_pct_change.at(2000) > 10.0 * v.avg_pct_change_excl_outliers.at(2000));
}

TEST_CASE("no flagged points means both averages agree exactly") {
    testutil::Rng rng(66);
    std::vector<TradeRecord> records;
    for (int i = 0; i < 20; ++i) {
        std::string c = "C" + std::to_string(i);
        double base = 1000.0 + static_cast<double>(rng.below(1000));
        records.push_back(testutil::rec(1995, c, "X", "0101", base, 0.0));
        records.push_back(testutil::rec(1996, c, "X", "0101", base * 1.02, 0.0));
    }
    auto v = volume_series(records, YearRange{1995, 1996});
    CHECK(v.outliers.empty());
    CHECK(v.avg_pct_change.at(1996) == v.avg_pct_change_excl_outliers.at(1996));
}

TEST_CASE("splitting a record leaves volumes unchanged") {
    testutil::Rng rng(67);
    std::vector<TradeRecord> records;
    for (int i = 0; i < 50; ++i) {
        records.push_back(testutil::rec(1995 + static_cast<int>(rng.below(2)),
                                        "C" + std::to_string(rng.below(8)), "X", "0101",
                                        rng.uniform() * 1e6, rng.uniform() * 1e6));
    }
    std::vector<TradeRecord> split;
    for (const auto& r : records) {
        double fe = rng.uniform();
        double fi = rng.uniform();
        split.push_back(testutil::rec(r.year, r.reporter, r.partner, r.product,
                                      r.export_value * fe, r.import_value * fi));
        split.push_back(testutil::rec(r.year, r.reporter, r.partner, r.product,
                                      r.export_value * (1.0 - fe), r.import_value * (1.0 - fi)));
    }
    auto a = volume_series(records, YearRange{1995, 1996});
    auto b = volume_series(split, YearRange{1995, 1996});
    for (const auto& [country, by_year] : a.per_country_volume) {
        for (const auto& [year, value] : by_year) {
            CHECK(b.per_country_volume.at(country).at(year) ==
                  doctest::Approx(value).epsilon(1e-9));
        }
    }
}

TEST_CASE("volume matches the oracle on a random fixture") {
    testutil::Rng rng(68);
    std::vector<TradeRecord> records;
    for (int i = 0; i < 400; ++i) {
        records.push_back(testutil::rec(1995 + static_cast<int>(rng.below(6)),
                                        "C" + std::to_string(rng.below(15)), "X", "0101",
                                        static_cast<double>(rng.below(1000000)),
                                        static_cast<double>(rng.below(1000000))));
    }
    YearRange range{1995, 2000};
    auto got = volume_series(records, range);
    auto expected = oracle::volume_series(records, range, 10.0);
    CHECK(got.zero_denominator_count == expected.zero_denominator_count);
    CHECK(got.outliers.size() == expected.outliers.size());
    for (int year = range.first + 1; year <= range.last; ++year) {
        if (expected.avg_change.contains(year)) {
            CHECK(got.avg_change.at(year) ==
                  doctest::Approx(expected.avg_change.at(year)).epsilon(1e-12));
        }
        if (expected.avg_pct_change.contains(year)) {
            CHECK(got.avg_pct_change.at(year) ==
                  doctest::Approx(expected.avg_pct_change.at(year)).epsilon(1e-12));
        }
    }
}

TEST_CASE("volume without consecutive data is an error") {
    std::vector<TradeRecord> records = {
        testutil::rec(1995, "A", "B", "0101", 1.0, 1.0),
        testutil::rec(1997, "A", "B", "0101", 1.0, 1.0),
    };
    CHECK(check_token([&] { volume_series(records, YearRange{1995, 1997}); }) ==
          "no_consecutive_data");
    CHECK(check_token([&] { volume_series(records, YearRange{1995, 1995}); }) ==
          "bad_year_range");
}
