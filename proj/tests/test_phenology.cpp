#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "leafspec/phenology.hpp"

using namespace leafspec;
using Catch::Approx;

namespace {

TemperatureRecord mean_rec(const std::string& date, double t) {
    TemperatureRecord r;
    r.date = date;
    r.has_mean = true;
    r.t_mean = t;
    return r;
}

TemperatureRecord minmax_rec(const std::string& date, double lo, double hi) {
    TemperatureRecord r;
    r.date = date;
    r.has_min_max = true;
    r.t_min = lo;
    r.t_max = hi;
    return r;
}

}  // namespace

TEST_CASE("daily mean prefers t_mean, falls back to (min+max)/2") {
    CHECK(mean_rec("2024-05-01", 17.0).daily_mean() == 17.0);
    CHECK(minmax_rec("2024-05-01", 10.0, 20.0).daily_mean() == 15.0);
    TemperatureRecord empty;
    empty.date = "2024-05-01";
    CHECK_THROWS_AS(empty.daily_mean(), Error);
}

TEST_CASE("gdd hand fixtures") {
    GddConfig cfg;  // base 10, clamp on

    // All days at base temperature accumulate nothing.
    std::vector<TemperatureRecord> at_base{mean_rec("2024-05-01", 10), mean_rec("2024-05-02", 10)};
    CHECK(compute_gdd(at_base, cfg) == 0.0);

    // Means 15, 20, 12 over base 10: 5 + 10 + 2.
    std::vector<TemperatureRecord> three{mean_rec("2024-05-01", 15), mean_rec("2024-05-02", 20),
                                         mean_rec("2024-05-03", 12)};
    CHECK(compute_gdd(three, cfg) == Approx(17.0).margin(1e-12));

    // Means 8, 15: clamped = 0 + 5; unclamped = -2 + 5.
    std::vector<TemperatureRecord> cold{mean_rec("2024-05-01", 8), mean_rec("2024-05-02", 15)};
    CHECK(compute_gdd(cold, cfg) == Approx(5.0).margin(1e-12));
    GddConfig raw;
    raw.clamp_negative = false;
    CHECK(compute_gdd(cold, raw) == Approx(3.0).margin(1e-12));

    CHECK(compute_gdd({}, cfg) == 0.0);
}

TEST_CASE("gdd mixes mean and min/max records") {
    GddConfig cfg;
    std::vector<TemperatureRecord> recs{mean_rec("2024-05-01", 14),
                                        minmax_rec("2024-05-02", 10, 26)};
    CHECK(compute_gdd(recs, cfg) == Approx(4.0 + 8.0).margin(1e-12));
}

TEST_CASE("gdd rejects unordered, duplicated, or inconsistent records") {
    GddConfig cfg;
    std::vector<TemperatureRecord> unordered{mean_rec("2024-05-02", 15), mean_rec("2024-05-01", 15)};
    CHECK_THROWS_AS(compute_gdd(unordered, cfg), Error);
    std::vector<TemperatureRecord> dup{mean_rec("2024-05-01", 15), mean_rec("2024-05-01", 15)};
    CHECK_THROWS_AS(compute_gdd(dup, cfg), Error);
    std::vector<TemperatureRecord> swapped{minmax_rec("2024-05-01", 26, 10)};
    CHECK_THROWS_AS(compute_gdd(swapped, cfg), Error);
}

TEST_CASE("gdd is additive over date-range concatenation") {
    GddConfig cfg;
    Rng rng(12);
    std::vector<TemperatureRecord> all;
    for (int d = 1; d <= 28; ++d) {
        char date[16];
        std::snprintf(date, sizeof date, "2024-06-%02d", d);
        all.push_back(mean_rec(date, 12.0 + 6.0 * rng.uniform01()));
    }
    const std::vector<TemperatureRecord> head(all.begin(), all.begin() + 13);
    const std::vector<TemperatureRecord> tail(all.begin() + 13, all.end());
    CHECK(compute_gdd(all, cfg) ==
          Approx(compute_gdd(head, cfg) + compute_gdd(tail, cfg)).margin(1e-9));
}

TEST_CASE("clamped gdd is monotone in temperatures and record count") {
    GddConfig cfg;
    std::vector<TemperatureRecord> recs{mean_rec("2024-05-01", 9), mean_rec("2024-05-02", 14)};
    const double base = compute_gdd(recs, cfg);
    auto warmer = recs;
    warmer[0].t_mean += 3.0;  // 9 -> 12 crosses the base
    CHECK(compute_gdd(warmer, cfg) >= base);
    auto longer = recs;
    longer.push_back(mean_rec("2024-05-03", 7));  // below base: adds nothing, never subtracts
    CHECK(compute_gdd(longer, cfg) >= base);
    CHECK(compute_gdd(longer, cfg) == base);
}

TEST_CASE("stage table mapping and monotonicity") {
    const StageTable table = StageTable::standard();
    CHECK(stage_of(0, table) == "pre-vegetative");
    CHECK(stage_of(584.9, table) == "pre-vegetative");
    CHECK(stage_of(585, table) == "vegetative");
    CHECK(stage_of(897, table) == "flowering");
    CHECK(stage_of(1216, table) == "fruit development");
    CHECK(stage_of(1568, table) == "ripening");
    CHECK(stage_of(1600, table) == "ripening");
    CHECK_THROWS_AS(stage_of(-1, table), Error);

    // Monotone: stage index never decreases along increasing GDD.
    auto index_of = [&](const std::string& name) {
        if (name == "pre-vegetative") return -1;
        for (std::size_t i = 0; i < table.stages.size(); ++i)
            if (table.stages[i].first == name) return static_cast<int>(i);
        return -2;
    };
    int prev = -1;
    for (double g = 0; g <= 2000; g += 7.3) {
        const int idx = index_of(stage_of(g, table));
        CHECK(idx >= prev);
        prev = idx;
    }
}

TEST_CASE("stage table validation") {
    StageTable empty;
    CHECK_THROWS_AS(empty.validate(), Error);
    StageTable bad{{{"a", 100.0}, {"b", 100.0}}};
    CHECK_THROWS_AS(stage_of(50, bad), Error);
}
