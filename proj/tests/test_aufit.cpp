#include <doctest.h>

#include <cmath>

#include "semvox/cluster.hpp"
#include "semvox/error.hpp"
#include "semvox/mathstat.hpp"
#include "semvox/rng.hpp"

using namespace semvox;
using namespace semvox::cluster;

namespace {

const std::vector<double> kScales = {0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4};

// Noiseless forward model: BP_r = 1 - Phi(v sqrt(r) + c / sqrt(r)).
BpTable forward_table(double v, double c, double replicates = 1e9) {
    BpTable t;
    t.node_id = 0;
    for (double r : kScales) {
        double z = v * std::sqrt(r) + c / std::sqrt(r);
        double bp = 1.0 - norm_cdf(z);
        t.entries.push_back({r, replicates, bp * replicates});
    }
    return t;
}

} // namespace

TEST_CASE("fit_au on the symmetric null: BP one half everywhere") {
    BpTable t;
    t.node_id = 3;
    for (double r : kScales) t.entries.push_back({r, 10000, 5000});
    auto s = fit_au(t);
    CHECK(s.fit_ok);
    CHECK(s.v == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s.c == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s.au == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.bp_at_1 == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("fit_au recovers a noiseless forward model") {
    auto s = fit_au(forward_table(1.0, 0.3));
    CHECK(s.fit_ok);
    CHECK(s.v == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(s.c == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(s.au == doctest::Approx(1.0 - norm_cdf(0.7)).epsilon(1e-9));
    // Frozen value of 1 - Phi(0.7).
    CHECK(s.au == doctest::Approx(0.24196365222307303).epsilon(1e-10));
}

TEST_CASE("fit_au recovery over a randomized (v, c) grid") {
    RngStream rng(2024);
    for (int i = 0; i < 200; ++i) {
        double v = -3.0 + 6.0 * rng.uniform01();
        double c = 2.0 * rng.uniform01();
        auto s = fit_au(forward_table(v, c));
        CHECK(std::abs(s.v - v) < 1e-6);
        CHECK(std::abs(s.c - c) < 1e-6);
        CHECK(std::abs(s.au - (1.0 - norm_cdf(v - c))) < 1e-6);
    }
}

TEST_CASE("au decreases in v for fixed c") {
    double prev = 2.0;
    for (double v = -2.0; v <= 2.0; v += 0.25) {
        auto s = fit_au(forward_table(v, 0.5));
        CHECK(s.au < prev);
        prev = s.au;
    }
}

TEST_CASE("fit_au invariant: au equals 1 - Phi(v - c) when the fit ran") {
    RngStream rng(5);
    for (int i = 0; i < 50; ++i) {
        BpTable t;
        t.node_id = 1;
        for (double r : kScales) {
            double hits = 1.0 + std::floor(rng.uniform01() * 999.0);
            t.entries.push_back({r, 1000, hits});
        }
        auto s = fit_au(t);
        if (s.fit_ok) {
            CHECK(s.au == doctest::Approx(1.0 - norm_cdf(s.v - s.c)).epsilon(1e-12));
            CHECK(std::isfinite(s.se_au));
        }
    }
}

TEST_CASE("degenerate tables fall back to the clamped BP nearest scale 1") {
    BpTable t;
    t.node_id = 9;
    // Hits saturate everywhere: no usable scale for the fit.
    for (double r : kScales) t.entries.push_back({r, 1000, 1000});
    auto s = fit_au(t);
    CHECK(!s.fit_ok);
    CHECK(s.au == doctest::Approx(1.0 - 1.0 / 2000.0));
    CHECK(s.se_au ==
          doctest::Approx(std::sqrt((1.0 - 5e-4) * 5e-4 / 1000.0)).epsilon(1e-12));

    BpTable zero;
    zero.node_id = 9;
    for (double r : kScales) zero.entries.push_back({r, 1000, 0});
    auto s0 = fit_au(zero);
    CHECK(!s0.fit_ok);
    CHECK(s0.au == doctest::Approx(1.0 / 2000.0));
}

TEST_CASE("root-style tables give au = 1 within clamping limits") {
    BpTable t;
    t.node_id = 10;
    for (double r : kScales) t.entries.push_back({r, 10000, 10000});
    auto s = fit_au(t);
    CHECK(s.au >= 1.0 - 1.0 / (2.0 * 10000.0) - 1e-12);
}

TEST_CASE("fit_au errors on an empty table") {
    CHECK_THROWS_AS(fit_au(BpTable{0, {}}), ValidationError);
}

TEST_CASE("single-scale table uses the binomial delta method") {
    BpTable t;
    t.node_id = 2;
    t.entries.push_back({1.0, 400, 300});
    auto s = fit_au(t);
    CHECK(!s.fit_ok);
    CHECK(s.au == doctest::Approx(0.75));
    CHECK(s.se_au == doctest::Approx(std::sqrt(0.75 * 0.25 / 400.0)).epsilon(1e-12));
}
