#include "doctest.h"
#include "oracles.hpp"

#include "svar/boot.hpp"
#include "svar/error.hpp"
#include "svar/random.hpp"
#include "svar/report.hpp"

#include <sstream>

using namespace svar::boot;
using oracle::Mat;

namespace {

svar::ident::StructuralModel model(std::uint64_t seed, long K = 2, int p = 1, long T = 200) {
    std::mt19937_64 rng(seed);
    auto sys = oracle::random_system(rng, K, p);
    return svar::ident::identify(svar::var::estimate(oracle::simulate_data(sys, T, rng), {p, true}));
}

std::string csv(const BandSet& b, const svar::ident::StructuralModel& sm) {
    std::ostringstream os;
    std::vector<std::string> vars;
    for (int i = 0; i < sm.vars(); ++i) vars.push_back("v" + std::to_string(i));
    svar::report::write_bandset_csv(os, b, vars, sm.shock_names);
    return os.str();
}

double max_se(const BandSet& b) {
    double m = 0.0;
    for (const auto& s : b.se) m = std::max(m, oracle::max_abs(s));
    return m;
}

}  // namespace

TEST_SUITE("boot") {

TEST_CASE("bands examples") {
    svar::ident::IrfResult point{{Mat::Constant(1, 1, 1.0)}, {}};
    svar::ident::IrfResult d0{{Mat::Constant(1, 1, 0.0)}, {}};
    svar::ident::IrfResult d2{{Mat::Constant(1, 1, 2.0)}, {}};
    auto b = bands(point, {d0, d2}, {1});
    CHECK(b.se[0](0, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(b.lower[0][0](0, 0) == doctest::Approx(1.0 - std::sqrt(2.0)).epsilon(1e-15));
    CHECK(b.upper[0][0](0, 0) == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-15));

    auto same = bands(point, {point, point, point});
    CHECK(same.se[0](0, 0) == 0.0);
    CHECK(same.lower[1][0](0, 0) == 1.0);
    CHECK(same.upper[1][0](0, 0) == 1.0);

    try {
        bands(point, {point});
        FAIL("expected InvalidArgument");
    } catch (const svar::Error& e) {
        CHECK(e.code() == svar::ErrorCode::InvalidArgument);
    }
}

TEST_CASE("unit multipliers reproduce the point estimate") {
    auto sm = model(1);
    BootConfig cfg;
    cfg.replications = 20;
    cfg.seed = 4;
    cfg.horizon = 8;
    cfg.force_unit_multiplier = true;
    auto b = wild_bootstrap(sm, cfg);
    CHECK(b.replications == 20);
    CHECK(max_se(b) < 1e-12);
    CHECK(oracle::max_abs(b.upper[1][3] - b.point.theta[3]) < 1e-11);
}

TEST_CASE("same seed gives identical bytes; different seed differs") {
    auto sm = model(2, 3, 2, 250);
    for (auto method : {Method::wild, Method::mbb}) {
        BootConfig cfg;
        cfg.method = method;
        cfg.replications = 40;
        cfg.block_len = 10;
        cfg.seed = 77;
        cfg.cumulative_rows = {0};
        const auto a = csv(bootstrap(sm, cfg), sm);
        const auto b = csv(bootstrap(sm, cfg), sm);
        CHECK(a == b);
        cfg.threads = 4;
        CHECK(csv(bootstrap(sm, cfg), sm) == a);
        cfg.seed = 78;
        CHECK(csv(bootstrap(sm, cfg), sm) != a);
    }
}

TEST_CASE("bands nest and contain the point") {
    auto sm = model(3, 3, 2, 250);
    BootConfig cfg;
    cfg.replications = 50;
    cfg.seed = 5;
    auto b = bootstrap(sm, cfg);
    REQUIRE(b.k_list == std::vector<int>{1, 2});
    for (int h = 0; h <= cfg.horizon; ++h) {
        CHECK((b.lower[0][h].array() <= b.point.theta[h].array()).all());
        CHECK((b.point.theta[h].array() <= b.upper[0][h].array()).all());
        CHECK((b.lower[1][h].array() <= b.lower[0][h].array()).all());
        CHECK((b.upper[0][h].array() <= b.upper[1][h].array()).all());
    }
}

TEST_CASE("every replication is sign-normalized") {
    auto sm = model(4, 3, 2, 250);
    for (auto method : {Method::wild, Method::mbb}) {
        BootConfig cfg;
        cfg.method = method;
        cfg.block_len = 12;
        cfg.replications = 60;
        cfg.seed = 9;
        auto reps = replicate(sm, cfg);
        REQUIRE(reps.draws.size() == 60);
        for (const auto& d : reps.draws) {
            CHECK((d.theta[0].row(sm.price_row).array() >= 0.0).all());
            CHECK(d.theta[0](0, 1) == 0.0);
            CHECK(d.theta[0](0, 2) == 0.0);
            CHECK(d.theta[0](1, 2) == 0.0);
        }
    }
}

TEST_CASE("wild residuals keep per-row outer products") {
    auto sm = model(5, 3, 1);
    auto rng = svar::make_stream(1, 0);
    const Mat& u = sm.rf.residuals;
    Mat w = wild_residuals(u, rng);
    int flipped = 0;
    for (long t = 0; t < u.rows(); ++t) {
        CHECK(w.row(t).transpose() * w.row(t) == u.row(t).transpose() * u.row(t));
        if (w(t, 0) != u(t, 0)) ++flipped;
    }
    CHECK(flipped > 0);
    CHECK(flipped < u.rows());
}

TEST_CASE("mbb kernels") {
    Mat u(6, 1);
    u << 1, 2, 3, 4, 5, 6;
    // Blocks of 2 start at 0..4; offset 0 averages rows 0..4, offset 1 rows 1..5.
    Mat c = block_centering(u, 2);
    CHECK(c(0, 0) == 3.0);
    CHECK(c(1, 0) == 4.0);

    auto rng = svar::make_stream(3, 0);
    Mat r = mbb_residuals(u, 4, rng, false);
    REQUIRE(r.rows() == 6);
    // Blocks are consecutive runs of the original rows.
    for (long t = 1; t < 4; ++t) CHECK(r(t, 0) == r(t - 1, 0) + 1);
    for (long t = 5; t < 6; ++t) CHECK(r(t, 0) == r(t - 1, 0) + 1);

    Mat whole = mbb_residuals(u, 6, rng, false);
    CHECK(whole == u);
    Mat centered = mbb_residuals(u, 6, rng, true);
    CHECK(oracle::max_abs(centered) == 0.0);

    try {
        mbb_residuals(u, 7, rng);
        FAIL("expected BlockTooLong");
    } catch (const svar::Error& e) {
        CHECK(e.code() == svar::ErrorCode::BlockTooLong);
    }
}

TEST_CASE("single admissible block reproduces the point estimate") {
    auto sm = model(6, 2, 2, 150);
    BootConfig cfg;
    cfg.method = Method::mbb;
    cfg.block_len = sm.rf.effective_size();
    cfg.mbb_recenter = false;
    cfg.replications = 10;
    cfg.seed = 1;
    auto b = mbb_bootstrap(sm, cfg);
    CHECK(max_se(b) < 1e-10);

    cfg.block_len = sm.rf.effective_size() + 1;
    try {
        mbb_bootstrap(sm, cfg);
        FAIL("expected BlockTooLong");
    } catch (const svar::Error& e) {
        CHECK(e.code() == svar::ErrorCode::BlockTooLong);
    }
}

TEST_CASE("method checks") {
    auto sm = model(7);
    BootConfig cfg;
    cfg.replications = 5;
    cfg.method = Method::mbb;
    CHECK_THROWS_AS(wild_bootstrap(sm, cfg), svar::Error);
    cfg.method = Method::wild;
    CHECK_THROWS_AS(mbb_bootstrap(sm, cfg), svar::Error);
    cfg.replications = 1;
    CHECK_THROWS_AS(bootstrap(sm, cfg), svar::Error);
    CHECK(parse_method("mbb") == Method::mbb);
    CHECK_THROWS_AS(parse_method("pairs"), svar::Error);
}

// Under iid errors both schemes are claimed to agree at impact. They do not: with
// Rademacher multipliers every u*_t u*_t' equals u_t u_t', so the bootstrap covariance
// barely moves and impact se collapses to the slope-estimation noise. The check is kept
// as written and marked as an expected failure; the next case shows which side is right.
namespace {

oracle::RandomSystem iid_system() {
    oracle::RandomSystem sys;
    sys.A = {(Mat(2, 2) << 0.5, 0.1, 0.2, 0.4).finished()};
    sys.b0inv = (Mat(2, 2) << 1.0, 0.0, 0.5, 1.0).finished();
    sys.alpha = oracle::Vec::Zero(2);
    return sys;
}

BandSet impact_bands(const svar::ident::StructuralModel& sm, Method method) {
    BootConfig cfg;
    cfg.method = method;
    cfg.block_len = 1;
    cfg.replications = 500;
    cfg.seed = 12;
    cfg.horizon = 0;
    return bootstrap(sm, cfg);
}

}  // namespace

TEST_CASE("unit-block mbb and wild impact se agree under iid errors" * doctest::should_fail()) {
    std::mt19937_64 rng(8);
    auto sm = svar::ident::identify(svar::var::estimate(oracle::simulate_data(iid_system(), 500, rng), {1, true}));
    auto wild = impact_bands(sm, Method::wild);
    auto mbb = impact_bands(sm, Method::mbb);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j <= i; ++j) {
            const double a = wild.se[0](i, j), b = mbb.se[0](i, j);
            MESSAGE("h=0 (" << i << "," << j << ") wild se " << a << ", mbb se " << b);
            CHECK(std::fabs(a - b) <= 0.25 * std::max(a, b));
        }
}

TEST_CASE("unit-block mbb impact se matches the Monte Carlo sampling spread") {
    const auto sys = iid_system();
    std::mt19937_64 rng(8);
    auto sm = svar::ident::identify(svar::var::estimate(oracle::simulate_data(sys, 500, rng), {1, true}));
    auto mbb = impact_bands(sm, Method::mbb);

    const int trials = 400;
    Mat sum = Mat::Zero(2, 2), sum2 = Mat::Zero(2, 2);
    std::mt19937_64 mc(99);
    for (int t = 0; t < trials; ++t) {
        auto fit = svar::ident::identify(svar::var::estimate(oracle::simulate_data(sys, 500, mc), {1, true}));
        sum += fit.b0inv;
        sum2 += fit.b0inv.cwiseAbs2();
    }
    const Mat mean = sum / trials;
    const Mat sd = ((sum2 / trials - mean.cwiseAbs2()) * trials / (trials - 1.0)).cwiseSqrt();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j <= i; ++j) {
            MESSAGE("h=0 (" << i << "," << j << ") mbb se " << mbb.se[0](i, j) << ", sampling sd " << sd(i, j));
            CHECK(std::fabs(mbb.se[0](i, j) - sd(i, j)) <= 0.25 * sd(i, j));
        }
}

}  // TEST_SUITE
