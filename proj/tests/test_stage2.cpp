#include "doctest.h"
#include "oracles.hpp"

#include "svar/error.hpp"
#include "svar/ident.hpp"
#include "svar/stage2.hpp"
#include "svar/ts.hpp"

using namespace svar::stage2;
using oracle::Mat;

namespace {

std::vector<double> normals(std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<double> v(n);
    for (auto& x : v) x = nd(rng);
    return v;
}

}  // namespace

TEST_SUITE("stage2") {

TEST_CASE("lag design layout") {
    std::vector<double> z{10, 11, 12, 13, 14, 15, 16}, s{0, 1, 2, 3, 4, 5, 6};
    auto d = lag_design(z, s, 2);
    REQUIRE(d.X.rows() == 5);
    REQUIRE(d.X.cols() == 4);
    CHECK(d.first_row == 2);
    CHECK(d.z(0) == 12);
    CHECK(d.X.row(0) == (Eigen::RowVectorXd(4) << 1, 2, 1, 0).finished());
    CHECK(d.X.row(4) == (Eigen::RowVectorXd(4) << 1, 6, 5, 4).finished());
    CHECK_THROWS_AS(lag_design(std::span(z).first(4), std::span(s).first(4), 2), svar::Error);
}

TEST_CASE("identity and shifted recoveries") {
    auto s = normals(1, 200);
    Stage2Spec spec;
    spec.lags = 2;
    auto fit = fit_distributed_lag(s, s, spec);
    CHECK(std::fabs(fit.coefficients(0) - 1.0) < 1e-10);
    CHECK(std::fabs(fit.coefficients(1)) < 1e-10);
    CHECK(std::fabs(fit.coefficients(2)) < 1e-10);
    CHECK(std::fabs(fit.intercept) < 1e-10);

    std::vector<double> z(s.size());
    z[0] = 3.0;
    for (std::size_t t = 1; t < s.size(); ++t) z[t] = 2.0 * s[t - 1] + 3.0;
    auto shifted = fit_distributed_lag(z, s, spec);
    CHECK(std::fabs(shifted.coefficients(0)) < 1e-10);
    CHECK(std::fabs(shifted.coefficients(1) - 2.0) < 1e-10);
    CHECK(std::fabs(shifted.coefficients(2)) < 1e-10);
    CHECK(std::fabs(shifted.intercept - 3.0) < 1e-10);

    spec.lags = 0;
    auto self = fit_distributed_lag(s, s, spec);
    CHECK(std::fabs(self.coefficients(0) - 1.0) < 1e-10);
    CHECK(std::fabs(self.intercept) < 1e-10);
}

TEST_CASE("independent white noise against the normal-equations oracle") {
    auto z = normals(2, 5000), s = normals(3, 5000);
    Stage2Spec spec;
    auto fit = fit_distributed_lag(z, s, spec);
    CHECK(fit.coefficients.cwiseAbs().maxCoeff() < 0.05);
    auto d = lag_design(z, s, spec.lags);
    Mat b = oracle::normal_equations(d.X, d.z);
    CHECK(std::fabs(fit.intercept - b(0, 0)) < 1e-8);
    for (int i = 0; i <= spec.lags; ++i) CHECK(std::fabs(fit.coefficients(i) - b(i + 1, 0)) < 1e-8);
    // Residuals orthogonal to the regressors.
    CHECK(oracle::max_abs(d.X.transpose() * fit.residuals) < 1e-8 * d.X.rows());
}

TEST_CASE("cumulative responses") {
    auto z = normals(4, 300), s = normals(5, 300);
    Stage2Spec spec;
    spec.lags = 4;
    spec.cumulative = true;
    auto fit = fit_distributed_lag(z, s, spec);
    CHECK(fit.cumulative);
    CHECK(fit.responses(0) == fit.coefficients(0));
    double acc = 0.0;
    for (int h = 0; h <= 4; ++h) {
        acc += fit.coefficients(h);
        CHECK(std::fabs(fit.responses(h) - acc) < 1e-15);
    }
}

TEST_CASE("errors") {
    auto s = normals(6, 14);
    Stage2Spec spec;
    CHECK_THROWS_AS(fit_distributed_lag(s, s, spec), svar::Error);
    try {
        fit_distributed_lag(s, s, spec);
    } catch (const svar::Error& e) {
        CHECK(e.code() == svar::ErrorCode::TooFewObservations);
    }
    std::vector<double> flat(100, 1.0);
    try {
        fit_distributed_lag(flat, flat, spec);
        FAIL("expected SingularDesign");
    } catch (const svar::Error& e) {
        CHECK(e.code() == svar::ErrorCode::SingularDesign);
    }
    auto z = normals(7, 100), x = normals(8, 100);
    spec.block_len = 200;
    try {
        estimate(z, x, spec);
        FAIL("expected BlockTooLong");
    } catch (const svar::Error& e) {
        CHECK(e.code() == svar::ErrorCode::BlockTooLong);
    }
}

TEST_CASE("block bootstrap determinism, nesting, and degenerate cases") {
    auto z = normals(9, 240), s = normals(10, 240);
    Stage2Spec spec;
    spec.replications = 100;
    spec.seed = 3;
    auto a = estimate(z, s, spec);
    auto b = estimate(z, s, spec);
    CHECK(a.bands.se == b.bands.se);
    CHECK(a.bands.lower[1] == b.bands.lower[1]);
    spec.threads = 3;
    CHECK(estimate(z, s, spec).bands.se == a.bands.se);
    for (int h = 0; h <= spec.lags; ++h) {
        CHECK(a.bands.lower[1](h) <= a.bands.lower[0](h));
        CHECK(a.bands.upper[0](h) <= a.bands.upper[1](h));
    }

    Stage2Spec whole = spec;
    whole.block_len = static_cast<int>(z.size()) - spec.lags;
    CHECK(estimate(z, s, whole).bands.se.cwiseAbs().maxCoeff() == 0.0);

    std::vector<double> lagged(s.size(), 0.0);
    for (std::size_t t = 1; t < s.size(); ++t) lagged[t] = s[t - 1];
    auto det = estimate(lagged, s, spec);
    CHECK(std::fabs(det.coefficients(1) - 1.0) < 1e-10);
    CHECK(det.bands.se.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("block bootstrap se tracks classical se under iid rows") {
    const std::size_t n = 1000;
    auto s = normals(11, n), e = normals(12, n);
    std::vector<double> z(n);
    for (std::size_t t = 0; t < n; ++t) z[t] = 0.5 + 0.8 * s[t] + e[t];
    Stage2Spec spec;
    spec.replications = 500;
    spec.seed = 13;
    auto fit = estimate(z, s, spec);
    auto d = lag_design(z, s, spec.lags);
    const double dof = static_cast<double>(d.X.rows() - d.X.cols());
    const double s2 = fit.residuals.squaredNorm() / dof;
    const Mat xtx_inv = (d.X.transpose() * d.X).inverse();
    const double classical = std::sqrt(s2 * xtx_inv(1, 1));
    MESSAGE("phi_0 block se " << fit.bands.se(0) << ", classical se " << classical);
    CHECK(std::fabs(fit.bands.se(0) - classical) <= 0.25 * classical);
}

TEST_CASE("shocks_to_quarterly") {
    svar::ident::ShockSeries flat{Mat::Constant(9, 2, 0.75), {2001, 1}, {"a", "b"}};
    auto q = shocks_to_quarterly(flat);
    REQUIRE(q.size() == 2);
    CHECK(q[0].size() == 3);
    CHECK(q[1][2] == 0.75);
    CHECK(q[0].id() == "a");

    svar::ident::ShockSeries two{(Mat(6, 1) << 1, 2, 3, 4, 5, 6).finished(), {2001, 1}, {"x"}};
    auto tq = shocks_to_quarterly(two);
    CHECK(tq[0][0] == 2.0);
    CHECK(tq[0][1] == 5.0);
}

TEST_CASE("fixture shocks re-averaged independently") {
    svar::ts::Panel panel(
        {svar::ts::load_monthly_csv(oracle::fixture("original/production_growth.csv"), "production"),
         svar::ts::load_monthly_csv(oracle::fixture("original/activity.csv"), "activity"),
         svar::ts::load_monthly_csv(oracle::fixture("original/real_price.csv"), "real_price")});
    auto e = svar::ident::structural_shocks(svar::ident::identify(svar::var::estimate(panel, {24, true})));
    auto q = shocks_to_quarterly(e);
    // Residuals start 1975-02: the first complete quarter is 1975-Q2.
    REQUIRE(q[0].start() == svar::ts::YearQuarter{1975, 2});
    for (std::size_t j = 0; j < 3; ++j) {
        for (std::size_t k = 0; k < q[j].size(); ++k) {
            const long row = 2 + 3 * static_cast<long>(k);
            const double sheet = (e.values(row, j) + e.values(row + 1, j) + e.values(row + 2, j)) / 3.0;
            CHECK(std::fabs(q[j][k] - sheet) < 1e-12);
        }
    }
}

TEST_CASE("alignment of targets and shocks") {
    svar::ts::MonthlySeries z("z", {2000, 3}, std::vector<double>(20, 1.0));
    svar::ts::MonthlySeries s("s", {2000, 1}, std::vector<double>(15, 2.0));
    auto a = align(z, s);
    CHECK(a.first == "2000-03");
    CHECK(a.last == "2001-03");
    CHECK(a.z.size() == 13);
    CHECK(a.shock.size() == 13);

    svar::ts::QuarterlySeries qz("z", {1990, 1}, std::vector<double>(8, 1.0));
    svar::ts::QuarterlySeries qs("s", {1990, 3}, std::vector<double>(10, 1.0));
    auto qa = align(qz, qs);
    CHECK(qa.first == "1990-Q3");
    CHECK(qa.last == "1991-Q4");
}

}  // TEST_SUITE
