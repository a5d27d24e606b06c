#pragma once

#include "svar/ident.hpp"
#include "svar/ts.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace svar::stage2 {

struct Stage2Spec {
    int lags = 12;
    int block_len = 6;
    int replications = 1000;
    std::uint64_t seed = 0;
    bool cumulative = false;
    int threads = 1;
    std::vector<int> k_list = {1, 2};
};

/// Regression rows for z_t = w + sum_{i=0..L} phi_i * shock_{t-i} + u_t, t = L..n-1.
struct LagDesign {
    Eigen::VectorXd z;  // N
    Eigen::MatrixXd X;  // N x (L + 2): constant, shock_t, ..., shock_{t-L}
    int lags = 0;
    int first_row = 0;  // index of the first regression row in the aligned input
};

LagDesign lag_design(std::span<const double> z, std::span<const double> shock, int lags);

struct Stage2Bands {
    Eigen::VectorXd se;
    std::vector<int> k_list;
    std::vector<Eigen::VectorXd> lower;  // per k
    std::vector<Eigen::VectorXd> upper;
    int replications = 0;
    int failures = 0;
};

struct Stage2Fit {
    std::string shock;
    Eigen::VectorXd coefficients;  // phi_0 .. phi_L
    double intercept = 0.0;
    Eigen::VectorXd residuals;
    bool cumulative = false;
    /// Reported responses: running sums of the coefficients when cumulative, else the
    /// coefficients themselves.
    Eigen::VectorXd responses;
    Stage2Bands bands;
};

Stage2Fit fit_distributed_lag(std::span<const double> z, std::span<const double> shock, const Stage2Spec& spec,
                              std::string shock_label = {});
Stage2Fit fit_distributed_lag(const LagDesign& design, const Stage2Spec& spec, std::string shock_label = {});

/// Moving-block resampling of regression rows (each z_t keeps its own lags), refit per
/// replication, bands around the point responses.
Stage2Bands block_bootstrap_bands(const LagDesign& design, const Stage2Fit& fit, const Stage2Spec& spec);

/// Fit plus bands in one call.
Stage2Fit estimate(std::span<const double> z, std::span<const double> shock, const Stage2Spec& spec,
                   std::string shock_label = {});

/// Quarterly averages of every shock column.
std::vector<ts::QuarterlySeries> shocks_to_quarterly(const ident::ShockSeries& shocks);

/// Common-period slices of a dependent series and a shock series.
struct Aligned {
    std::vector<double> z;
    std::vector<double> shock;
    std::string first;  // label of the first aligned period
    std::string last;
};

Aligned align(const ts::MonthlySeries& z, const ts::MonthlySeries& shock);
Aligned align(const ts::QuarterlySeries& z, const ts::QuarterlySeries& shock);

}  // namespace svar::stage2
