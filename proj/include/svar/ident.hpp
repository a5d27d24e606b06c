#pragma once

#include "svar/ts.hpp"
#include "svar/var.hpp"

#include <Eigen/Dense>

#include <set>
#include <string>
#include <vector>

namespace svar::ident {

/// Default labels for the recursive oil-market ordering.
inline const std::vector<std::string> kOilShockNames = {"oil_supply", "aggregate_demand", "oil_specific_demand"};

/// Recursively identified SVAR: u_t = b0inv * e_t with b0inv lower triangular.
struct StructuralModel {
    var::ReducedForm rf;
    Eigen::MatrixXd b0inv;           // K x K, exact zeros above the diagonal
    std::vector<std::string> shock_names;
    std::vector<int> sign_flips;     // +1 / -1 per column
    int price_row = 0;

    int vars() const { return rf.vars(); }
};

/// Structural shocks, (T - p) x K, labelled by shock name.
struct ShockSeries {
    Eigen::MatrixXd values;
    ts::YearMonth start;
    std::vector<std::string> names;

    ts::Panel to_panel() const;
};

/// theta[h](i, j): response of variable i at horizon h to shock j.
struct IrfResult {
    std::vector<Eigen::MatrixXd> theta;
    std::set<int> cumulative_rows;

    int horizon() const { return static_cast<int>(theta.size()) - 1; }
};

/// Lower Cholesky factor with a strictly positive diagonal and exact upper zeros.
/// Throws NotPositiveDefinite unless min eigenvalue > 1e-12 * max eigenvalue.
Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& sigma);

/// Flip columns of `P` so every shock moves the `price_row` variable up on impact.
StructuralModel normalize(const Eigen::MatrixXd& P, const var::ReducedForm& rf, int price_row,
                          std::vector<std::string> shock_names = {});

/// cholesky_lower followed by normalize. price_row < 0 means the last variable.
StructuralModel identify(const var::ReducedForm& rf, int price_row = -1, std::vector<std::string> shock_names = {});

ShockSeries structural_shocks(const StructuralModel& sm);

/// Theta_h = Phi_h * b0inv; rows listed in `cumulative_rows` are replaced by running sums.
IrfResult structural_irf(const StructuralModel& sm, int horizon, const std::set<int>& cumulative_rows = {});
IrfResult structural_irf(const std::vector<Eigen::MatrixXd>& A, const Eigen::MatrixXd& b0inv, int horizon,
                         const std::set<int>& cumulative_rows = {});

}  // namespace svar::ident
