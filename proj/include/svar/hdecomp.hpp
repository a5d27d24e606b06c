#pragma once

#include "svar/ident.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace svar::hdecomp {

/// Additive attribution of each variable over the residual sample:
///   observed(t, i) = baseline(t, i) + sum_j contributions[j](t, i).
struct HistoricalDecomposition {
    std::vector<Eigen::MatrixXd> contributions;  // one (T - p) x K matrix per shock
    Eigen::MatrixXd baseline;                    // (T - p) x K
    Eigen::MatrixXd observed;                    // (T - p) x K
    ts::YearMonth start;
    std::vector<std::string> var_names;
    std::vector<std::string> shock_names;

    ts::MonthRange range() const { return {start, start + (static_cast<int>(baseline.rows()) - 1)}; }
    ts::MonthlySeries contribution(int variable, int shock) const;
    ts::MonthlySeries baseline_series(int variable) const;

    /// Largest |observed - baseline - sum of contributions| over all cells.
    double max_reconstruction_error() const;
};

/// Convolution of the (non-cumulated) structural IRFs with the shock history, truncated at
/// the sample start. Throws UnstableModel for a non-stationary reduced form.
HistoricalDecomposition decompose(const ident::StructuralModel& sm, const ident::ShockSeries& shocks);

}  // namespace svar::hdecomp
