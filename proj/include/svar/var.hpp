#pragma once

#include "svar/ts.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace svar::var {

struct VarSpec {
    int lags = 24;
    bool intercept = true;
};

/**
 * Least-squares reduced-form VAR
 *
 *   y_t = alpha + A_1 y_{t-1} + ... + A_p y_{t-p} + u_t.
 *
 * `data` is the estimation sample (T x K); `residuals` cover rows p..T-1. The residual
 * covariance uses divisor T - p, so the Cholesky-standardized shocks have a sample
 * covariance of exactly the identity.
 */
struct ReducedForm {
    VarSpec spec;
    Eigen::VectorXd alpha;          // zero when spec.intercept is false
    std::vector<Eigen::MatrixXd> A; // A[0] = A_1, ..., A[p-1] = A_p
    Eigen::MatrixXd residuals;      // (T - p) x K
    Eigen::MatrixXd sigma;          // K x K
    Eigen::MatrixXd data;           // T x K
    ts::YearMonth start;            // month of data row 0
    std::vector<std::string> var_names;

    int vars() const { return static_cast<int>(sigma.rows()); }
    int lags() const { return spec.lags; }
    int sample_size() const { return static_cast<int>(data.rows()); }
    int effective_size() const { return static_cast<int>(residuals.rows()); }

    /// Months covered by the residuals (t = p+1 .. T).
    ts::MonthRange residual_range() const;
    ts::MonthRange sample_range() const;

    /// Fitted values for rows p..T-1.
    Eigen::MatrixXd fitted() const;
};

/// Regressor matrix with rows [1, y_{t-1}', ..., y_{t-p}'] for t = p..T-1 (constant omitted
/// when the spec has no intercept).
Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& y, const VarSpec& spec);

/// Reciprocal condition number of X'X after scaling every column of X to unit norm.
double cross_product_rcond(const Eigen::MatrixXd& X);

inline constexpr double kSingularRcond = 1e-12;

ReducedForm estimate(const ts::Panel& panel, const VarSpec& spec);
ReducedForm estimate(const Eigen::MatrixXd& y, const VarSpec& spec, std::vector<std::string> names = {},
                     ts::YearMonth start = {});

/// (Kp) x (Kp) companion matrix.
Eigen::MatrixXd companion(const std::vector<Eigen::MatrixXd>& A);
inline Eigen::MatrixXd companion(const ReducedForm& rf) { return companion(rf.A); }

struct Stability {
    bool stable = false;
    double max_modulus = 0.0;
};

Stability is_stable(const std::vector<Eigen::MatrixXd>& A);
inline Stability is_stable(const ReducedForm& rf) { return is_stable(rf.A); }

struct MaCoefficients {
    std::vector<Eigen::MatrixXd> phi;  // Phi_0 .. Phi_H
    int horizon() const { return static_cast<int>(phi.size()) - 1; }
};

MaCoefficients ma_coefficients(const std::vector<Eigen::MatrixXd>& A, int horizon);
inline MaCoefficients ma_coefficients(const ReducedForm& rf, int horizon) { return ma_coefficients(rf.A, horizon); }

/// Recursive rebuild: the first p rows of rf.data are kept as initial conditions and rows
/// t >= p are generated from the point estimates plus `innovations` (T - p rows).
Eigen::MatrixXd simulate(const ReducedForm& rf, const Eigen::MatrixXd& innovations);

}  // namespace svar::var
