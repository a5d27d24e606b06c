#include "svar/ident.hpp"

#include "svar/error.hpp"

#include <Eigen/Eigenvalues>

namespace svar::ident {

ts::Panel ShockSeries::to_panel() const {
    std::vector<ts::MonthlySeries> cols;
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
        std::vector<double> v(static_cast<std::size_t>(values.rows()));
        for (Eigen::Index t = 0; t < values.rows(); ++t) v[static_cast<std::size_t>(t)] = values(t, j);
        cols.emplace_back(names.at(static_cast<std::size_t>(j)), start, std::move(v));
    }
    return ts::Panel(std::move(cols));
}

Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& sigma) {
    if (sigma.rows() != sigma.cols() || sigma.rows() == 0)
        throw Error(ErrorCode::InvalidArgument, "covariance must be square and non-empty");
    const double scale = sigma.cwiseAbs().maxCoeff();
    if (!((sigma - sigma.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(scale, 1e-300)))
        throw Error(ErrorCode::NotPositiveDefinite, "covariance is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(hi > 0.0) || !(lo > 1e-12 * hi))
        throw Error(ErrorCode::NotPositiveDefinite, "covariance eigenvalues span [" + std::to_string(lo) + ", " +
                                                        std::to_string(hi) + "]");
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::NotPositiveDefinite, "Cholesky factorization failed");
    Eigen::MatrixXd P = llt.matrixL();
    P.triangularView<Eigen::StrictlyUpper>().setZero();
    return P;
}

StructuralModel normalize(const Eigen::MatrixXd& P, const var::ReducedForm& rf, int price_row,
                          std::vector<std::string> shock_names) {
    const auto K = static_cast<int>(P.rows());
    if (P.cols() != K || K != rf.vars()) throw Error(ErrorCode::InvalidArgument, "impact matrix has wrong shape");
    if (price_row < 0 || price_row >= K) throw Error(ErrorCode::InvalidArgument, "price_row out of range");
    if (shock_names.empty()) {
        if (K == static_cast<int>(kOilShockNames.size())) {
            shock_names = kOilShockNames;
        } else {
            for (int j = 0; j < K; ++j) shock_names.push_back("shock" + std::to_string(j + 1));
        }
    }
    if (static_cast<int>(shock_names.size()) != K)
        throw Error(ErrorCode::InvalidArgument, "shock name count does not match K");

    StructuralModel sm;
    sm.rf = rf;
    sm.b0inv = P;
    sm.shock_names = std::move(shock_names);
    sm.sign_flips.assign(static_cast<std::size_t>(K), 1);
    sm.price_row = price_row;
    // Columns right of price_row have a structural zero in that row and stay as they are.
    // An exactly zero off-diagonal impact already satisfies the >= 0 rule; a zero on the
    // diagonal means the price variable does not load on its own shock.
    if (sm.b0inv(price_row, price_row) == 0.0)
        throw Error(ErrorCode::ZeroImpact,
                    "shock " + std::to_string(price_row + 1) + " has zero impact on the price row");
    for (int j = 0; j <= price_row; ++j) {
        const double impact = sm.b0inv(price_row, j);
        if (impact < 0.0) {
            sm.b0inv.col(j) *= -1.0;
            sm.sign_flips[static_cast<std::size_t>(j)] = -1;
        }
    }
    return sm;
}

StructuralModel identify(const var::ReducedForm& rf, int price_row, std::vector<std::string> shock_names) {
    if (price_row < 0) price_row = rf.vars() - 1;
    return normalize(cholesky_lower(rf.sigma), rf, price_row, std::move(shock_names));
}

ShockSeries structural_shocks(const StructuralModel& sm) {
    ShockSeries out;
    // Forward substitution on b0inv * e_t = u_t for all t at once.
    out.values = sm.b0inv.triangularView<Eigen::Lower>().solve(sm.rf.residuals.transpose()).transpose();
    out.start = sm.rf.residual_range().first;
    out.names = sm.shock_names;
    return out;
}

IrfResult structural_irf(const std::vector<Eigen::MatrixXd>& A, const Eigen::MatrixXd& b0inv, int horizon,
                         const std::set<int>& cumulative_rows) {
    const auto ma = var::ma_coefficients(A, horizon);
    IrfResult irf;
    irf.cumulative_rows = cumulative_rows;
    irf.theta.reserve(ma.phi.size());
    for (const auto& phi : ma.phi) irf.theta.push_back(phi * b0inv);
    for (int row : cumulative_rows) {
        if (row < 0 || row >= b0inv.rows()) throw Error(ErrorCode::InvalidArgument, "cumulative row out of range");
        for (std::size_t h = 1; h < irf.theta.size(); ++h) irf.theta[h].row(row) += irf.theta[h - 1].row(row);
    }
    return irf;
}

IrfResult structural_irf(const StructuralModel& sm, int horizon, const std::set<int>& cumulative_rows) {
    return structural_irf(sm.rf.A, sm.b0inv, horizon, cumulative_rows);
}

}  // namespace svar::ident
