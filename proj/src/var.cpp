#include "svar/var.hpp"

#include "svar/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace svar::var {

ts::MonthRange ReducedForm::residual_range() const {
    return {start + lags(), start + (sample_size() - 1)};
}

ts::MonthRange ReducedForm::sample_range() const { return {start, start + (sample_size() - 1)}; }

Eigen::MatrixXd ReducedForm::fitted() const { return data.bottomRows(effective_size()) - residuals; }

Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& y, const VarSpec& spec) {
    const Eigen::Index T = y.rows();
    const Eigen::Index K = y.cols();
    const Eigen::Index p = spec.lags;
    const Eigen::Index offset = spec.intercept ? 1 : 0;
    Eigen::MatrixXd X(T - p, offset + K * p);
    for (Eigen::Index t = p; t < T; ++t) {
        const Eigen::Index row = t - p;
        if (spec.intercept) X(row, 0) = 1.0;
        for (Eigen::Index i = 1; i <= p; ++i) X.block(row, offset + (i - 1) * K, 1, K) = y.row(t - i);
    }
    return X;
}

double cross_product_rcond(const Eigen::MatrixXd& X) {
    if (X.cols() == 0) return 1.0;
    Eigen::VectorXd norms = X.colwise().norm().transpose();
    for (Eigen::Index j = 0; j < norms.size(); ++j)
        if (norms(j) == 0.0) return 0.0;
    const Eigen::MatrixXd scaled = X * norms.cwiseInverse().asDiagonal();
    // Singular values of R equal those of X; R is small (m x m).
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(scaled);
    const Eigen::MatrixXd R = qr.matrixQR().topRows(X.cols()).triangularView<Eigen::Upper>();
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(R).singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    if (!(smax > 0.0)) return 0.0;
    const double ratio = smin / smax;
    return ratio * ratio;
}

ReducedForm estimate(const ts::Panel& panel, const VarSpec& spec) {
    return estimate(panel.matrix(), spec, panel.names(), panel.start());
}

ReducedForm estimate(const Eigen::MatrixXd& y, const VarSpec& spec, std::vector<std::string> names,
                     ts::YearMonth start) {
    if (spec.lags < 1) throw Error(ErrorCode::InvalidArgument, "lag order must be >= 1");
    const Eigen::Index T = y.rows();
    const Eigen::Index K = y.cols();
    const Eigen::Index p = spec.lags;
    if (K < 1) throw Error(ErrorCode::InvalidArgument, "VAR needs at least one variable");
    const Eigen::Index m = (spec.intercept ? 1 : 0) + K * p;
    if (T - p <= m)
        throw Error(ErrorCode::TooFewObservations, "T=" + std::to_string(T) + " too small for K=" +
                                                       std::to_string(K) + ", p=" + std::to_string(p));

    const Eigen::MatrixXd X = design_matrix(y, spec);
    const Eigen::MatrixXd Y = y.bottomRows(T - p);

    const double rcond = cross_product_rcond(X);
    if (!(rcond >= kSingularRcond))
        throw Error(ErrorCode::SingularDesign, "regressor cross-product reciprocal condition " + std::to_string(rcond));

    // One factorization serves all K equations.
    const Eigen::MatrixXd B = X.householderQr().solve(Y);  // m x K

    ReducedForm rf;
    rf.spec = spec;
    rf.alpha = spec.intercept ? Eigen::VectorXd(B.row(0).transpose()) : Eigen::VectorXd::Zero(K);
    const Eigen::Index offset = spec.intercept ? 1 : 0;
    rf.A.reserve(static_cast<std::size_t>(p));
    for (Eigen::Index i = 0; i < p; ++i) rf.A.emplace_back(B.block(offset + i * K, 0, K, K).transpose());
    rf.residuals = Y - X * B;
    rf.sigma = rf.residuals.transpose() * rf.residuals / static_cast<double>(T - p);
    rf.sigma = 0.5 * (rf.sigma + rf.sigma.transpose()).eval();
    rf.data = y;
    rf.start = start;
    if (names.empty()) {
        for (Eigen::Index k = 0; k < K; ++k) names.push_back("y" + std::to_string(k + 1));
    }
    if (static_cast<Eigen::Index>(names.size()) != K)
        throw Error(ErrorCode::InvalidArgument, "variable name count does not match K");
    rf.var_names = std::move(names);
    return rf;
}

Eigen::MatrixXd companion(const std::vector<Eigen::MatrixXd>& A) {
    if (A.empty()) throw Error(ErrorCode::InvalidArgument, "companion needs at least one lag matrix");
    const Eigen::Index K = A.front().rows();
    const auto p = static_cast<Eigen::Index>(A.size());
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(K * p, K * p);
    for (Eigen::Index i = 0; i < p; ++i) F.block(0, i * K, K, K) = A[static_cast<std::size_t>(i)];
    if (p > 1) F.block(K, 0, K * (p - 1), K * (p - 1)).setIdentity();
    return F;
}

Stability is_stable(const std::vector<Eigen::MatrixXd>& A) {
    const Eigen::MatrixXd F = companion(A);
    Eigen::EigenSolver<Eigen::MatrixXd> es(F, /*computeEigenvectors=*/false);
    double rho = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) rho = std::max(rho, std::abs(es.eigenvalues()(i)));
    return {rho < 1.0 - 1e-9, rho};
}

MaCoefficients ma_coefficients(const std::vector<Eigen::MatrixXd>& A, int horizon) {
    if (horizon < 0) throw Error(ErrorCode::InvalidArgument, "horizon must be >= 0");
    if (A.empty()) throw Error(ErrorCode::InvalidArgument, "no lag matrices");
    const Eigen::Index K = A.front().rows();
    const int p = static_cast<int>(A.size());
    MaCoefficients ma;
    ma.phi.reserve(static_cast<std::size_t>(horizon) + 1);
    ma.phi.push_back(Eigen::MatrixXd::Identity(K, K));
    for (int h = 1; h <= horizon; ++h) {
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(K, K);
        for (int i = 1; i <= std::min(h, p); ++i)
            acc.noalias() += ma.phi[static_cast<std::size_t>(h - i)] * A[static_cast<std::size_t>(i - 1)];
        ma.phi.push_back(std::move(acc));
    }
    return ma;
}

Eigen::MatrixXd simulate(const ReducedForm& rf, const Eigen::MatrixXd& innovations) {
    const int p = rf.lags();
    const int T = rf.sample_size();
    if (innovations.rows() != T - p || innovations.cols() != rf.vars())
        throw Error(ErrorCode::InvalidArgument, "innovation matrix has wrong shape");
    Eigen::MatrixXd y(T, rf.vars());
    y.topRows(p) = rf.data.topRows(p);
    for (int t = p; t < T; ++t) {
        Eigen::VectorXd row = rf.alpha + innovations.row(t - p).transpose();
        for (int i = 1; i <= p; ++i) row.noalias() += rf.A[static_cast<std::size_t>(i - 1)] * y.row(t - i).transpose();
        y.row(t) = row.transpose();
    }
    return y;
}

}  // namespace svar::var
