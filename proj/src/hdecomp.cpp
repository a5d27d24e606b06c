#include "svar/hdecomp.hpp"

#include "svar/error.hpp"

namespace svar::hdecomp {

ts::MonthlySeries HistoricalDecomposition::contribution(int variable, int shock) const {
    const auto& m = contributions.at(static_cast<std::size_t>(shock));
    std::vector<double> v(m.rows());
    for (Eigen::Index t = 0; t < m.rows(); ++t) v[static_cast<std::size_t>(t)] = m(t, variable);
    return {var_names.at(static_cast<std::size_t>(variable)) + ":" + shock_names.at(static_cast<std::size_t>(shock)),
            start, std::move(v)};
}

ts::MonthlySeries HistoricalDecomposition::baseline_series(int variable) const {
    std::vector<double> v(baseline.rows());
    for (Eigen::Index t = 0; t < baseline.rows(); ++t) v[static_cast<std::size_t>(t)] = baseline(t, variable);
    return {var_names.at(static_cast<std::size_t>(variable)) + ":baseline", start, std::move(v)};
}

double HistoricalDecomposition::max_reconstruction_error() const {
    Eigen::MatrixXd total = baseline;
    for (const auto& c : contributions) total += c;
    return (total - observed).cwiseAbs().maxCoeff();
}

HistoricalDecomposition decompose(const ident::StructuralModel& sm, const ident::ShockSeries& shocks) {
    const auto stability = var::is_stable(sm.rf);
    if (!stability.stable)
        throw Error(ErrorCode::UnstableModel,
                    "companion spectral radius " + std::to_string(stability.max_modulus) + " >= 1");
    const Eigen::Index n = shocks.values.rows();
    const Eigen::Index K = sm.vars();
    if (n != sm.rf.effective_size() || shocks.values.cols() != K)
        throw Error(ErrorCode::InvalidArgument, "shock series does not match the model");

    const auto irf = ident::structural_irf(sm, static_cast<int>(n) - 1);

    HistoricalDecomposition hd;
    hd.start = shocks.start;
    hd.var_names = sm.rf.var_names;
    hd.shock_names = sm.shock_names;
    hd.observed = sm.rf.data.bottomRows(n);
    hd.contributions.assign(static_cast<std::size_t>(K), Eigen::MatrixXd::Zero(n, K));
    for (Eigen::Index j = 0; j < K; ++j) {
        auto& c = hd.contributions[static_cast<std::size_t>(j)];
        for (Eigen::Index s = 0; s < n; ++s) {
            Eigen::VectorXd acc = Eigen::VectorXd::Zero(K);
            for (Eigen::Index h = 0; h <= s; ++h) acc += irf.theta[static_cast<std::size_t>(h)].col(j) * shocks.values(s - h, j);
            c.row(s) = acc.transpose();
        }
    }
    hd.baseline = hd.observed;
    for (const auto& c : hd.contributions) hd.baseline -= c;
    return hd;
}

}  // namespace svar::hdecomp
