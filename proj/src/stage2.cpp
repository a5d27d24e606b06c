#include "svar/stage2.hpp"

#include "svar/error.hpp"
#include "svar/parallel.hpp"
#include "svar/random.hpp"
#include "svar/var.hpp"

#include <algorithm>
#include <optional>

namespace svar::stage2 {

namespace {

constexpr int kMaxAttempts = 5;

Eigen::VectorXd solve_ls(const Eigen::MatrixXd& X, const Eigen::VectorXd& z) {
    if (!(var::cross_product_rcond(X) >= var::kSingularRcond))
        throw Error(ErrorCode::SingularDesign, "distributed-lag regressors are collinear");
    return X.householderQr().solve(z);
}

Eigen::VectorXd to_responses(const Eigen::VectorXd& phi, bool cumulative) {
    if (!cumulative) return phi;
    Eigen::VectorXd out(phi.size());
    double acc = 0.0;
    for (Eigen::Index h = 0; h < phi.size(); ++h) out(h) = (acc += phi(h));
    return out;
}

}  // namespace

LagDesign lag_design(std::span<const double> z, std::span<const double> shock, int lags) {
    if (lags < 0) throw Error(ErrorCode::InvalidArgument, "lag count must be >= 0");
    if (z.size() != shock.size()) throw Error(ErrorCode::InvalidArgument, "dependent and shock series differ in length");
    const auto n = static_cast<Eigen::Index>(z.size());
    const Eigen::Index N = n - lags;
    if (N <= lags + 2)
        throw Error(ErrorCode::TooFewObservations,
                    std::to_string(std::max<Eigen::Index>(N, 0)) + " regression rows for " + std::to_string(lags) + " lags");
    LagDesign d;
    d.lags = lags;
    d.first_row = lags;
    d.z.resize(N);
    d.X.resize(N, lags + 2);
    for (Eigen::Index r = 0; r < N; ++r) {
        const Eigen::Index t = r + lags;
        d.z(r) = z[static_cast<std::size_t>(t)];
        d.X(r, 0) = 1.0;
        for (int i = 0; i <= lags; ++i) d.X(r, 1 + i) = shock[static_cast<std::size_t>(t - i)];
    }
    return d;
}

Stage2Fit fit_distributed_lag(const LagDesign& design, const Stage2Spec& spec, std::string shock_label) {
    const Eigen::VectorXd beta = solve_ls(design.X, design.z);
    Stage2Fit fit;
    fit.shock = std::move(shock_label);
    fit.intercept = beta(0);
    fit.coefficients = beta.tail(design.lags + 1);
    fit.residuals = design.z - design.X * beta;
    fit.cumulative = spec.cumulative;
    fit.responses = to_responses(fit.coefficients, spec.cumulative);
    return fit;
}

Stage2Fit fit_distributed_lag(std::span<const double> z, std::span<const double> shock, const Stage2Spec& spec,
                              std::string shock_label) {
    if (spec.lags < 0) throw Error(ErrorCode::InvalidArgument, "lag count must be >= 0");
    return fit_distributed_lag(lag_design(z, shock, spec.lags), spec, std::move(shock_label));
}

Stage2Bands block_bootstrap_bands(const LagDesign& design, const Stage2Fit& fit, const Stage2Spec& spec) {
    const Eigen::Index N = design.z.size();
    if (spec.block_len < 1) throw Error(ErrorCode::InvalidArgument, "block length must be >= 1");
    if (spec.block_len > N)
        throw Error(ErrorCode::BlockTooLong,
                    "block length " + std::to_string(spec.block_len) + " exceeds " + std::to_string(N) + " rows");
    if (spec.replications < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 replications");

    const auto R = static_cast<std::size_t>(spec.replications);
    const auto starts = static_cast<std::uint64_t>(N - spec.block_len + 1);
    std::vector<std::optional<Eigen::VectorXd>> slots(R);

    parallel_for(R, spec.threads, [&](std::size_t r) {
        for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
            auto rng = make_stream(spec.seed, r, static_cast<std::uint64_t>(attempt));
            Eigen::VectorXd z(N);
            Eigen::MatrixXd X(N, design.X.cols());
            Eigen::Index row = 0;
            while (row < N) {
                const auto start = static_cast<Eigen::Index>(uniform_index(rng, starts));
                for (Eigen::Index s = 0; s < spec.block_len && row < N; ++s, ++row) {
                    z(row) = design.z(start + s);
                    X.row(row) = design.X.row(start + s);
                }
            }
            try {
                const Eigen::VectorXd beta = solve_ls(X, z);
                slots[r] = to_responses(beta.tail(design.lags + 1), spec.cumulative);
                return;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::SingularDesign) throw;
            }
        }
    });

    std::vector<Eigen::VectorXd> draws;
    int failures = 0;
    for (auto& s : slots) {
        if (s) {
            draws.push_back(std::move(*s));
        } else {
            ++failures;
        }
    }
    if (static_cast<double>(failures) > 0.01 * static_cast<double>(R) || draws.size() < 2)
        throw Error(ErrorCode::ReplicationFailure,
                    std::to_string(failures) + " of " + std::to_string(R) + " block-bootstrap replications failed");

    const double n = static_cast<double>(draws.size());
    const Eigen::VectorXd ref = draws.front();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(fit.responses.size());
    for (const auto& d : draws) mean += d - ref;
    mean /= n;
    Eigen::VectorXd ss = Eigen::VectorXd::Zero(mean.size());
    for (const auto& d : draws) ss += (d - ref - mean).cwiseAbs2();

    Stage2Bands b;
    b.se = (ss / (n - 1.0)).cwiseSqrt();
    b.k_list = spec.k_list;
    b.replications = static_cast<int>(draws.size());
    b.failures = failures;
    for (int k : spec.k_list) {
        b.lower.push_back(fit.responses - k * b.se);
        b.upper.push_back(fit.responses + k * b.se);
    }
    return b;
}

Stage2Fit estimate(std::span<const double> z, std::span<const double> shock, const Stage2Spec& spec,
                   std::string shock_label) {
    const auto design = lag_design(z, shock, spec.lags);
    auto fit = fit_distributed_lag(design, spec, std::move(shock_label));
    fit.bands = block_bootstrap_bands(design, fit, spec);
    return fit;
}

std::vector<ts::QuarterlySeries> shocks_to_quarterly(const ident::ShockSeries& shocks) {
    std::vector<ts::QuarterlySeries> out;
    const auto panel = shocks.to_panel();
    for (const auto& col : panel.columns()) out.push_back(ts::quarterly_average(col));
    return out;
}

Aligned align(const ts::MonthlySeries& z, const ts::MonthlySeries& shock) {
    const auto panel = ts::align({z, shock});
    Aligned a;
    a.z.assign(panel.column(0).values().begin(), panel.column(0).values().end());
    a.shock.assign(panel.column(1).values().begin(), panel.column(1).values().end());
    a.first = panel.range().first.str();
    a.last = panel.range().last.str();
    return a;
}

Aligned align(const ts::QuarterlySeries& z, const ts::QuarterlySeries& shock) {
    const auto first = std::max(z.start(), shock.start());
    const auto last = std::min(z.end(), shock.end());
    if (z.size() == 0 || shock.size() == 0 || last < first)
        throw Error(ErrorCode::NoOverlap, "quarterly series have no common quarters");
    Aligned a;
    for (auto q = first; q <= last; q = q + 1) {
        a.z.push_back(z[static_cast<std::size_t>(q - z.start())]);
        a.shock.push_back(shock[static_cast<std::size_t>(q - shock.start())]);
    }
    a.first = first.str();
    a.last = last.str();
    return a;
}

}  // namespace svar::stage2
