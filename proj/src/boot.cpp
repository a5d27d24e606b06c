#include "svar/boot.hpp"

#include "svar/error.hpp"
#include "svar/parallel.hpp"
#include "svar/random.hpp"

#include <cmath>
#include <string>

namespace svar::boot {

namespace {

constexpr int kMaxAttempts = 5;

void check_config(const ident::StructuralModel& sm, const BootConfig& cfg) {
    if (cfg.replications < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 replications");
    if (cfg.horizon < 0) throw Error(ErrorCode::InvalidArgument, "horizon must be >= 0");
    if (cfg.method == Method::mbb) {
        if (cfg.block_len < 1) throw Error(ErrorCode::InvalidArgument, "block length must be >= 1");
        if (cfg.block_len > sm.rf.effective_size())
            throw Error(ErrorCode::BlockTooLong, "block length " + std::to_string(cfg.block_len) + " exceeds " +
                                                     std::to_string(sm.rf.effective_size()) + " residual rows");
    }
}

}  // namespace

std::string_view to_string(Method m) { return m == Method::wild ? "wild" : "mbb"; }

Method parse_method(std::string_view text) {
    if (text == "wild") return Method::wild;
    if (text == "mbb") return Method::mbb;
    throw Error(ErrorCode::InvalidArgument, "unknown bootstrap method '" + std::string(text) + "'");
}

Eigen::MatrixXd wild_residuals(const Eigen::MatrixXd& residuals, std::mt19937_64& rng, bool force_unit) {
    Eigen::MatrixXd out(residuals.rows(), residuals.cols());
    for (Eigen::Index t = 0; t < residuals.rows(); ++t) {
        const double eta = force_unit ? 1.0 : rademacher(rng);
        out.row(t) = eta * residuals.row(t);
    }
    return out;
}

Eigen::MatrixXd block_centering(const Eigen::MatrixXd& residuals, int block_len) {
    const Eigen::Index n = residuals.rows();
    const Eigen::Index nblocks = n - block_len + 1;
    Eigen::MatrixXd c(block_len, residuals.cols());
    for (Eigen::Index s = 0; s < block_len; ++s)
        c.row(s) = residuals.middleRows(s, nblocks).colwise().mean();
    return c;
}

Eigen::MatrixXd mbb_residuals(const Eigen::MatrixXd& residuals, int block_len, std::mt19937_64& rng,
                              bool recenter) {
    const Eigen::Index n = residuals.rows();
    if (block_len < 1) throw Error(ErrorCode::InvalidArgument, "block length must be >= 1");
    if (block_len > n) throw Error(ErrorCode::BlockTooLong, "block length exceeds residual rows");
    const auto starts = static_cast<std::uint64_t>(n - block_len + 1);
    const Eigen::MatrixXd centre =
        recenter ? block_centering(residuals, block_len) : Eigen::MatrixXd::Zero(block_len, residuals.cols());
    Eigen::MatrixXd out(n, residuals.cols());
    Eigen::Index row = 0;
    while (row < n) {
        const auto start = static_cast<Eigen::Index>(uniform_index(rng, starts));
        for (Eigen::Index s = 0; s < block_len && row < n; ++s, ++row)
            out.row(row) = residuals.row(start + s) - centre.row(s);
    }
    return out;
}

BandSet bands(const ident::IrfResult& point, const std::vector<ident::IrfResult>& draws,
              const std::vector<int>& k_list) {
    if (draws.size() < 2) throw Error(ErrorCode::InvalidArgument, "bands need at least 2 draws");
    const std::size_t H1 = point.theta.size();
    const Eigen::Index K = point.theta.front().rows();
    const Eigen::Index J = point.theta.front().cols();
    const double R = static_cast<double>(draws.size());

    BandSet out;
    out.point = point;
    out.k_list = k_list;
    out.replications = static_cast<int>(draws.size());
    out.se.assign(H1, Eigen::MatrixXd::Zero(K, J));
    for (std::size_t h = 0; h < H1; ++h) {
        // Deviations from the first draw, so identical draws give exactly zero.
        const Eigen::MatrixXd& ref = draws.front().theta.at(h);
        Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(K, J);
        for (const auto& d : draws) mean += d.theta.at(h) - ref;
        mean /= R;
        Eigen::MatrixXd ss = Eigen::MatrixXd::Zero(K, J);
        for (const auto& d : draws) ss += (d.theta[h] - ref - mean).cwiseAbs2();
        out.se[h] = (ss / (R - 1.0)).cwiseSqrt();
    }
    for (int k : k_list) {
        std::vector<Eigen::MatrixXd> lo, hi;
        for (std::size_t h = 0; h < H1; ++h) {
            lo.push_back(point.theta[h] - k * out.se[h]);
            hi.push_back(point.theta[h] + k * out.se[h]);
        }
        out.lower.push_back(std::move(lo));
        out.upper.push_back(std::move(hi));
    }
    return out;
}

Replications replicate(const ident::StructuralModel& sm, const BootConfig& cfg) {
    check_config(sm, cfg);
    const auto R = static_cast<std::size_t>(cfg.replications);
    std::vector<std::optional<ident::IrfResult>> slots(R);

    parallel_for(R, cfg.threads, [&](std::size_t r) {
        for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
            auto rng = make_stream(cfg.seed, r, static_cast<std::uint64_t>(attempt));
            const Eigen::MatrixXd u = cfg.method == Method::wild
                                          ? wild_residuals(sm.rf.residuals, rng, cfg.force_unit_multiplier)
                                          : mbb_residuals(sm.rf.residuals, cfg.block_len, rng, cfg.mbb_recenter);
            try {
                const Eigen::MatrixXd y = var::simulate(sm.rf, u);
                const auto rf = var::estimate(y, sm.rf.spec, sm.rf.var_names, sm.rf.start);
                const auto star = ident::identify(rf, sm.price_row, sm.shock_names);
                slots[r] = ident::structural_irf(star, cfg.horizon, cfg.cumulative_rows);
                return;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::SingularDesign && e.code() != ErrorCode::NotPositiveDefinite &&
                    e.code() != ErrorCode::ZeroImpact)
                    throw;
            }
        }
    });

    Replications out;
    for (auto& s : slots) {
        if (s) {
            out.draws.push_back(std::move(*s));
        } else {
            ++out.failures;
        }
    }
    if (static_cast<double>(out.failures) > 0.01 * static_cast<double>(R) ||
        out.draws.size() < 2)
        throw Error(ErrorCode::ReplicationFailure, std::to_string(out.failures) + " of " + std::to_string(R) +
                                                       " replications failed after " + std::to_string(kMaxAttempts) +
                                                       " attempts");
    return out;
}

BandSet wild_bootstrap(const ident::StructuralModel& sm, const BootConfig& cfg) {
    if (cfg.method != Method::wild) throw Error(ErrorCode::InvalidArgument, "config method is not wild");
    return bootstrap(sm, cfg);
}

BandSet mbb_bootstrap(const ident::StructuralModel& sm, const BootConfig& cfg) {
    if (cfg.method != Method::mbb) throw Error(ErrorCode::InvalidArgument, "config method is not mbb");
    return bootstrap(sm, cfg);
}

BandSet bootstrap(const ident::StructuralModel& sm, const BootConfig& cfg) {
    const auto reps = replicate(sm, cfg);
    auto out = bands(ident::structural_irf(sm, cfg.horizon, cfg.cumulative_rows), reps.draws, cfg.k_list);
    out.failures = reps.failures;
    return out;
}

}  // namespace svar::boot
