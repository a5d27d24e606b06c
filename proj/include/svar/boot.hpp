#pragma once

#include "svar/ident.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string_view>
#include <vector>

namespace svar::boot {

enum class Method { wild, mbb };

std::string_view to_string(Method m);
Method parse_method(std::string_view text);

struct BootConfig {
    int replications = 1000;
    Method method = Method::wild;
    int block_len = 36;  // mbb only
    std::uint64_t seed = 0;
    int horizon = 15;
    int threads = 1;
    std::set<int> cumulative_rows;
    std::vector<int> k_list = {1, 2};

    /// Position-wise recentering of block-resampled residuals (mbb).
    bool mbb_recenter = true;
    /// Test hook: every wild-bootstrap multiplier is +1.
    bool force_unit_multiplier = false;
};

/// Symmetric standard-error bands around a point IRF. Index conventions follow IrfResult:
/// [h](variable, shock).
struct BandSet {
    ident::IrfResult point;
    std::vector<Eigen::MatrixXd> se;
    std::vector<int> k_list;
    std::vector<std::vector<Eigen::MatrixXd>> lower;  // [k index][h]
    std::vector<std::vector<Eigen::MatrixXd>> upper;
    int replications = 0;  // successful draws
    int failures = 0;
};

BandSet bands(const ident::IrfResult& point, const std::vector<ident::IrfResult>& draws,
              const std::vector<int>& k_list = {1, 2});

struct Replications {
    std::vector<ident::IrfResult> draws;  // successful replications in index order
    int failures = 0;
};

/// Runs cfg.replications recursive-design replications with the method in cfg. A
/// replication whose re-estimation fails is redrawn from a fresh sub-stream up to 5
/// times; throws ReplicationFailure when more than 1% of replications still fail.
Replications replicate(const ident::StructuralModel& sm, const BootConfig& cfg);

BandSet wild_bootstrap(const ident::StructuralModel& sm, const BootConfig& cfg);
BandSet mbb_bootstrap(const ident::StructuralModel& sm, const BootConfig& cfg);
/// Dispatch on cfg.method.
BandSet bootstrap(const ident::StructuralModel& sm, const BootConfig& cfg);

// Resampling kernels, exposed for testing.

/// u*_t = eta_t * u_t with one Rademacher eta_t per row.
Eigen::MatrixXd wild_residuals(const Eigen::MatrixXd& residuals, std::mt19937_64& rng, bool force_unit = false);

/// Row means of the residuals over all admissible blocks at each within-block offset
/// (block_len x K).
Eigen::MatrixXd block_centering(const Eigen::MatrixXd& residuals, int block_len);

/// Overlapping-block resample of residual rows, truncated to the original row count.
Eigen::MatrixXd mbb_residuals(const Eigen::MatrixXd& residuals, int block_len, std::mt19937_64& rng,
                              bool recenter = true);

}  // namespace svar::boot
