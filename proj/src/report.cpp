#include "svar/report.hpp"

#include "svar/error.hpp"
#include "svar/format.hpp"

#include <algorithm>
#include <ostream>

namespace svar::report {

namespace {

nlohmann::ordered_json matrix_json(const Eigen::MatrixXd& m) {
    auto rows = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        auto row = nlohmann::ordered_json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::size_t k_index(const std::vector<int>& k_list, int k) {
    auto it = std::find(k_list.begin(), k_list.end(), k);
    if (it == k_list.end())
        throw Error(ErrorCode::InvalidArgument, "band set lacks the " + std::to_string(k) + "-SE band");
    return static_cast<std::size_t>(it - k_list.begin());
}

}  // namespace

nlohmann::ordered_json reduced_form_json(const var::ReducedForm& rf, bool include_residuals) {
    nlohmann::ordered_json j;
    j["variables"] = rf.var_names;
    j["lags"] = rf.lags();
    j["intercept"] = rf.spec.intercept;
    j["sample"] = rf.sample_range().str();
    j["residual_sample"] = rf.residual_range().str();
    j["observations"] = rf.effective_size();
    j["alpha"] = std::vector<double>(rf.alpha.data(), rf.alpha.data() + rf.alpha.size());
    auto lags = nlohmann::ordered_json::array();
    for (const auto& a : rf.A) lags.push_back(matrix_json(a));
    j["A"] = std::move(lags);
    j["sigma"] = matrix_json(rf.sigma);
    const auto stab = var::is_stable(rf);
    j["stable"] = stab.stable;
    j["max_modulus"] = stab.max_modulus;
    if (include_residuals) j["residuals"] = matrix_json(rf.residuals);
    return j;
}

void write_irf_csv(std::ostream& out, const ident::IrfResult& irf, const std::vector<std::string>& var_names,
                   const std::vector<std::string>& shock_names) {
    out << "shock,variable,horizon,response\n";
    for (std::size_t j = 0; j < shock_names.size(); ++j)
        for (std::size_t i = 0; i < var_names.size(); ++i)
            for (std::size_t h = 0; h < irf.theta.size(); ++h)
                out << shock_names[j] << ',' << var_names[i] << ',' << h << ','
                    << format_double(irf.theta[h](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) << '\n';
}

void write_bandset_csv(std::ostream& out, const boot::BandSet& bands, const std::vector<std::string>& var_names,
                       const std::vector<std::string>& shock_names) {
    const auto k1 = k_index(bands.k_list, 1);
    const auto k2 = k_index(bands.k_list, 2);
    out << "shock,variable,horizon,point,se,lo1,hi1,lo2,hi2\n";
    for (std::size_t j = 0; j < shock_names.size(); ++j) {
        for (std::size_t i = 0; i < var_names.size(); ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            const auto c = static_cast<Eigen::Index>(j);
            for (std::size_t h = 0; h < bands.point.theta.size(); ++h) {
                out << shock_names[j] << ',' << var_names[i] << ',' << h << ','
                    << format_double(bands.point.theta[h](r, c)) << ',' << format_double(bands.se[h](r, c)) << ','
                    << format_double(bands.lower[k1][h](r, c)) << ',' << format_double(bands.upper[k1][h](r, c)) << ','
                    << format_double(bands.lower[k2][h](r, c)) << ',' << format_double(bands.upper[k2][h](r, c))
                    << '\n';
            }
        }
    }
}

void write_shocks_csv(std::ostream& out, const ident::ShockSeries& shocks) {
    ts::write_panel_csv(out, shocks.to_panel());
}

void write_hd_contributions_csv(std::ostream& out, const hdecomp::HistoricalDecomposition& hd) {
    out << "date,variable,shock,contribution\n";
    const auto n = hd.baseline.rows();
    for (Eigen::Index t = 0; t < n; ++t) {
        const auto date = (hd.start + static_cast<int>(t)).str();
        for (std::size_t i = 0; i < hd.var_names.size(); ++i)
            for (std::size_t j = 0; j < hd.shock_names.size(); ++j)
                out << date << ',' << hd.var_names[i] << ',' << hd.shock_names[j] << ','
                    << format_double(hd.contributions[j](t, static_cast<Eigen::Index>(i))) << '\n';
    }
}

void write_hd_baseline_csv(std::ostream& out, const hdecomp::HistoricalDecomposition& hd) {
    out << "date,variable,baseline\n";
    for (Eigen::Index t = 0; t < hd.baseline.rows(); ++t) {
        const auto date = (hd.start + static_cast<int>(t)).str();
        for (std::size_t i = 0; i < hd.var_names.size(); ++i)
            out << date << ',' << hd.var_names[i] << ',' << format_double(hd.baseline(t, static_cast<Eigen::Index>(i)))
                << '\n';
    }
}

void write_stage2_csv(std::ostream& out, const std::vector<stage2::Stage2Fit>& fits) {
    out << "shock,horizon,point,se,lo1,hi1,lo2,hi2,cumulative\n";
    for (const auto& f : fits) {
        const auto k1 = k_index(f.bands.k_list, 1);
        const auto k2 = k_index(f.bands.k_list, 2);
        for (Eigen::Index h = 0; h < f.responses.size(); ++h) {
            out << f.shock << ',' << h << ',' << format_double(f.responses(h)) << ',' << format_double(f.bands.se(h))
                << ',' << format_double(f.bands.lower[k1](h)) << ',' << format_double(f.bands.upper[k1](h)) << ','
                << format_double(f.bands.lower[k2](h)) << ',' << format_double(f.bands.upper[k2](h)) << ','
                << (f.cumulative ? "true" : "false") << '\n';
        }
    }
}

}  // namespace svar::report
