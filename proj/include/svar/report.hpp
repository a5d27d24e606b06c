#pragma once

#include "svar/boot.hpp"
#include "svar/hdecomp.hpp"
#include "svar/ident.hpp"
#include "svar/stage2.hpp"
#include "svar/var.hpp"

#include "json.hpp"

#include <iosfwd>
#include <string>
#include <vector>

// Long-format CSV and JSON writers for every result type. Numbers use the shortest
// round-trip representation, so identical inputs produce identical bytes.
namespace svar::report {

nlohmann::ordered_json reduced_form_json(const var::ReducedForm& rf, bool include_residuals = false);

/// `shock,variable,horizon,response`
void write_irf_csv(std::ostream& out, const ident::IrfResult& irf, const std::vector<std::string>& var_names,
                   const std::vector<std::string>& shock_names);

/// `shock,variable,horizon,point,se,lo1,hi1,lo2,hi2`. Requires k_list to contain 1 and 2.
void write_bandset_csv(std::ostream& out, const boot::BandSet& bands, const std::vector<std::string>& var_names,
                       const std::vector<std::string>& shock_names);

/// `date,<shock1>,<shock2>,...`
void write_shocks_csv(std::ostream& out, const ident::ShockSeries& shocks);

/// `date,variable,shock,contribution`
void write_hd_contributions_csv(std::ostream& out, const hdecomp::HistoricalDecomposition& hd);
/// `date,variable,baseline`
void write_hd_baseline_csv(std::ostream& out, const hdecomp::HistoricalDecomposition& hd);

/// `shock,horizon,point,se,lo1,hi1,lo2,hi2,cumulative`; one block of rows per fit.
void write_stage2_csv(std::ostream& out, const std::vector<stage2::Stage2Fit>& fits);

}  // namespace svar::report
