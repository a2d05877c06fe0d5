#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "torsilimit/dc_planner.hpp"
#include "torsilimit/fatigue.hpp"
#include "torsilimit/interaction_factors.hpp"
#include "torsilimit/terminal_limits.hpp"
#include "torsilimit/validator.hpp"

namespace torsilimit {

/// All numeric report output is fixed at 9 significant digits so reruns are
/// byte-identical.
std::string fmt9(double v);
/// Rounds through the 9-significant-digit representation for JSON payloads.
double round9(double v);

using ordered_json = nlohmann::ordered_json;

void write_text_file(const std::string& path, const std::string& content);

std::string limits_csv(const LimitProfile& p);
ordered_json limits_summary_json(const std::vector<LimitProfile>& profiles);

std::string freq_sweep_csv(const std::vector<FreqResponseSample>& samples,
                           const std::vector<std::string>& section_names);

std::string if_matrix_csv(const IFMatrix& m);
ordered_json if_matrix_json(const IFMatrix& m);
IFMatrix if_matrix_from_json(const nlohmann::json& j);

ordered_json plan_json(const std::vector<SiteBound>& bounds, const LPResult& lp,
                       const std::vector<std::string>& generator_ids,
                       const std::vector<double>& P_e_max_mw, const IFMatrix& IF);
std::string site_bounds_csv(const std::vector<SiteBound>& bounds);

std::string trajectory_csv(const SimulationResult& sim, const std::vector<std::string>& mass_names,
                           const std::vector<std::string>& section_names, std::size_t stride = 1);

std::string cycles_csv(const CycleSet& cycles);
ordered_json verdict_json(const ValidationReport& report);

std::string spectrum_csv(const ComplianceResult& r);
ordered_json compliance_json(const ComplianceResult& r, int bus);

}  // namespace torsilimit
