#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "torsilimit/dc_planner.hpp"
#include "torsilimit/interaction_factors.hpp"
#include "torsilimit/parse.hpp"
#include "torsilimit/terminal_limits.hpp"
#include "torsilimit/validator.hpp"

namespace torsilimit {

/// Per-generator electrical overrides for the infinite-bus reduction. Anything
/// unset is derived: V from the base power flow, X from the short-circuit Zbus
/// diagonal, E = 1, delta0 from P0 = E V sin(delta0) / X.
struct MachineOverride {
    std::optional<double> E, V, X_machine_pu, P0_machine_pu;
};

struct StudyConfig {
    std::string case_file;
    std::string out_dir = "out";
    std::string shaft_dir;     // resolution root for shaft files (default: case dir)
    std::string material_dir;  // likewise for material files
    double cap_fraction = 0.20;
    double delta_f_max_hz = 1.5;
    double beta = 0.05;
    double perturbation_mw = 0.0;  // 0: auto (max of 1 MW and 0.1% of load)
    double threshold_mw = 0.0;
    double compute_fraction = 0.25;
    GridOptions grid;
    ValidationOptions sim;
    std::map<std::string, MachineOverride> machines;
    std::optional<std::vector<double>> lp_weights;

    static StudyConfig from_file(const std::string& path);
    static StudyConfig from_json(const nlohmann::json& j, const std::string& config_dir);
};

/// One shafted SG fully prepared for frequency-domain and time-domain work.
struct PreparedMachine {
    std::string id;
    ShaftAssembly shaft;
    MaterialSpec material;
    double E = 1.0, V = 1.0, X = 1.0, delta0 = 0.0;
    LinearShaftModel model;
    ShaftEquilibrium eq;
};

/// Loads the case and the shaft/material files of every shafted SG and solves
/// each machine's operating point.
class Study {
  public:
    explicit Study(const StudyConfig& config);

    const StudyConfig& config() const { return config_; }
    const NetworkCase& network() const { return case_; }
    const std::vector<PreparedMachine>& machines() const { return machines_; }
    const PreparedMachine& machine(const std::string& id) const;

    /// Step 1: per-generator limit profiles (parallel over machines).
    std::vector<LimitProfile> run_limits() const;
    /// Step 2: algebraic IFs at the configured perturbation.
    IFMatrix run_ifs() const;
    /// Step 3: screening/ranking plus the iterative LP.
    struct Plan {
        std::vector<SiteBound> bounds;
        LPResult lp;
        std::vector<std::string> generator_ids;  // IF row order
        std::vector<double> P_e_max_mw;          // aligned; +inf for shaftless SGs
    };
    Plan run_plan(const std::vector<LimitProfile>& profiles, const IFMatrix& IF) const;

    /// Validation leg: scenario through IFs into each shafted machine.
    ValidationReport run_validation(const Scenario& scenario, const IFMatrix& IF) const;

    std::vector<MachineStudy> machine_studies() const;

  private:
    StudyConfig config_;
    NetworkCase case_;
    std::vector<PreparedMachine> machines_;
};

Scenario parse_scenario(const std::string& path);
nlohmann::json serialize_scenario_spec(const std::vector<SiteWaveform>& sites, double duration_s,
                                       double rate_hz, const std::string& label);

}  // namespace torsilimit
