#pragma once

#include <optional>
#include <string>
#include <vector>

#include "torsilimit/fatigue.hpp"
#include "torsilimit/interaction_factors.hpp"
#include "torsilimit/shaft_dynamics.hpp"
#include "torsilimit/terminal_limits.hpp"
#include "torsilimit/types.hpp"

namespace torsilimit {

/// Per-site DC fluctuation time series sharing one time base.
struct Scenario {
    std::string label;
    double rate_hz = 2000.0;
    double duration_s = 40.0;
    double last_ramp_end_s = 0.0;  ///< when the last baseline ramp settles
    std::vector<int> buses;
    std::vector<std::vector<double>> series_mw;  // [site][sample]

    std::size_t samples() const { return series_mw.empty() ? 0 : series_mw.front().size(); }
};

/// Square-plus-tones waveform of one site: idle level, rate-limited step to
/// the compute level, and superimposed sinusoids (scaled in with the ramp).
struct SiteWaveform {
    int bus = 0;
    double idle_mw = 0.0;
    double compute_mw = 0.0;
    double step_time_s = 0.0;
    double ramp_limit_mw_per_s = 1e12;
    std::vector<FrequencyComponent> tones;  // omega rad/s, amplitude MW, phase rad
};

Scenario synthesize_scenario(const std::vector<SiteWaveform>& sites, double duration_s,
                             double rate_hz, const std::string& label = "scenario");

/// One machine's validation inputs: the shaft study at its operating point.
struct MachineStudy {
    std::string generator;
    const ShaftAssembly* shaft = nullptr;
    const MaterialSpec* material = nullptr;
    const LinearShaftModel* model = nullptr;
    const ShaftEquilibrium* eq = nullptr;
    double E = 1.0, V = 1.0, X = 1.0;
    double delta_f_max_hz = 1.5;
};

struct SectionVerdict {
    std::string section;
    double allowable = 0.0;      // stress units
    double steady_amplitude = 0.0;
    double transient_peak = 0.0;  // max |sigma - sigma_m0| over the whole run
    double damage = 0.0;
};

struct MachineVerdict {
    std::string generator;
    bool pass = false;
    double freq_dev_peak_hz = 0.0;
    double delta_f_max_hz = 1.5;
    std::vector<SectionVerdict> sections;
    std::string failure_reason;
};

struct ValidationOptions {
    double dt = 5e-4;
    double transient_exclude_s = 5.0;  ///< after each ramp, excluded from steady amplitude
    double steady_window_s = 10.0;     ///< trailing window for Eq.-(3) amplitude
    bool store_trajectories = false;
};

struct ValidationReport {
    std::string scenario;
    bool pass = false;
    std::vector<MachineVerdict> machines;
    std::vector<SimulationResult> trajectories;  // filled when requested
};

/// Maps the scenario through the IF matrix to each SG, integrates the
/// nonlinear train, and checks stress amplitudes, frequency deviation, and
/// Miner damage. PASS requires every section within its allowable, zero
/// accumulated damage, and |df| within the limit.
ValidationReport validate_scenario(const Scenario& scenario, const IFMatrix& IF,
                                   const std::vector<MachineStudy>& machines,
                                   const ValidationOptions& opts = {});

}  // namespace torsilimit
