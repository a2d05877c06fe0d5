#pragma once

#include <string>
#include <vector>

#include "torsilimit/fatigue.hpp"
#include "torsilimit/shaft_dynamics.hpp"
#include "torsilimit/types.hpp"

namespace torsilimit {

/// Subsynchronous evaluation grid: coarse steps over (0, f_s) with fine
/// refinement windows around the model's undamped resonances so notch depth
/// is captured.
struct FrequencyGrid {
    std::vector<double> omega;  ///< rad/s, ascending
    double f_sync_hz = 60.0;

    std::vector<double> hz() const;
    /// Local spacing at grid point i (max of the two adjacent gaps), Hz.
    double local_step_hz(std::size_t i) const;
};

struct GridOptions {
    double step_hz = 0.05;
    double refine_step_hz = 0.005;
    double refine_span_hz = 0.3;
};

FrequencyGrid build_frequency_grid(double f_sync_hz, const GridOptions& opts,
                                   const std::vector<double>& resonance_centers_rad);

/// Per-frequency and multi-frequency allowable power variation of one SG.
struct LimitProfile {
    std::string generator;
    double mva = 0.0;
    FrequencyGrid grid;
    std::vector<std::vector<double>> P_tor_sections;  ///< [omega][section], MW
    std::vector<double> P_tor_max;                    ///< per-omega min over sections, MW
    std::vector<double> P_vib_max;                    ///< MW
    std::vector<double> P_max_curve;                  ///< elementwise min incl. cap, MW
    double P_e_max = 0.0;                             ///< infimum of the curve, MW
    double binding_omega = 0.0;                       ///< rad/s at the infimum
    double cap_fraction = 0.20;
    double cap_mw = 0.0;
    double delta_f_max_hz = 1.5;
    std::vector<double> allowable_amplitude;  ///< per section, stress units
};

/// Per-omega, per-section torsional limits sigma_max(r) / G_ri in p.u. power.
/// Infinite-gain sentinels map to a zero limit.
std::vector<std::vector<double>> torsional_limit_curve(
    const std::vector<FreqResponseSample>& samples, const std::vector<double>& allowables);

/// Per-omega blade-vibration limits delta_f_max / |G_f| in p.u. power.
std::vector<double> vibration_limit_curve(const std::vector<FreqResponseSample>& samples,
                                          double delta_f_max_hz);

/// Infimum of the combined per-frequency curve: bounds the SUM of amplitudes
/// of all subsynchronous components. MW.
double multi_frequency_bound(const LimitProfile& profile);

struct LimitOptions {
    double cap_fraction = 0.20;
    double delta_f_max_hz = 1.5;
    GridOptions grid;
};

/// Step 1.a + 1.b for one generator: sweeps the grid, forms torsional and
/// vibration curves, applies the absolute cap, and takes the infimum.
LimitProfile build_limit_profile(const std::string& generator_id, const ShaftAssembly& shaft,
                                 const MaterialSpec& material, const LinearShaftModel& model,
                                 const ShaftEquilibrium& eq, const LimitOptions& opts);

}  // namespace torsilimit
