#pragma once

#include <vector>

#include "torsilimit/types.hpp"

namespace torsilimit {

/// One counted stress cycle. count is 0.5 for residual half cycles, 1.0 otherwise.
struct Cycle {
    double range = 0.0;
    double mean = 0.0;
    double count = 1.0;
};

using CycleSet = std::vector<Cycle>;

/// Safe-region envelope in (mean, alternating) stress space: the Goodman line
/// from Se at zero mean to zero at Sut on the tensile side, constant Se on the
/// compressive side, both clipped by the first-cycle yield triangle.
class GoodmanEnvelope {
  public:
    explicit GoodmanEnvelope(const MaterialSpec& material);

    /// Maximum allowable alternating amplitude at mean stress sigma_m.
    /// Throws std::domain_error when |sigma_m| >= Sy (static yield already violated).
    double allowable_amplitude(double sigma_m) const;

    const MaterialSpec& material() const { return material_; }

  private:
    MaterialSpec material_;
};

/// ASTM E1049 rainflow counting (three-point rules, 5.4.4) after peak-valley
/// reduction. The residual path is counted as half cycles.
CycleSet rainflow(const std::vector<double>& series);

/// Collapses a sampled series to its sequence of reversal points.
std::vector<double> peak_valley(const std::vector<double>& series);

/// Palmgren-Miner damage fraction. Each cycle's amplitude is mean-corrected to
/// a fully reversed equivalent (Goodman, tensile means only), looked up on the
/// log-log interpolated S-N curve; amplitudes at or below Se contribute nothing,
/// amplitudes at or above Sut count as immediate failure (N = 1).
double miner_damage(const CycleSet& cycles, const MaterialSpec& material);

/// Cycles to failure at fully reversed amplitude, from the S-N curve:
/// log-log interpolation between points, extrapolation along the last segment
/// down to Se, clamp to N = 1 above the first point.
double sn_cycles_to_failure(double amplitude, const MaterialSpec& material);

}  // namespace torsilimit
