#pragma once

#include <optional>
#include <string>
#include <vector>

#include "torsilimit/interaction_factors.hpp"
#include "torsilimit/simplex.hpp"
#include "torsilimit/types.hpp"

namespace torsilimit {

/// Upper bound on one site's total subsynchronous fluctuation, MW.
struct SiteBound {
    int bus = 0;
    double P_dc_max = 0.0;
    std::string binding;  ///< generator id, or "compute_cap"
    double rating_mw = 0.0;
    bool existing = false;
};

struct SiteBoundOptions {
    double compute_fraction = 0.25;  ///< worst-case compute-period content vs rating
    double threshold_mw = 0.0;       ///< screening: drop sites below this bound
};

/// Step 3.1: per-site bounds min( min_i Pe_max(i)/IF_ij, compute cap ),
/// ranked descending (ties by ascending bus id). Zero IF entries impose no
/// constraint; an all-zero column leaves only the compute cap.
std::vector<SiteBound> site_bounds(const std::vector<double>& P_e_max_mw,
                                   const std::vector<std::string>& generator_ids,
                                   const IFMatrix& IF, const std::vector<DataCenterSite>& sites,
                                   const SiteBoundOptions& opts = {});

struct LPResult {
    std::vector<int> buses;
    std::vector<double> allocations_mw;
    double alpha_final = 0.0;
    int iterations = 0;
    bool feasible = false;
    bool nonunique = false;
    double total_mw = 0.0;
};

/// Step 3.2: iterative LP, alpha starting at 1 and stepping down by beta until
/// the LP turns feasible. Optional per-site objective weights (uniform default).
LPResult optimize_allocations(const std::vector<double>& P_e_max_mw, const IFMatrix& IF,
                              const std::vector<SiteBound>& bounds, double beta = 0.05,
                              const std::optional<std::vector<double>>& weights = std::nullopt);

struct ComplianceResult {
    bool pass = false;
    double amplitude_sum_mw = 0.0;
    double limit_mw = 0.0;
    std::vector<double> freq_hz;       // 0.1 Hz bins in (0, f_s)
    std::vector<double> amplitude_mw;  // single-sided
};

/// FFT compliance check over a 10 s window at 0.1 Hz resolution: the sum of
/// single-sided amplitudes over (0, f_sync) must not exceed the limit. The
/// mean is removed first; sampling must resolve the subsynchronous range
/// (rate >= 2 f_sync) and cover exactly 10 s.
ComplianceResult compliance_check(const std::vector<double>& samples_mw, double rate_hz,
                                  double limit_mw, double f_sync_hz = 60.0);

}  // namespace torsilimit
