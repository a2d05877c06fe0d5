#include "torsilimit/dc_planner.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

namespace torsilimit {

std::vector<SiteBound> site_bounds(const std::vector<double>& P_e_max_mw,
                                   const std::vector<std::string>& generator_ids,
                                   const IFMatrix& IF, const std::vector<DataCenterSite>& sites,
                                   const SiteBoundOptions& opts) {
    if (sites.empty()) throw std::invalid_argument("site_bounds: empty site list");
    if (P_e_max_mw.size() != generator_ids.size())
        throw std::invalid_argument("site_bounds: limits/ids size mismatch");

    std::vector<SiteBound> out;
    for (const auto& site : sites) {
        auto bi = std::find(IF.dc_buses.begin(), IF.dc_buses.end(), site.bus);
        if (bi == IF.dc_buses.end())
            throw std::invalid_argument("site_bounds: bus " + std::to_string(site.bus) +
                                        " missing from IF matrix");
        Eigen::Index col = bi - IF.dc_buses.begin();

        SiteBound sb;
        sb.bus = site.bus;
        sb.rating_mw = site.rating_mw;
        sb.existing = site.existing;
        double grid_bound = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < generator_ids.size(); ++i) {
            auto gi = std::find(IF.generators.begin(), IF.generators.end(), generator_ids[i]);
            if (gi == IF.generators.end())
                throw std::invalid_argument("site_bounds: generator " + generator_ids[i] +
                                            " missing from IF matrix");
            double f = IF.values(gi - IF.generators.begin(), col);
            if (!(f > 0)) continue;  // no coupling, no constraint
            double cand = P_e_max_mw[i] / f;
            if (cand < grid_bound) {
                grid_bound = cand;
                sb.binding = generator_ids[i];
            }
        }
        double comp = opts.compute_fraction * site.rating_mw;
        if (std::isinf(grid_bound))
            std::cerr << "torsilimit: site at bus " << site.bus
                      << " has no generator coupling; compute cap only\n";
        if (comp <= grid_bound) {
            sb.P_dc_max = comp;
            sb.binding = "compute_cap";
        } else {
            sb.P_dc_max = grid_bound;
        }
        if (sb.P_dc_max >= opts.threshold_mw) out.push_back(sb);
    }

    std::sort(out.begin(), out.end(), [](const SiteBound& a, const SiteBound& b) {
        if (a.P_dc_max != b.P_dc_max) return a.P_dc_max > b.P_dc_max;
        return a.bus < b.bus;
    });
    return out;
}

LPResult optimize_allocations(const std::vector<double>& P_e_max_mw, const IFMatrix& IF,
                              const std::vector<SiteBound>& bounds, double beta,
                              const std::optional<std::vector<double>>& weights) {
    if (!(beta > 0.0) || !(beta < 1.0))
        throw std::invalid_argument("beta must lie in (0, 1)");
    if (bounds.empty()) throw std::invalid_argument("optimize_allocations: no sites");
    if (P_e_max_mw.size() != IF.generators.size())
        throw std::invalid_argument(
            "optimize_allocations: one limit per IF generator row required "
            "(use +inf for unconstrained machines)");
    const int k = static_cast<int>(bounds.size());
    if (weights && static_cast<int>(weights->size()) != k)
        throw std::invalid_argument("weights size mismatch");

    std::vector<int> rows;  // generators that actually constrain
    for (std::size_t i = 0; i < P_e_max_mw.size(); ++i)
        if (std::isfinite(P_e_max_mw[i])) rows.push_back(static_cast<int>(i));
    const int m = static_cast<int>(rows.size());

    Eigen::VectorXd c(k), ub(k);
    Eigen::MatrixXd A(m, k);
    Eigen::VectorXd b(m);
    for (int j = 0; j < k; ++j) {
        c(j) = weights ? (*weights)[j] : 1.0;
        ub(j) = bounds[j].P_dc_max;
        if (!(ub(j) > 0))
            throw std::invalid_argument("optimize_allocations: nonpositive site bound at bus " +
                                        std::to_string(bounds[j].bus));
    }
    for (int i = 0; i < m; ++i) {
        b(i) = P_e_max_mw[rows[i]];
        for (int j = 0; j < k; ++j)
            A(i, j) = IF.at(IF.generators[rows[i]], bounds[j].bus);
    }

    LPResult res;
    for (int j = 0; j < k; ++j) res.buses.push_back(bounds[j].bus);

    double alpha = 1.0;
    for (int q = 1;; ++q) {
        Eigen::VectorXd lb = alpha * ub;
        LpSolution lp = simplex_solve(c, A, b, lb, ub);
        res.iterations = q;
        if (lp.status == LpStatus::Optimal) {
            res.feasible = true;
            res.alpha_final = alpha;
            res.nonunique = lp.nonunique;
            res.allocations_mw.assign(lp.x.data(), lp.x.data() + k);
            res.total_mw = lp.x.sum();
            return res;
        }
        if (alpha <= 0.0) {
            res.feasible = false;  // only possible with a nonpositive Pe_max row
            res.alpha_final = 0.0;
            return res;
        }
        alpha = std::max(0.0, alpha - beta);
    }
}

ComplianceResult compliance_check(const std::vector<double>& samples_mw, double rate_hz,
                                  double limit_mw, double f_sync_hz) {
    constexpr double kWindowS = 10.0;
    constexpr double kResolutionHz = 0.1;
    if (rate_hz < 2.0 * f_sync_hz)
        throw std::invalid_argument("sampling rate too slow to capture the subsynchronous range");
    std::size_t n_expected = static_cast<std::size_t>(std::llround(rate_hz * kWindowS));
    if (samples_mw.size() != n_expected)
        throw std::invalid_argument("window must cover exactly 10 s: expected " +
                                    std::to_string(n_expected) + " samples, got " +
                                    std::to_string(samples_mw.size()));

    const std::size_t n = samples_mw.size();
    double mean = 0.0;
    for (double v : samples_mw) mean += v;
    mean /= static_cast<double>(n);

    ComplianceResult res;
    res.limit_mw = limit_mw;
    // Bin k sits at k * 0.1 Hz exactly (10 s rectangular window).
    int k_max = static_cast<int>(std::ceil(f_sync_hz / kResolutionHz)) - 1;
    double sum = 0.0;
    for (int k = 1; k <= k_max; ++k) {
        double re = 0.0, im = 0.0;
        const double dphi = -2.0 * kPi * k / static_cast<double>(n);
        const double cd = std::cos(dphi), sd = std::sin(dphi);
        double cr = 1.0, ci = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            double x = samples_mw[t] - mean;
            re += x * cr;
            im += x * ci;
            double cr2 = cr * cd - ci * sd;
            ci = cr * sd + ci * cd;
            cr = cr2;
        }
        double amp = 2.0 * std::hypot(re, im) / static_cast<double>(n);
        res.freq_hz.push_back(k * kResolutionHz);
        res.amplitude_mw.push_back(amp);
        sum += amp;
    }
    res.amplitude_sum_mw = sum;
    res.pass = sum <= limit_mw * (1.0 + 1e-9) + 1e-12;
    return res;
}

}  // namespace torsilimit
