#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "torsilimit/power_flow.hpp"
#include "torsilimit/types.hpp"

namespace torsilimit {

/// Internal EMF behind the subtransient impedance for each SG of the case,
/// from a converged base solution: E = V + (Ra + jXd'')*I.
std::vector<std::complex<double>> internal_emf(const NetworkCase& c,
                                               const PowerFlowSolution& base);

/// m x k table of algebraic interaction factors between SGs and DC buses.
struct IFMatrix {
    std::vector<std::string> generators;  // m SG ids (case order)
    std::vector<int> dc_buses;            // k bus ids
    Eigen::MatrixXd values;               // clamped magnitudes used for planning
    Eigen::MatrixXd raw;                  // signed values as solved
    std::vector<bool> column_valid;
    double perturbation_mw = 0.0;

    double at(const std::string& gen, int bus) const;
};

/// Step-2 load-flow machinery: base case, internal EMFs, and the augmented
/// network with internal buses slack and SG terminals re-typed PQ. Columns
/// may be solved concurrently; the engine itself is immutable after build.
class IfEngine {
  public:
    explicit IfEngine(const NetworkCase& c);

    struct ColumnResult {
        Eigen::VectorXd Pe_mw;        // per-SG power from the internal bus into the net
        double losses_mw = 0.0;       // per-branch I^2 R over the augmented network
        PowerFlowSolution solution;
    };

    const PowerFlowSolution& base() const { return base_; }
    const std::vector<std::complex<double>>& emfs() const { return emfs_; }
    /// Augmented solve with an extra constant-power load at `bus_id`.
    /// dp_mw = 0 reproduces the base operating point.
    ColumnResult solve(int bus_id, double dp_mw) const;

    IFMatrix compute(const std::vector<int>& dc_buses, double perturbation_mw) const;

    const NetworkCase& case_data() const { return case_; }
    static double default_perturbation_mw(const NetworkCase& c);

  private:
    NetworkCase case_;
    PowerFlowSolution base_;
    std::vector<std::complex<double>> emfs_;
    std::vector<int> sg_index_;  // generator indices that are SGs
    PowerFlowProblem aug_;
    Eigen::VectorXcd aug_init_;
    // Series elements for the branch-route loss computation: (from, to, y, tap).
    struct Series {
        int from, to;
        std::complex<double> y;
        double tap;
    };
    std::vector<Series> series_;
    ColumnResult base_column_;
};

/// Steps 2.1-2.4 in one call.
IFMatrix compute_if_matrix(const NetworkCase& c, const std::vector<int>& dc_buses,
                           double perturbation_mw = 0.0);

}  // namespace torsilimit
