#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "torsilimit/types.hpp"

namespace torsilimit {

/// Bus spec for the solver; all quantities p.u. on the system base.
struct SolverBus {
    BusType type = BusType::PQ;
    double p_inj = 0.0;   // specified net injection (PV, PQ)
    double q_inj = 0.0;   // specified net injection (PQ)
    double v_set = 1.0;   // magnitude setpoint (slack, PV)
    double theta_set = 0.0;  // angle (slack)
};

struct PowerFlowProblem {
    Eigen::MatrixXcd Y;
    std::vector<SolverBus> buses;
};

struct PowerFlowSolution {
    Eigen::VectorXcd V;      ///< complex bus voltages, p.u.
    Eigen::VectorXcd S_inj;  ///< net complex injections, p.u.
    int iterations = 0;
    double max_mismatch = 0.0;
};

struct NrOptions {
    double tolerance = 1e-8;
    int max_iterations = 30;
};

/// Ybus of the case: pi-model branches with off-nominal taps on the from side,
/// bus shunts, and constant-impedance loads folded in at nominal voltage.
Eigen::MatrixXcd build_ybus(const NetworkCase& c);

/// Base-case problem: types from the bus records, constant-power loads as PQ
/// injections, PV magnitudes from the generator setpoints.
PowerFlowProblem base_problem(const NetworkCase& c);

/// Full Newton-Raphson in polar form. Any number of slack buses is allowed
/// (their V and theta are simply excluded from the unknowns). Throws
/// PowerFlowError with the worst bus on divergence.
PowerFlowSolution solve_power_flow(const PowerFlowProblem& p,
                                   const Eigen::VectorXcd* init = nullptr,
                                   const NrOptions& opts = {});

PowerFlowSolution solve_power_flow(const NetworkCase& c, const Eigen::VectorXcd* init = nullptr,
                                   const NrOptions& opts = {});

/// Net real power absorbed by the passive network (sum of injections), p.u.
double net_absorption(const Eigen::MatrixXcd& Y, const Eigen::VectorXcd& V);

/// Diagonal of the short-circuit impedance matrix: X-only network with the
/// SG subtransient reactances as shunts, resistances and charging neglected.
/// Returns the driving-point reactance per bus, p.u. system base.
std::vector<double> zbus_diagonal_reactance(const NetworkCase& c);

}  // namespace torsilimit
