#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "torsilimit/types.hpp"

namespace torsilimit {

/// Linearized multi-mass shaft coupled to an infinite bus through the
/// synchronizing torque coefficient Ke = E*V*cos(delta0)/X. State ordering is
/// (delta_1..delta_{N+1}, dw_1..dw_{N+1}) with delta in electrical radians and
/// dw in per-unit speed deviation; delta_dot = omega_s * dw.
struct LinearShaftModel {
    Eigen::MatrixXd A;
    Eigen::VectorXd B;          ///< forcing dPe (p.u. machine base) into the gen speed row
    Eigen::MatrixXd C_stress;   ///< N rows: section stress per state
    Eigen::RowVectorXd C_freq;  ///< generator frequency deviation, Hz
    double sync_coeff_Ke = 0.0;
    double omega_s = 0.0;
    int gen_index = 0;
    std::vector<double> stress_scale;  ///< per section, stress units per elect-rad of twist
    bool stress_in_si = false;         ///< true: MPa (geometry given); false: p.u. torque

    int num_masses() const { return static_cast<int>(A.rows() / 2); }
    int num_sections() const { return static_cast<int>(C_stress.rows()); }
};

/// Operating point of the shaft train at constant speed.
struct ShaftEquilibrium {
    double delta0 = 0.0;               ///< generator electrical angle, rad
    double Te0 = 0.0;                  ///< p.u. electromagnetic torque
    std::vector<double> delta;         ///< per-mass angles, elect. rad
    std::vector<double> section_torque;  ///< p.u. torque carried by each section
    std::vector<double> sigma_mean;    ///< nominal mean stress per section
};

struct FreqResponseSample {
    double omega = 0.0;                ///< elect. rad/s
    std::vector<double> stress_gain;   ///< per section, stress units per p.u. power
    std::vector<double> stress_phase;  ///< rad
    double freq_gain = 0.0;            ///< Hz per p.u. power
};

struct SimulationResult {
    double dt = 0.0;
    std::vector<double> time;
    Eigen::MatrixXd delta;     ///< (N+1) x steps
    Eigen::MatrixXd speed;     ///< (N+1) x steps, p.u. deviation
    Eigen::MatrixXd stress;    ///< N x steps
    std::vector<double> freq_dev;  ///< generator delta-f, Hz

    struct SectionStats {
        double sigma_max, sigma_min, sigma_a, sigma_m;
    };
    /// Eq.-(3)-style amplitude/mean over [t0, t1] for one section.
    SectionStats section_stats(int section, double t0, double t1) const;
};

LinearShaftModel build_linear_model(const ShaftAssembly& shaft, double E, double V, double X,
                                    double delta0);

/// Undamped natural frequencies of the free mass-spring chain, ascending,
/// rigid-body mode excluded. rad/s.
std::vector<double> torsional_modes(const ShaftAssembly& shaft);

/// Oscillatory eigenfrequencies of the coupled model with every damping term
/// zeroed (the chain plus the synchronizing spring). Ascending, rad/s. The
/// lowest entry is the electromechanical swing mode when Ke > 0.
std::vector<double> undamped_model_modes(const LinearShaftModel& model);

ShaftEquilibrium solve_equilibrium(const ShaftAssembly& shaft, const LinearShaftModel& model,
                                   double E, double V, double X, double delta0);

/// Evaluates C (jwI - A)^{-1} B at each omega. An exactly singular solve is
/// reported through infinite gains.
std::vector<FreqResponseSample> freq_response(const LinearShaftModel& model,
                                              const std::vector<double>& omegas);

/// Fixed-step RK4 integration of the full nonlinear train,
/// Te = (E V / X) sin(delta_gen) + u(t), from the supplied equilibrium.
/// Aborts with SimulationError if any |dw| exceeds 0.2 p.u.
SimulationResult simulate_nonlinear(const ShaftAssembly& shaft, const LinearShaftModel& model,
                                    const ShaftEquilibrium& eq, double E, double V, double X,
                                    const std::function<double(double)>& forcing_pu, double dt,
                                    double t_end);

/// Same integrator on the linear model (deviation states), for cross-checks.
SimulationResult simulate_linear(const LinearShaftModel& model, const ShaftEquilibrium& eq,
                                 const std::function<double(double)>& forcing_pu, double dt,
                                 double t_end);

}  // namespace torsilimit
