#include "torsilimit/shaft_dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "torsilimit/parallel.hpp"

namespace torsilimit {

namespace {

Eigen::MatrixXd chain_stiffness(const ShaftAssembly& shaft) {
    int n = shaft.num_masses();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
    for (int r = 0; r < shaft.num_sections(); ++r) {
        double k = shaft.sections[r].stiffness_K;
        K(r, r) += k;
        K(r + 1, r + 1) += k;
        K(r, r + 1) -= k;
        K(r + 1, r) -= k;
    }
    return K;
}

Eigen::MatrixXd chain_damping(const ShaftAssembly& shaft) {
    int n = shaft.num_masses();
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (int r = 0; r < shaft.num_sections(); ++r) {
        double d = shaft.sections[r].mutual_damping;
        D(r, r) += d;
        D(r + 1, r + 1) += d;
        D(r, r + 1) -= d;
        D(r + 1, r) -= d;
    }
    for (int r = 0; r < n; ++r) D(r, r) += shaft.masses[r].self_damping;
    return D;
}

std::vector<double> stress_scales(const ShaftAssembly& shaft, bool& in_si) {
    std::vector<double> scale(shaft.num_sections());
    in_si = !shaft.sections.empty() && shaft.sections.front().has_geometry();
    for (int r = 0; r < shaft.num_sections(); ++r) {
        const auto& s = shaft.sections[r];
        if (in_si) {
            // Eq.-(2) form: sigma = (G R / l) * theta_twist, theta = (2/p_f) delta. MPa.
            scale[r] =
                (s.shear_modulus_G * *s.radius_R / *s.length_l) * (2.0 / shaft.pole_count) / 1e6;
        } else {
            // Per-unit: section torque K * twist, normalized downstream by the allowable.
            scale[r] = s.stiffness_K;
        }
    }
    return scale;
}

/// Undamped frequencies of M^{-1} K with M = diag(2H / omega_s), rigid modes dropped.
std::vector<double> undamped_frequencies(const ShaftAssembly& shaft, const Eigen::MatrixXd& K) {
    int n = shaft.num_masses();
    Eigen::VectorXd inv_sqrt_m(n);
    for (int r = 0; r < n; ++r)
        inv_sqrt_m(r) = 1.0 / std::sqrt(2.0 * shaft.masses[r].inertia_H / shaft.sync_speed);
    Eigen::MatrixXd S = inv_sqrt_m.asDiagonal() * K * inv_sqrt_m.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
    if (eig.info() != Eigen::Success)
        throw Error(shaft.name + ": eigenvalue solve failed");
    std::vector<double> out;
    double lmax = eig.eigenvalues().cwiseAbs().maxCoeff();
    for (int i = 0; i < n; ++i) {
        double l = eig.eigenvalues()(i);
        if (l > 1e-9 * std::max(lmax, 1.0)) out.push_back(std::sqrt(l));
    }
    return out;
}

}  // namespace

std::vector<double> torsional_modes(const ShaftAssembly& shaft) {
    shaft.validate();
    return undamped_frequencies(shaft, chain_stiffness(shaft));
}

std::vector<double> undamped_model_modes(const LinearShaftModel& model) {
    int n = model.num_masses();
    Eigen::MatrixXd minus_m_inv_k = model.A.block(n, 0, n, n);
    Eigen::MatrixXd m_inv_k = -minus_m_inv_k * model.omega_s;  // delta_ddot = -(M^-1 K) ws delta
    Eigen::EigenSolver<Eigen::MatrixXd> eig(m_inv_k);
    std::vector<double> out;
    double lmax = eig.eigenvalues().cwiseAbs().maxCoeff();
    for (int i = 0; i < n; ++i) {
        double l = eig.eigenvalues()(i).real();
        if (l > 1e-9 * std::max(lmax, 1.0)) out.push_back(std::sqrt(l));
    }
    std::sort(out.begin(), out.end());
    return out;
}

LinearShaftModel build_linear_model(const ShaftAssembly& shaft, double E, double V, double X,
                                    double delta0) {
    shaft.validate();
    if (!(X > 0)) throw std::domain_error("infinite-bus reactance must be positive");
    if (!(std::abs(delta0) < kPi / 2))
        throw std::domain_error("no stable equilibrium at |delta0| >= pi/2");

    int n = shaft.num_masses();
    int g = shaft.generator_index();
    double ws = shaft.sync_speed;

    LinearShaftModel m;
    m.omega_s = ws;
    m.gen_index = g;
    m.sync_coeff_Ke = E * V * std::cos(delta0) / X;

    Eigen::MatrixXd K = chain_stiffness(shaft);
    K(g, g) += m.sync_coeff_Ke;  // synchronizing component of Te only
    Eigen::MatrixXd D = chain_damping(shaft);

    Eigen::VectorXd inv_m(n);
    for (int r = 0; r < n; ++r) inv_m(r) = 1.0 / (2.0 * shaft.masses[r].inertia_H);

    m.A = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    m.A.block(0, n, n, n) = ws * Eigen::MatrixXd::Identity(n, n);
    m.A.block(n, 0, n, n) = -(inv_m.asDiagonal() * K);
    m.A.block(n, n, n, n) = -(inv_m.asDiagonal() * D);

    m.B = Eigen::VectorXd::Zero(2 * n);
    m.B(n + g) = -inv_m(g);  // exogenous dPe enters as decelerating torque at the generator

    m.stress_scale = stress_scales(shaft, m.stress_in_si);
    m.C_stress = Eigen::MatrixXd::Zero(shaft.num_sections(), 2 * n);
    for (int r = 0; r < shaft.num_sections(); ++r) {
        m.C_stress(r, r) = m.stress_scale[r];
        m.C_stress(r, r + 1) = -m.stress_scale[r];
    }
    m.C_freq = Eigen::RowVectorXd::Zero(2 * n);
    m.C_freq(n + g) = shaft.sync_freq_hz();
    return m;
}

ShaftEquilibrium solve_equilibrium(const ShaftAssembly& shaft, const LinearShaftModel& model,
                                   double E, double V, double X, double delta0) {
    int n = shaft.num_masses();
    int g = shaft.generator_index();
    int ns = shaft.num_sections();

    ShaftEquilibrium eq;
    eq.delta0 = delta0;
    eq.Te0 = E * V * std::sin(delta0) / X;

    // Torque carried by section r = net mechanical input of masses 0..r.
    eq.section_torque.assign(ns, 0.0);
    double acc = 0.0;
    for (int r = 0; r < ns; ++r) {
        const auto& mass = shaft.masses[r];
        if (mass.applies_mech_torque) acc += mass.tm_fraction * eq.Te0;
        if (r == g) acc -= eq.Te0;
        eq.section_torque[r] = acc;
    }

    eq.delta.assign(n, delta0);
    for (int r = g - 1; r >= 0; --r)
        eq.delta[r] = eq.delta[r + 1] + eq.section_torque[r] / shaft.sections[r].stiffness_K;
    for (int r = g + 1; r < n; ++r)
        eq.delta[r] = eq.delta[r - 1] - eq.section_torque[r - 1] / shaft.sections[r - 1].stiffness_K;

    eq.sigma_mean.assign(ns, 0.0);
    for (int r = 0; r < ns; ++r)
        eq.sigma_mean[r] = model.stress_scale[r] * (eq.delta[r] - eq.delta[r + 1]);
    return eq;
}

std::vector<FreqResponseSample> freq_response(const LinearShaftModel& model,
                                              const std::vector<double>& omegas) {
    int dim = static_cast<int>(model.A.rows());
    int ns = model.num_sections();
    std::vector<FreqResponseSample> out(omegas.size());

    Eigen::MatrixXcd Ac = model.A.cast<std::complex<double>>();
    Eigen::VectorXcd Bc = model.B.cast<std::complex<double>>();
    Eigen::MatrixXcd Cs = model.C_stress.cast<std::complex<double>>();
    Eigen::RowVectorXcd Cf = model.C_freq.cast<std::complex<double>>();

    parallel_for(omegas.size(), [&](std::size_t i) {
        double w = omegas[i];
        FreqResponseSample s;
        s.omega = w;
        Eigen::MatrixXcd lhs = std::complex<double>(0.0, w) *
                                   Eigen::MatrixXcd::Identity(dim, dim) -
                               Ac;
        Eigen::VectorXcd x = lhs.partialPivLu().solve(Bc);
        s.stress_gain.resize(ns);
        s.stress_phase.resize(ns);
        if (!x.allFinite()) {
            // Pole hit exactly (undamped resonance): infinite-gain sentinel.
            std::fill(s.stress_gain.begin(), s.stress_gain.end(),
                      std::numeric_limits<double>::infinity());
            std::fill(s.stress_phase.begin(), s.stress_phase.end(), 0.0);
            s.freq_gain = std::numeric_limits<double>::infinity();
        } else {
            Eigen::VectorXcd sig = Cs * x;
            for (int r = 0; r < ns; ++r) {
                s.stress_gain[r] = std::abs(sig(r));
                s.stress_phase[r] = std::arg(sig(r));
            }
            s.freq_gain = std::abs((Cf * x)(0));
        }
        out[i] = std::move(s);
    });
    return out;
}

namespace {

struct Integrator {
    std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)> deriv;

    void rk4_step(double t, double dt, Eigen::VectorXd& y, Eigen::VectorXd& k1,
                  Eigen::VectorXd& k2, Eigen::VectorXd& k3, Eigen::VectorXd& k4,
                  Eigen::VectorXd& tmp) const {
        deriv(t, y, k1);
        tmp = y + 0.5 * dt * k1;
        deriv(t + 0.5 * dt, tmp, k2);
        tmp = y + 0.5 * dt * k2;
        deriv(t + 0.5 * dt, tmp, k3);
        tmp = y + dt * k3;
        deriv(t + dt, tmp, k4);
        y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
};

void check_dt(const ShaftAssembly& shaft, double dt) {
    auto modes = torsional_modes(shaft);
    if (modes.empty()) return;
    double w_max = modes.back();
    double dt_max = 2.0 * kPi / (20.0 * w_max);
    if (dt > dt_max * (1.0 + 1e-12))
        throw std::invalid_argument("dt " + std::to_string(dt) +
                                    " too coarse for highest torsional mode; need <= " +
                                    std::to_string(dt_max));
}

SimulationResult run_sim(int n, int ns, double ws, const LinearShaftModel& model,
                         const ShaftEquilibrium* eq_offsets, const Integrator& integ,
                         Eigen::VectorXd y, double dt, double t_end) {
    int steps = static_cast<int>(std::llround(t_end / dt)) + 1;
    SimulationResult res;
    res.dt = dt;
    res.time.resize(steps);
    res.delta.resize(n, steps);
    res.speed.resize(n, steps);
    res.stress.resize(ns, steps);
    res.freq_dev.resize(steps);

    double f_s = ws / (2.0 * kPi);
    Eigen::VectorXd k1(2 * n), k2(2 * n), k3(2 * n), k4(2 * n), tmp(2 * n);

    for (int s = 0; s < steps; ++s) {
        double t = s * dt;
        res.time[s] = t;
        for (int r = 0; r < n; ++r) {
            // Linear states are deviations; add the equilibrium angles back.
            res.delta(r, s) = y(r) + (eq_offsets ? eq_offsets->delta[r] : 0.0);
            res.speed(r, s) = y(n + r);
        }
        for (int r = 0; r < ns; ++r) {
            double twist = res.delta(r, s) - res.delta(r + 1, s);
            res.stress(r, s) = model.stress_scale[r] * twist;
        }
        res.freq_dev[s] = f_s * y(n + model.gen_index);

        double wmax = y.segment(n, n).cwiseAbs().maxCoeff();
        if (wmax > 0.2)
            throw SimulationError("simulation unstable: |speed deviation| = " +
                                  std::to_string(wmax) + " p.u. at t = " + std::to_string(t) +
                                  " s");
        if (s + 1 < steps) integ.rk4_step(t, dt, y, k1, k2, k3, k4, tmp);
    }
    return res;
}

}  // namespace

SimulationResult simulate_nonlinear(const ShaftAssembly& shaft, const LinearShaftModel& model,
                                    const ShaftEquilibrium& eq, double E, double V, double X,
                                    const std::function<double(double)>& forcing_pu, double dt,
                                    double t_end) {
    check_dt(shaft, dt);
    int n = shaft.num_masses();
    int ns = shaft.num_sections();
    int g = shaft.generator_index();
    double ws = shaft.sync_speed;
    double evx = E * V / X;

    std::vector<double> k(ns), d_mut(ns), h2(n), d_self(n), tm(n);
    for (int r = 0; r < ns; ++r) {
        k[r] = shaft.sections[r].stiffness_K;
        d_mut[r] = shaft.sections[r].mutual_damping;
    }
    for (int r = 0; r < n; ++r) {
        h2[r] = 2.0 * shaft.masses[r].inertia_H;
        d_self[r] = shaft.masses[r].self_damping;
        tm[r] = shaft.masses[r].applies_mech_torque ? shaft.masses[r].tm_fraction * eq.Te0 : 0.0;
    }

    Integrator integ;
    integ.deriv = [&, n, ns, g](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        double te = evx * std::sin(y(g)) + forcing_pu(t);
        for (int r = 0; r < n; ++r) {
            dy(r) = ws * y(n + r);
            double torque = tm[r] - (r == g ? te : 0.0) - d_self[r] * y(n + r);
            if (r > 0)
                torque -= k[r - 1] * (y(r) - y(r - 1)) + d_mut[r - 1] * (y(n + r) - y(n + r - 1));
            if (r < ns)
                torque -= k[r] * (y(r) - y(r + 1)) + d_mut[r] * (y(n + r) - y(n + r + 1));
            dy(n + r) = torque / h2[r];
        }
    };

    Eigen::VectorXd y = Eigen::VectorXd::Zero(2 * n);
    for (int r = 0; r < n; ++r) y(r) = eq.delta[r];
    return run_sim(n, ns, ws, model, nullptr, integ, std::move(y), dt, t_end);
}

SimulationResult simulate_linear(const LinearShaftModel& model, const ShaftEquilibrium& eq,
                                 const std::function<double(double)>& forcing_pu, double dt,
                                 double t_end) {
    int n = model.num_masses();
    Integrator integ;
    integ.deriv = [&](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        dy = model.A * y + model.B * forcing_pu(t);
    };
    Eigen::VectorXd y = Eigen::VectorXd::Zero(2 * n);
    return run_sim(n, model.num_sections(), model.omega_s, model, &eq, integ, std::move(y), dt,
                   t_end);
}

SimulationResult::SectionStats SimulationResult::section_stats(int section, double t0,
                                                               double t1) const {
    SectionStats st{-std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity(), 0.0, 0.0};
    for (std::size_t s = 0; s < time.size(); ++s) {
        if (time[s] < t0 || time[s] > t1) continue;
        double v = stress(section, s);
        st.sigma_max = std::max(st.sigma_max, v);
        st.sigma_min = std::min(st.sigma_min, v);
    }
    if (st.sigma_max < st.sigma_min)
        throw std::invalid_argument("empty stats window");
    st.sigma_a = 0.5 * (st.sigma_max - st.sigma_min);
    st.sigma_m = 0.5 * (st.sigma_max + st.sigma_min);
    return st;
}

}  // namespace torsilimit
