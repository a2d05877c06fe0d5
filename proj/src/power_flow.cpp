#include "torsilimit/power_flow.hpp"

#include <algorithm>
#include <cmath>

namespace torsilimit {

using cplx = std::complex<double>;

Eigen::MatrixXcd build_ybus(const NetworkCase& c) {
    int n = static_cast<int>(c.buses.size());
    Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& br : c.branches) {
        if (!br.in_service) continue;
        int f = c.bus_index(br.from);
        int t = c.bus_index(br.to);
        cplx ys = 1.0 / cplx(br.r, br.x);
        cplx ysh(0.0, br.b / 2.0);
        double a = br.tap;
        Y(f, f) += (ys + ysh) / (a * a);
        Y(t, t) += ys + ysh;
        Y(f, t) -= ys / a;
        Y(t, f) -= ys / a;
    }
    for (int i = 0; i < n; ++i) {
        auto [g, b] = c.effective_shunt(c.buses[i].id);
        Y(i, i) += cplx(g, b);
    }
    return Y;
}

PowerFlowProblem base_problem(const NetworkCase& c) {
    c.validate();
    PowerFlowProblem p;
    p.Y = build_ybus(c);
    p.buses.resize(c.buses.size());
    for (std::size_t i = 0; i < c.buses.size(); ++i) {
        const Bus& b = c.buses[i];
        SolverBus& s = p.buses[i];
        s.type = b.type;
        s.v_set = b.vm;
        s.theta_set = b.angle_rad();
    }
    for (const auto& g : c.generators) {
        int i = c.bus_index(g.bus);
        p.buses[i].p_inj += g.p_mw / c.system_mva;
        if (p.buses[i].type != BusType::PQ) p.buses[i].v_set = g.v_setpoint;
    }
    for (const auto& l : c.loads) {
        if (l.model != LoadModel::ConstantPower) continue;
        int i = c.bus_index(l.bus);
        p.buses[i].p_inj -= l.p_mw / c.system_mva;
        p.buses[i].q_inj -= l.q_mvar / c.system_mva;
    }
    return p;
}

PowerFlowSolution solve_power_flow(const PowerFlowProblem& p, const Eigen::VectorXcd* init,
                                   const NrOptions& opts) {
    const int n = static_cast<int>(p.buses.size());

    Eigen::VectorXd vm(n), th(n);
    for (int i = 0; i < n; ++i) {
        if (init) {
            vm(i) = std::abs((*init)(i));
            th(i) = std::arg((*init)(i));
        } else {
            vm(i) = 1.0;
            th(i) = 0.0;
        }
        if (p.buses[i].type != BusType::PQ) vm(i) = p.buses[i].v_set;
        if (p.buses[i].type == BusType::Slack) th(i) = p.buses[i].theta_set;
    }

    // Unknowns: theta at PV+PQ buses, |V| at PQ buses.
    std::vector<int> th_idx, vm_idx;
    for (int i = 0; i < n; ++i) {
        if (p.buses[i].type != BusType::Slack) th_idx.push_back(i);
        if (p.buses[i].type == BusType::PQ) vm_idx.push_back(i);
    }
    const int nth = static_cast<int>(th_idx.size());
    const int nvm = static_cast<int>(vm_idx.size());

    auto injections = [&](Eigen::VectorXd& P, Eigen::VectorXd& Q) {
        for (int i = 0; i < n; ++i) {
            double pi = 0.0, qi = 0.0;
            for (int k = 0; k < n; ++k) {
                cplx y = p.Y(i, k);
                if (y == cplx(0.0, 0.0)) continue;
                double ang = th(i) - th(k);
                double c = std::cos(ang), s = std::sin(ang);
                pi += vm(i) * vm(k) * (y.real() * c + y.imag() * s);
                qi += vm(i) * vm(k) * (y.real() * s - y.imag() * c);
            }
            P(i) = pi;
            Q(i) = qi;
        }
    };

    Eigen::VectorXd P(n), Q(n);
    PowerFlowSolution sol;

    for (int iter = 0;; ++iter) {
        injections(P, Q);
        Eigen::VectorXd mis(nth + nvm);
        for (int a = 0; a < nth; ++a) mis(a) = p.buses[th_idx[a]].p_inj - P(th_idx[a]);
        for (int a = 0; a < nvm; ++a) mis(nth + a) = p.buses[vm_idx[a]].q_inj - Q(vm_idx[a]);

        double worst = mis.size() ? mis.cwiseAbs().maxCoeff() : 0.0;
        sol.iterations = iter;
        sol.max_mismatch = worst;
        if (worst <= opts.tolerance) break;
        if (iter >= opts.max_iterations || !std::isfinite(worst)) {
            int worst_local = 0;
            if (mis.size()) mis.cwiseAbs().maxCoeff(&worst_local);
            int worst_bus = worst_local < nth ? th_idx[worst_local] : vm_idx[worst_local - nth];
            throw PowerFlowError("power flow diverged after " + std::to_string(iter) +
                                     " iterations; worst mismatch " + std::to_string(worst) +
                                     " p.u. at bus index " + std::to_string(worst_bus),
                                 worst_bus, worst);
        }

        // Polar Jacobian: [dP/dth dP/dV; dQ/dth dQ/dV].
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(nth + nvm, nth + nvm);
        auto dP_dth = [&](int i, int k) {
            if (i == k) return -Q(i) - vm(i) * vm(i) * p.Y(i, i).imag();
            cplx y = p.Y(i, k);
            double ang = th(i) - th(k);
            return vm(i) * vm(k) * (y.real() * std::sin(ang) - y.imag() * std::cos(ang));
        };
        auto dP_dv = [&](int i, int k) {
            if (i == k) return P(i) / vm(i) + vm(i) * p.Y(i, i).real();
            cplx y = p.Y(i, k);
            double ang = th(i) - th(k);
            return vm(i) * (y.real() * std::cos(ang) + y.imag() * std::sin(ang));
        };
        auto dQ_dth = [&](int i, int k) {
            if (i == k) return P(i) - vm(i) * vm(i) * p.Y(i, i).real();
            cplx y = p.Y(i, k);
            double ang = th(i) - th(k);
            return -vm(i) * vm(k) * (y.real() * std::cos(ang) + y.imag() * std::sin(ang));
        };
        auto dQ_dv = [&](int i, int k) {
            if (i == k) return Q(i) / vm(i) - vm(i) * p.Y(i, i).imag();
            cplx y = p.Y(i, k);
            double ang = th(i) - th(k);
            return vm(i) * (y.real() * std::sin(ang) - y.imag() * std::cos(ang));
        };
        for (int a = 0; a < nth; ++a)
            for (int b = 0; b < nth; ++b) J(a, b) = dP_dth(th_idx[a], th_idx[b]);
        for (int a = 0; a < nth; ++a)
            for (int b = 0; b < nvm; ++b) J(a, nth + b) = dP_dv(th_idx[a], vm_idx[b]);
        for (int a = 0; a < nvm; ++a)
            for (int b = 0; b < nth; ++b) J(nth + a, b) = dQ_dth(vm_idx[a], th_idx[b]);
        for (int a = 0; a < nvm; ++a)
            for (int b = 0; b < nvm; ++b) J(nth + a, nth + b) = dQ_dv(vm_idx[a], vm_idx[b]);

        Eigen::VectorXd dx = J.partialPivLu().solve(mis);
        if (!dx.allFinite())
            throw PowerFlowError("singular power-flow Jacobian", th_idx.empty() ? 0 : th_idx[0],
                                 worst);
        for (int a = 0; a < nth; ++a) th(th_idx[a]) += dx(a);
        for (int a = 0; a < nvm; ++a) vm(vm_idx[a]) += dx(nth + a);
    }

    sol.V.resize(n);
    for (int i = 0; i < n; ++i) sol.V(i) = std::polar(vm(i), th(i));
    sol.S_inj = sol.V.cwiseProduct((p.Y * sol.V).conjugate());
    return sol;
}

PowerFlowSolution solve_power_flow(const NetworkCase& c, const Eigen::VectorXcd* init,
                                   const NrOptions& opts) {
    return solve_power_flow(base_problem(c), init, opts);
}

double net_absorption(const Eigen::MatrixXcd& Y, const Eigen::VectorXcd& V) {
    return (V.cwiseProduct((Y * V).conjugate())).real().sum();
}

std::vector<double> zbus_diagonal_reactance(const NetworkCase& c) {
    int n = static_cast<int>(c.buses.size());
    Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& br : c.branches) {
        if (!br.in_service) continue;
        int f = c.bus_index(br.from);
        int t = c.bus_index(br.to);
        cplx ys = 1.0 / cplx(0.0, br.x);
        double a = br.tap;
        Y(f, f) += ys / (a * a);
        Y(t, t) += ys;
        Y(f, t) -= ys / a;
        Y(t, f) -= ys / a;
    }
    bool any_source = false;
    for (const auto& g : c.generators) {
        if (!g.is_sg()) continue;
        double x_sys = g.subtransient_Xd2 * c.system_mva / g.mva;
        Y(c.bus_index(g.bus), c.bus_index(g.bus)) += 1.0 / cplx(0.0, x_sys);
        any_source = true;
    }
    if (!any_source) throw ValidationError("zbus: no SG sources to ground the network");
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Y);
    std::vector<double> out(n);
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
    for (int i = 0; i < n; ++i) {
        e(i) = 1.0;
        Eigen::VectorXcd z = lu.solve(e);
        out[i] = z(i).imag();
        e(i) = 0.0;
    }
    return out;
}

}  // namespace torsilimit
