#include "torsilimit/interaction_factors.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "torsilimit/parallel.hpp"

namespace torsilimit {

using cplx = std::complex<double>;

std::vector<cplx> internal_emf(const NetworkCase& c, const PowerFlowSolution& base) {
    std::vector<cplx> out;
    for (const auto& g : c.generators) {
        if (!g.is_sg()) continue;
        int i = c.bus_index(g.bus);
        cplx v = base.V(i);
        // Generator current covers the bus net injection plus the local
        // constant-power load (constant-impedance parts sit in the network).
        cplx s_gen = base.S_inj(i);
        for (const auto& l : c.loads)
            if (l.bus == g.bus && l.model == LoadModel::ConstantPower)
                s_gen += cplx(l.p_mw, l.q_mvar) / c.system_mva;
        if (std::abs(v) < 1e-9)
            throw ValidationError("internal_emf: zero terminal voltage at generator " + g.id);
        cplx i_gen = std::conj(s_gen / v);
        double base_ratio = c.system_mva / g.mva;
        cplx z(g.armature_Ra * base_ratio, g.subtransient_Xd2 * base_ratio);
        out.push_back(v + z * i_gen);
    }
    return out;
}

double IFMatrix::at(const std::string& gen, int bus) const {
    auto gi = std::find(generators.begin(), generators.end(), gen);
    auto bi = std::find(dc_buses.begin(), dc_buses.end(), bus);
    if (gi == generators.end() || bi == dc_buses.end())
        throw std::out_of_range("IFMatrix::at: unknown generator or bus");
    return values(gi - generators.begin(), bi - dc_buses.begin());
}

double IfEngine::default_perturbation_mw(const NetworkCase& c) {
    double total_load = 0.0;
    for (const auto& l : c.loads) total_load += l.p_mw;
    return std::max(1.0, 0.001 * total_load);
}

IfEngine::IfEngine(const NetworkCase& c) : case_(c) {
    case_.validate();
    base_ = solve_power_flow(case_);
    emfs_ = internal_emf(case_, base_);

    for (std::size_t gi = 0; gi < case_.generators.size(); ++gi)
        if (case_.generators[gi].is_sg()) sg_index_.push_back(static_cast<int>(gi));
    if (sg_index_.empty()) throw ValidationError("IF computation needs at least one SG");
    {
        int slack_bus = case_.buses[case_.slack_index()].id;
        bool slack_is_sg = false;
        for (int gi : sg_index_)
            if (case_.generators[gi].bus == slack_bus) slack_is_sg = true;
        if (!slack_is_sg)
            throw ValidationError("the slack bus must host a synchronous generator");
    }

    // Augmented network: n original buses + one internal bus per SG.
    const int n = static_cast<int>(case_.buses.size());
    const int m = static_cast<int>(sg_index_.size());
    aug_.Y = Eigen::MatrixXcd::Zero(n + m, n + m);
    aug_.Y.topLeftCorner(n, n) = build_ybus(case_);

    for (const auto& br : case_.branches) {
        if (!br.in_service) continue;
        series_.push_back(
            {case_.bus_index(br.from), case_.bus_index(br.to), 1.0 / cplx(br.r, br.x), br.tap});
    }

    aug_.buses.assign(n + m, SolverBus{});
    for (int i = 0; i < n; ++i) {
        const Bus& b = case_.buses[i];
        SolverBus& s = aug_.buses[i];
        s.type = b.type == BusType::Slack ? BusType::PQ : b.type;  // re-typed below as needed
        s.v_set = b.vm;
    }
    // Non-SG generators (GFL IBRs) keep their PV behavior and injections.
    for (const auto& g : case_.generators) {
        if (g.is_sg()) continue;
        int i = case_.bus_index(g.bus);
        aug_.buses[i].p_inj += g.p_mw / case_.system_mva;
        if (aug_.buses[i].type == BusType::PV) aug_.buses[i].v_set = g.v_setpoint;
    }
    for (const auto& l : case_.loads) {
        if (l.model != LoadModel::ConstantPower) continue;
        int i = case_.bus_index(l.bus);
        aug_.buses[i].p_inj -= l.p_mw / case_.system_mva;
        aug_.buses[i].q_inj -= l.q_mvar / case_.system_mva;
    }

    for (int j = 0; j < m; ++j) {
        const Generator& g = case_.generators[sg_index_[j]];
        int t = case_.bus_index(g.bus);
        int ib = n + j;
        double ratio = case_.system_mva / g.mva;
        cplx y = 1.0 / cplx(g.armature_Ra * ratio, g.subtransient_Xd2 * ratio);
        aug_.Y(t, t) += y;
        aug_.Y(ib, ib) += y;
        aug_.Y(t, ib) -= y;
        aug_.Y(ib, t) -= y;
        series_.push_back({ib, t, y, 1.0});

        // SG terminals become PQ carrying only the local load; generation now
        // arrives from the internal slack through the subtransient branch.
        aug_.buses[t].type = BusType::PQ;
        aug_.buses[ib].type = BusType::Slack;
        aug_.buses[ib].v_set = std::abs(emfs_[j]);
        aug_.buses[ib].theta_set = std::arg(emfs_[j]);
    }

    aug_init_.resize(n + m);
    aug_init_.head(n) = base_.V;
    for (int j = 0; j < m; ++j) aug_init_(n + j) = emfs_[j];

    base_column_ = solve(case_.datacenters.empty() ? case_.buses.front().id
                                                   : case_.datacenters.front().bus,
                         0.0);
}

IfEngine::ColumnResult IfEngine::solve(int bus_id, double dp_mw) const {
    int t = case_.bus_index(bus_id);
    if (t < 0) throw ValidationError("IF perturbation at unknown bus " + std::to_string(bus_id));

    PowerFlowProblem prob = aug_;
    // Unity-power-factor constant-power load delta.
    prob.buses[t].p_inj -= dp_mw / case_.system_mva;

    ColumnResult col;
    col.solution = solve_power_flow(prob, &aug_init_);
    const int n = static_cast<int>(case_.buses.size());
    const int m = static_cast<int>(sg_index_.size());
    col.Pe_mw.resize(m);
    for (int j = 0; j < m; ++j)
        col.Pe_mw(j) = col.solution.S_inj(n + j).real() * case_.system_mva;

    double loss_pu = 0.0;
    for (const auto& se : series_) {
        cplx i_series = se.y * (col.solution.V(se.from) / se.tap - col.solution.V(se.to));
        double r = (1.0 / se.y).real();
        loss_pu += std::norm(i_series) * r;
    }
    col.losses_mw = loss_pu * case_.system_mva;
    return col;
}

IFMatrix IfEngine::compute(const std::vector<int>& dc_buses, double perturbation_mw) const {
    if (dc_buses.empty()) throw std::invalid_argument("no DC buses given");
    double dp = perturbation_mw > 0 ? perturbation_mw : default_perturbation_mw(case_);

    const int m = static_cast<int>(sg_index_.size());
    const int k = static_cast<int>(dc_buses.size());
    IFMatrix out;
    for (int j : sg_index_) out.generators.push_back(case_.generators[j].id);
    out.dc_buses = dc_buses;
    out.perturbation_mw = dp;
    out.values.setZero(m, k);
    out.raw.setZero(m, k);
    out.column_valid.assign(k, true);

    parallel_for(static_cast<std::size_t>(k), [&](std::size_t jc) {
        try {
            ColumnResult col = solve(dc_buses[jc], dp);
            for (int i = 0; i < m; ++i)
                out.raw(i, jc) = (col.Pe_mw(i) - base_column_.Pe_mw(i)) / dp;
        } catch (const PowerFlowError&) {
            out.column_valid[jc] = false;
            for (int i = 0; i < m; ++i) out.raw(i, jc) = std::nan("");
        }
    });

    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < k; ++j) {
            double v = out.raw(i, j);
            if (v < 0) {
                std::cerr << "torsilimit: negative IF " << v << " for " << out.generators[i]
                          << " at bus " << dc_buses[j] << "; using |IF| (conservative)\n";
                v = -v;
            }
            out.values(i, j) = v;
        }
    }
    return out;
}

IFMatrix compute_if_matrix(const NetworkCase& c, const std::vector<int>& dc_buses,
                           double perturbation_mw) {
    return IfEngine(c).compute(dc_buses, perturbation_mw);
}

}  // namespace torsilimit
