#include "torsilimit/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace torsilimit {

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

double round9(double v) {
    if (!std::isfinite(v)) return v;
    return std::strtod(fmt9(v).c_str(), nullptr);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

std::string limits_csv(const LimitProfile& p) {
    std::ostringstream os;
    os << "f_hz,P_tor_max_MW,P_vib_max_MW,P_max_MW\n";
    auto hz = p.grid.hz();
    for (std::size_t i = 0; i < hz.size(); ++i)
        os << fmt9(hz[i]) << ',' << fmt9(p.P_tor_max[i]) << ',' << fmt9(p.P_vib_max[i]) << ','
           << fmt9(p.P_max_curve[i]) << '\n';
    return os.str();
}

ordered_json limits_summary_json(const std::vector<LimitProfile>& profiles) {
    ordered_json j;
    j["generators"] = ordered_json::array();
    for (const auto& p : profiles) {
        ordered_json g;
        g["id"] = p.generator;
        g["mva"] = round9(p.mva);
        g["P_e_max_MW"] = round9(p.P_e_max);
        g["binding_f_hz"] = round9(p.binding_omega / (2.0 * kPi));
        g["cap_MW"] = round9(p.cap_mw);
        g["cap_fraction"] = round9(p.cap_fraction);
        g["delta_f_max_hz"] = round9(p.delta_f_max_hz);
        g["allowable_amplitude"] = ordered_json::array();
        for (double a : p.allowable_amplitude) g["allowable_amplitude"].push_back(round9(a));
        j["generators"].push_back(g);
    }
    return j;
}

std::string freq_sweep_csv(const std::vector<FreqResponseSample>& samples,
                           const std::vector<std::string>& section_names) {
    std::ostringstream os;
    os << "f_hz";
    for (const auto& s : section_names) os << ",gain_" << s;
    os << ",freq_gain_hz_per_pu\n";
    for (const auto& s : samples) {
        os << fmt9(s.omega / (2.0 * kPi));
        for (double g : s.stress_gain) os << ',' << fmt9(g);
        os << ',' << fmt9(s.freq_gain) << '\n';
    }
    return os.str();
}

std::string if_matrix_csv(const IFMatrix& m) {
    std::ostringstream os;
    os << "generator";
    for (int b : m.dc_buses) os << ",bus_" << b;
    os << '\n';
    for (std::size_t i = 0; i < m.generators.size(); ++i) {
        os << m.generators[i];
        for (std::size_t j = 0; j < m.dc_buses.size(); ++j) os << ',' << fmt9(m.values(i, j));
        os << '\n';
    }
    return os.str();
}

ordered_json if_matrix_json(const IFMatrix& m) {
    ordered_json j;
    j["perturbation_mw"] = round9(m.perturbation_mw);
    j["generators"] = m.generators;
    j["dc_buses"] = m.dc_buses;
    j["values"] = ordered_json::array();
    j["raw"] = ordered_json::array();
    for (std::size_t i = 0; i < m.generators.size(); ++i) {
        ordered_json row = ordered_json::array(), raw_row = ordered_json::array();
        for (std::size_t k = 0; k < m.dc_buses.size(); ++k) {
            row.push_back(round9(m.values(i, k)));
            raw_row.push_back(round9(m.raw(i, k)));
        }
        j["values"].push_back(row);
        j["raw"].push_back(raw_row);
    }
    j["column_valid"] = m.column_valid;
    return j;
}

IFMatrix if_matrix_from_json(const nlohmann::json& j) {
    IFMatrix m;
    m.perturbation_mw = j.at("perturbation_mw").get<double>();
    m.generators = j.at("generators").get<std::vector<std::string>>();
    m.dc_buses = j.at("dc_buses").get<std::vector<int>>();
    auto rows = j.at("values");
    m.values.resize(m.generators.size(), m.dc_buses.size());
    m.raw.resize(m.generators.size(), m.dc_buses.size());
    for (std::size_t i = 0; i < m.generators.size(); ++i)
        for (std::size_t k = 0; k < m.dc_buses.size(); ++k) {
            m.values(i, k) = rows[i][k].get<double>();
            m.raw(i, k) = j.contains("raw") ? j["raw"][i][k].get<double>() : m.values(i, k);
        }
    m.column_valid = j.value("column_valid", std::vector<bool>(m.dc_buses.size(), true));
    return m;
}

ordered_json plan_json(const std::vector<SiteBound>& bounds, const LPResult& lp,
                       const std::vector<std::string>& generator_ids,
                       const std::vector<double>& P_e_max_mw, const IFMatrix& IF) {
    ordered_json j;
    j["sites"] = ordered_json::array();
    for (const auto& b : bounds)
        j["sites"].push_back({{"bus", b.bus},
                              {"P_dc_max_MW", round9(b.P_dc_max)},
                              {"binding", b.binding},
                              {"rating_MW", round9(b.rating_mw)},
                              {"existing", b.existing}});
    j["lp"] = {{"feasible", lp.feasible},
               {"alpha_final", round9(lp.alpha_final)},
               {"iterations", lp.iterations},
               {"nonunique", lp.nonunique},
               {"total_MW", round9(lp.total_mw)}};
    j["lp"]["allocations"] = ordered_json::array();
    for (std::size_t k = 0; k < lp.buses.size(); ++k)
        j["lp"]["allocations"].push_back(
            {{"bus", lp.buses[k]},
             {"P_dc_MW", lp.feasible ? round9(lp.allocations_mw[k]) : 0.0}});
    // Residual headroom per generator row under the optimal allocations.
    j["generators"] = ordered_json::array();
    for (std::size_t i = 0; i < generator_ids.size(); ++i) {
        double used = 0.0;
        if (lp.feasible)
            for (std::size_t k = 0; k < lp.buses.size(); ++k)
                used += IF.at(generator_ids[i], lp.buses[k]) * lp.allocations_mw[k];
        ordered_json g = {{"id", generator_ids[i]},
                          {"P_e_max_MW", std::isfinite(P_e_max_mw[i])
                                             ? ordered_json(round9(P_e_max_mw[i]))
                                             : ordered_json(nullptr)},
                          {"weighted_sum_MW", round9(used)}};
        if (std::isfinite(P_e_max_mw[i])) {
            g["margin_MW"] = round9(P_e_max_mw[i] - used);
            g["binding"] = P_e_max_mw[i] - used <= 1e-7 * std::max(1.0, P_e_max_mw[i]);
        }
        j["generators"].push_back(g);
    }
    return j;
}

std::string site_bounds_csv(const std::vector<SiteBound>& bounds) {
    std::ostringstream os;
    os << "rank,bus,P_dc_max_MW,binding,rating_MW,existing\n";
    int rank = 1;
    for (const auto& b : bounds)
        os << rank++ << ',' << b.bus << ',' << fmt9(b.P_dc_max) << ',' << b.binding << ','
           << fmt9(b.rating_mw) << ',' << (b.existing ? 1 : 0) << '\n';
    return os.str();
}

std::string trajectory_csv(const SimulationResult& sim, const std::vector<std::string>& mass_names,
                           const std::vector<std::string>& section_names, std::size_t stride) {
    std::ostringstream os;
    os << "t_s";
    for (const auto& m : mass_names) os << ",delta_" << m;
    for (const auto& s : section_names) os << ",sigma_" << s;
    os << ",freq_dev_hz\n";
    for (std::size_t i = 0; i < sim.time.size(); i += stride) {
        os << fmt9(sim.time[i]);
        for (Eigen::Index r = 0; r < sim.delta.rows(); ++r) os << ',' << fmt9(sim.delta(r, i));
        for (Eigen::Index r = 0; r < sim.stress.rows(); ++r) os << ',' << fmt9(sim.stress(r, i));
        os << ',' << fmt9(sim.freq_dev[i]) << '\n';
    }
    return os.str();
}

std::string cycles_csv(const CycleSet& cycles) {
    std::ostringstream os;
    os << "range,mean,count\n";
    for (const auto& c : cycles)
        os << fmt9(c.range) << ',' << fmt9(c.mean) << ',' << fmt9(c.count) << '\n';
    return os.str();
}

ordered_json verdict_json(const ValidationReport& report) {
    ordered_json j;
    j["scenario"] = report.scenario;
    j["pass"] = report.pass;
    j["machines"] = ordered_json::array();
    for (const auto& m : report.machines) {
        ordered_json mj;
        mj["generator"] = m.generator;
        mj["pass"] = m.pass;
        if (!m.failure_reason.empty()) mj["reason"] = m.failure_reason;
        mj["freq_dev_peak_hz"] = round9(m.freq_dev_peak_hz);
        mj["delta_f_max_hz"] = round9(m.delta_f_max_hz);
        mj["sections"] = ordered_json::array();
        for (const auto& s : m.sections) {
            mj["sections"].push_back(
                {{"section", s.section},
                 {"allowable", round9(s.allowable)},
                 {"steady_amplitude", round9(s.steady_amplitude)},
                 {"transient_peak", round9(s.transient_peak)},
                 {"steady_ratio", round9(s.allowable > 0 ? s.steady_amplitude / s.allowable : 0)},
                 {"peak_ratio", round9(s.allowable > 0 ? s.transient_peak / s.allowable : 0)},
                 {"damage", round9(s.damage)}});
        }
        j["machines"].push_back(mj);
    }
    return j;
}

std::string spectrum_csv(const ComplianceResult& r) {
    std::ostringstream os;
    os << "f_hz,amplitude_MW\n";
    for (std::size_t i = 0; i < r.freq_hz.size(); ++i)
        os << fmt9(r.freq_hz[i]) << ',' << fmt9(r.amplitude_mw[i]) << '\n';
    return os.str();
}

ordered_json compliance_json(const ComplianceResult& r, int bus) {
    ordered_json j;
    j["bus"] = bus;
    j["pass"] = r.pass;
    j["amplitude_sum_MW"] = round9(r.amplitude_sum_mw);
    j["limit_MW"] = round9(r.limit_mw);
    return j;
}

}  // namespace torsilimit
