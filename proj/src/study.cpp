#include "torsilimit/study.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include <nlohmann/json.hpp>

#include "torsilimit/parallel.hpp"
#include "torsilimit/power_flow.hpp"

namespace torsilimit {

namespace fs = std::filesystem;
using nlohmann::json;

StudyConfig StudyConfig::from_file(const std::string& path) {
    return from_json(load_json_file(path), fs::path(path).parent_path().string());
}

StudyConfig StudyConfig::from_json(const json& j, const std::string& config_dir) {
    StudyConfig c;
    auto resolve = [&](const std::string& p) {
        if (p.empty() || fs::path(p).is_absolute() || config_dir.empty()) return p;
        return (fs::path(config_dir) / p).string();
    };
    c.case_file = resolve(j.value("case", ""));
    c.out_dir = j.value("out_dir", std::string("out"));
    c.shaft_dir = resolve(j.value("shaft_dir", ""));
    c.material_dir = resolve(j.value("material_dir", ""));
    c.cap_fraction = j.value("cap_fraction", 0.20);
    c.delta_f_max_hz = j.value("delta_f_max_hz", 1.5);
    c.beta = j.value("beta", 0.05);
    c.perturbation_mw = j.value("perturbation_mw", 0.0);
    c.threshold_mw = j.value("threshold_mw", 0.0);
    c.compute_fraction = j.value("compute_fraction", 0.25);
    if (j.contains("grid")) {
        const json& g = j["grid"];
        c.grid.step_hz = g.value("step_hz", c.grid.step_hz);
        c.grid.refine_step_hz = g.value("refine_step_hz", c.grid.refine_step_hz);
        c.grid.refine_span_hz = g.value("refine_span_hz", c.grid.refine_span_hz);
    }
    if (j.contains("sim")) {
        const json& s = j["sim"];
        c.sim.dt = s.value("dt", c.sim.dt);
        c.sim.transient_exclude_s = s.value("transient_exclude_s", c.sim.transient_exclude_s);
        c.sim.steady_window_s = s.value("steady_window_s", c.sim.steady_window_s);
        c.sim.store_trajectories = s.value("store_trajectories", c.sim.store_trajectories);
    }
    if (j.contains("machines")) {
        for (auto it = j["machines"].begin(); it != j["machines"].end(); ++it) {
            MachineOverride mo;
            const json& m = it.value();
            if (m.contains("E")) mo.E = m["E"].get<double>();
            if (m.contains("V")) mo.V = m["V"].get<double>();
            if (m.contains("X")) mo.X_machine_pu = m["X"].get<double>();
            if (m.contains("P0")) mo.P0_machine_pu = m["P0"].get<double>();
            c.machines[it.key()] = mo;
        }
    }
    if (j.contains("lp_weights")) c.lp_weights = j["lp_weights"].get<std::vector<double>>();

    if (!(c.cap_fraction > 0) || c.cap_fraction > 1.0)
        throw ValidationError("config: cap_fraction must lie in (0, 1]");
    if (!(c.delta_f_max_hz > 0)) throw ValidationError("config: delta_f_max_hz must be > 0");
    if (!(c.beta > 0) || !(c.beta < 1)) throw ValidationError("config: beta must lie in (0, 1)");
    if (c.perturbation_mw < 0) throw ValidationError("config: perturbation_mw must be >= 0");
    if (!(c.compute_fraction > 0) || c.compute_fraction > 1.0)
        throw ValidationError("config: compute_fraction must lie in (0, 1]");
    return c;
}

Study::Study(const StudyConfig& config) : config_(config) {
    if (config_.case_file.empty()) throw ValidationError("config: no case file given");
    case_ = parse_case(config_.case_file);

    std::string case_dir = fs::path(config_.case_file).parent_path().string();
    std::string shaft_dir = config_.shaft_dir.empty() ? case_dir : config_.shaft_dir;
    std::string material_dir = config_.material_dir.empty() ? case_dir : config_.material_dir;
    auto resolve = [](const std::string& dir, const std::string& p) {
        if (fs::path(p).is_absolute() || dir.empty()) return p;
        return (fs::path(dir) / p).string();
    };

    // Shared derivations when any machine parameter is left to defaults.
    std::optional<PowerFlowSolution> base;
    std::optional<std::vector<double>> zdiag;
    auto need_base = [&]() -> const PowerFlowSolution& {
        if (!base) base = solve_power_flow(case_);
        return *base;
    };
    auto need_zdiag = [&]() -> const std::vector<double>& {
        if (!zdiag) zdiag = zbus_diagonal_reactance(case_);
        return *zdiag;
    };

    for (const auto& g : case_.generators) {
        if (!g.is_sg() || g.shaft_file.empty()) continue;
        PreparedMachine pm;
        pm.id = g.id;
        pm.shaft = parse_shaft(resolve(shaft_dir, g.shaft_file));
        if (g.material_file.empty())
            throw ValidationError("generator " + g.id + " has a shaft but no material file");
        pm.material = parse_material(resolve(material_dir, g.material_file));

        MachineOverride mo;
        if (auto it = config_.machines.find(g.id); it != config_.machines.end()) mo = it->second;

        pm.E = mo.E.value_or(1.0);
        pm.V = mo.V ? *mo.V : std::abs(need_base().V(case_.bus_index(g.bus)));
        if (mo.X_machine_pu) {
            pm.X = *mo.X_machine_pu;
        } else {
            double x_sys = need_zdiag()[case_.bus_index(g.bus)];
            pm.X = x_sys * g.mva / case_.system_mva;
        }
        double p0 = mo.P0_machine_pu ? *mo.P0_machine_pu : g.p_mw / g.mva;
        double s = p0 * pm.X / (pm.E * pm.V);
        if (std::abs(s) >= 1.0)
            throw ValidationError("generator " + g.id +
                                  ": no equilibrium, P0 X / (E V) = " + std::to_string(s));
        pm.delta0 = std::asin(s);

        pm.model = build_linear_model(pm.shaft, pm.E, pm.V, pm.X, pm.delta0);
        pm.eq = solve_equilibrium(pm.shaft, pm.model, pm.E, pm.V, pm.X, pm.delta0);
        machines_.push_back(std::move(pm));
    }
    if (machines_.empty())
        throw ValidationError("no shafted synchronous generators in the case");
}

const PreparedMachine& Study::machine(const std::string& id) const {
    for (const auto& m : machines_)
        if (m.id == id) return m;
    throw ValidationError("unknown machine " + id);
}

std::vector<LimitProfile> Study::run_limits() const {
    LimitOptions opts;
    opts.cap_fraction = config_.cap_fraction;
    opts.delta_f_max_hz = config_.delta_f_max_hz;
    opts.grid = config_.grid;
    std::vector<LimitProfile> out(machines_.size());
    parallel_for(machines_.size(), [&](std::size_t i) {
        const auto& m = machines_[i];
        out[i] = build_limit_profile(m.id, m.shaft, m.material, m.model, m.eq, opts);
    });
    return out;
}

IFMatrix Study::run_ifs() const {
    std::vector<int> dc_buses;
    for (const auto& d : case_.datacenters) dc_buses.push_back(d.bus);
    if (dc_buses.empty()) throw ValidationError("case has no datacenter sites");
    return compute_if_matrix(case_, dc_buses, config_.perturbation_mw);
}

Study::Plan Study::run_plan(const std::vector<LimitProfile>& profiles, const IFMatrix& IF) const {
    Plan plan;
    plan.generator_ids = IF.generators;
    plan.P_e_max_mw.assign(IF.generators.size(), std::numeric_limits<double>::infinity());
    std::vector<std::string> shafted_ids;
    std::vector<double> shafted_limits;
    for (const auto& p : profiles) {
        auto it = std::find(IF.generators.begin(), IF.generators.end(), p.generator);
        if (it == IF.generators.end())
            throw ValidationError("limit profile for " + p.generator + " not in IF matrix");
        plan.P_e_max_mw[it - IF.generators.begin()] = p.P_e_max;
        shafted_ids.push_back(p.generator);
        shafted_limits.push_back(p.P_e_max);
    }
    SiteBoundOptions sbo;
    sbo.compute_fraction = config_.compute_fraction;
    sbo.threshold_mw = config_.threshold_mw;
    plan.bounds = site_bounds(shafted_limits, shafted_ids, IF, case_.datacenters, sbo);
    if (plan.bounds.empty())
        throw ValidationError("all candidate sites fell below the screening threshold");
    plan.lp = optimize_allocations(plan.P_e_max_mw, IF, plan.bounds, config_.beta,
                                   config_.lp_weights);
    return plan;
}

std::vector<MachineStudy> Study::machine_studies() const {
    std::vector<MachineStudy> out;
    for (const auto& m : machines_) {
        MachineStudy ms;
        ms.generator = m.id;
        ms.shaft = &m.shaft;
        ms.material = &m.material;
        ms.model = &m.model;
        ms.eq = &m.eq;
        ms.E = m.E;
        ms.V = m.V;
        ms.X = m.X;
        ms.delta_f_max_hz = config_.delta_f_max_hz;
        out.push_back(ms);
    }
    return out;
}

ValidationReport Study::run_validation(const Scenario& scenario, const IFMatrix& IF) const {
    return validate_scenario(scenario, IF, machine_studies(), config_.sim);
}

Scenario parse_scenario(const std::string& path) {
    json j = load_json_file(path);
    std::string label = j.value("label", fs::path(path).stem().string());
    double duration = j.value("duration_s", 40.0);
    double rate = j.value("rate_hz", 2000.0);

    if (j.contains("sites")) {
        std::vector<SiteWaveform> sites;
        for (const auto& js : j["sites"]) {
            SiteWaveform w;
            w.bus = js.at("bus").get<int>();
            w.idle_mw = js.value("idle_mw", 0.0);
            w.compute_mw = js.value("compute_mw", w.idle_mw);
            w.step_time_s = js.value("step_time_s", 0.0);
            w.ramp_limit_mw_per_s = js.value("ramp_limit_mw_per_s", 1e12);
            for (const auto& jt : js.value("tones", json::array())) {
                FrequencyComponent fc;
                fc.omega = 2.0 * kPi * jt.at("freq_hz").get<double>();
                fc.amplitude = jt.at("amplitude_mw").get<double>();
                fc.phase = jt.value("phase_rad", 0.0);
                w.tones.push_back(fc);
            }
            sites.push_back(std::move(w));
        }
        return synthesize_scenario(sites, duration, rate, label);
    }
    if (j.contains("samples")) {
        Scenario sc;
        sc.label = label;
        sc.rate_hz = rate;
        sc.duration_s = duration;
        for (const auto& js : j["samples"]) {
            sc.buses.push_back(js.at("bus").get<int>());
            sc.series_mw.push_back(js.at("p_mw").get<std::vector<double>>());
        }
        return sc;
    }
    throw ParseError(path, "scenario needs either 'sites' (synthesized) or 'samples' (raw)");
}

json serialize_scenario_spec(const std::vector<SiteWaveform>& sites, double duration_s,
                             double rate_hz, const std::string& label) {
    json j;
    j["label"] = label;
    j["duration_s"] = duration_s;
    j["rate_hz"] = rate_hz;
    j["sites"] = json::array();
    for (const auto& w : sites) {
        json js = {{"bus", w.bus},
                   {"idle_mw", w.idle_mw},
                   {"compute_mw", w.compute_mw},
                   {"step_time_s", w.step_time_s},
                   {"ramp_limit_mw_per_s", w.ramp_limit_mw_per_s}};
        js["tones"] = json::array();
        for (const auto& t : w.tones)
            js["tones"].push_back({{"freq_hz", t.omega / (2.0 * kPi)},
                                   {"amplitude_mw", t.amplitude},
                                   {"phase_rad", t.phase}});
        j["sites"].push_back(js);
    }
    return j;
}

}  // namespace torsilimit
