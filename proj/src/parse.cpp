#include "torsilimit/parse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace torsilimit {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ParseError(where, what);
}

const json& require(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) fail(where, std::string("missing required key '") + key + "'");
    return *it;
}

double num(const json& j, const char* key, const std::string& where) {
    const json& v = require(j, key, where);
    if (!v.is_number()) fail(where + "." + key, "expected a number");
    return v.get<double>();
}

double num_or(const json& j, const char* key, double dflt) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return dflt;
    return it->get<double>();
}

bool flag_or(const json& j, const char* key, bool dflt) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return dflt;
    return it->get<bool>();
}

std::string str_or(const json& j, const char* key, const std::string& dflt) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return dflt;
    return it->get<std::string>();
}

}  // namespace

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, "cannot open file");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ParseError(path, e.what());
    }
    return j;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// ShaftAssembly

int ShaftAssembly::generator_index() const {
    for (int i = 0; i < num_masses(); ++i)
        if (masses[i].is_generator) return i;
    return -1;
}

void ShaftAssembly::validate() const {
    if (masses.size() < 1) throw ValidationError(name + ": shaft needs at least one mass");
    if (sections.size() != masses.size() - 1)
        throw ValidationError(name + ": expected sections = masses - 1, got " +
                              std::to_string(sections.size()) + " sections for " +
                              std::to_string(masses.size()) + " masses");
    if (pole_count < 2 || pole_count % 2 != 0)
        throw ValidationError(name + ": pole_count must be even and >= 2");
    if (!(mva_rating > 0)) throw ValidationError(name + ": mva_rating must be > 0");
    if (!(sync_speed > 0)) throw ValidationError(name + ": sync speed must be > 0");

    int gens = 0;
    for (const auto& m : masses) {
        if (!(m.inertia_H > 0))
            throw ValidationError(name + ": mass '" + m.label + "' has nonpositive inertia");
        if (m.self_damping < 0)
            throw ValidationError(name + ": mass '" + m.label + "' has negative self damping");
        if (m.is_generator) ++gens;
        if (m.is_generator && m.applies_mech_torque)
            throw ValidationError(name + ": generator mass '" + m.label +
                                  "' cannot carry mechanical torque");
    }
    if (gens != 1)
        throw ValidationError(name + ": exactly one mass must be the generator, found " +
                              std::to_string(gens));

    bool any_geom = false, any_plain = false;
    for (std::size_t r = 0; r < sections.size(); ++r) {
        const auto& s = sections[r];
        if (!(s.stiffness_K > 0))
            throw ValidationError(name + ": section " + std::to_string(r) +
                                  " has nonpositive stiffness");
        if (s.mutual_damping < 0)
            throw ValidationError(name + ": section " + std::to_string(r) +
                                  " has negative mutual damping");
        if (s.radius_R.has_value() != s.length_l.has_value())
            throw ValidationError(name + ": section " + std::to_string(r) +
                                  " must give both radius and length or neither");
        if (s.has_geometry()) {
            if (!(*s.radius_R > 0) || !(*s.length_l > 0))
                throw ValidationError(name + ": section " + std::to_string(r) +
                                      " has nonpositive geometry");
            any_geom = true;
        } else {
            any_plain = true;
        }
    }
    // Stress units must be uniform along the train.
    if (any_geom && any_plain)
        throw ValidationError(name + ": sections mix geometric and per-unit stiffness data");

    double frac = 0.0;
    for (const auto& m : masses)
        if (m.applies_mech_torque) frac += m.tm_fraction;
    if (frac > 0 && std::abs(frac - 1.0) > 1e-9)
        throw ValidationError(name + ": Tm fractions sum to " + std::to_string(frac) +
                              ", expected 1");
}

double section_stiffness_si(double radius_R, double length_l, double shear_modulus_G) {
    if (!(radius_R > 0) || !(length_l > 0) || !(shear_modulus_G > 0))
        throw std::domain_error("section geometry must be positive");
    double J = kPi * std::pow(radius_R, 4) / 2.0;
    return shear_modulus_G * J / length_l;  // N*m per mech rad
}

double section_stiffness_pu(double stiffness_si, double torque_base, int pole_count) {
    if (!(stiffness_si > 0) || !(torque_base > 0))
        throw std::domain_error("stiffness and torque base must be positive");
    return stiffness_si * (2.0 / pole_count) / torque_base;
}

double section_stiffness_si_from_pu(double stiffness_pu, double torque_base, int pole_count) {
    return stiffness_pu * torque_base / (2.0 / pole_count);
}

ShaftAssembly parse_shaft(const std::string& path) {
    return parse_shaft_json(load_json_file(path), path);
}

ShaftAssembly parse_shaft_json(const json& j, const std::string& origin) {
    ShaftAssembly a;
    a.name = str_or(j, "name", origin);
    a.mva_rating = num(j, "mva", origin);
    a.pole_count = static_cast<int>(num(j, "pole_count", origin));
    a.sync_speed = 2.0 * kPi * num(j, "f_sync_hz", origin);

    const json& masses = require(j, "masses", origin);
    if (!masses.is_array() || masses.empty()) fail(origin + ".masses", "expected nonempty array");
    int idx = 0;
    for (const auto& jm : masses) {
        std::string where = origin + ".masses[" + std::to_string(idx++) + "]";
        RotorMass m;
        m.label = str_or(jm, "label", "mass" + std::to_string(idx));
        m.inertia_H = num(jm, "H", where);
        m.self_damping = num_or(jm, "D_self", 0.0);
        m.applies_mech_torque = flag_or(jm, "has_Tm", false);
        m.is_generator = flag_or(jm, "is_gen", false);
        m.tm_fraction = num_or(jm, "Tm_fraction", 0.0);
        a.masses.push_back(m);
    }

    const json& sections = require(j, "sections", origin);
    if (!sections.is_array()) fail(origin + ".sections", "expected array");
    idx = 0;
    for (const auto& js : sections) {
        std::string where = origin + ".sections[" + std::to_string(idx++) + "]";
        ShaftSection s;
        s.mutual_damping = num_or(js, "D_mutual", 0.0);
        if (js.contains("R") || js.contains("l")) {
            if (js.contains("R")) s.radius_R = num(js, "R", where);
            if (js.contains("l")) s.length_l = num(js, "l", where);
            s.shear_modulus_G = num_or(js, "G", 83e9);
        }
        if (js.contains("K")) {
            // Direct per-unit value wins over geometry when both are present.
            s.stiffness_K = num(js, "K", where);
        } else if (s.has_geometry()) {
            double k_si = section_stiffness_si(*s.radius_R, *s.length_l, s.shear_modulus_G);
            s.stiffness_K = section_stiffness_pu(
                k_si, a.mva_rating * 1e6 * a.pole_count / (2.0 * a.sync_speed), a.pole_count);
        } else {
            fail(where, "section needs either K or {R, l}");
        }
        a.sections.push_back(s);
    }

    // Default torque split: equal shares over the turbine-stage masses.
    double frac_sum = 0.0;
    int stages = 0;
    for (const auto& m : a.masses) {
        if (m.applies_mech_torque) {
            frac_sum += m.tm_fraction;
            ++stages;
        }
    }
    if (stages > 0 && frac_sum == 0.0) {
        for (auto& m : a.masses)
            if (m.applies_mech_torque) m.tm_fraction = 1.0 / stages;
    }

    try {
        a.validate();
    } catch (const ValidationError& e) {
        fail(origin, e.what());
    }
    return a;
}

json serialize_shaft(const ShaftAssembly& a) {
    json j;
    j["name"] = a.name;
    j["mva"] = a.mva_rating;
    j["pole_count"] = a.pole_count;
    j["f_sync_hz"] = a.sync_speed / (2.0 * kPi);
    j["masses"] = json::array();
    for (const auto& m : a.masses) {
        json jm = {{"label", m.label},  {"H", m.inertia_H},       {"D_self", m.self_damping},
                   {"has_Tm", m.applies_mech_torque}, {"is_gen", m.is_generator}};
        if (m.applies_mech_torque) jm["Tm_fraction"] = m.tm_fraction;
        j["masses"].push_back(jm);
    }
    j["sections"] = json::array();
    for (const auto& s : a.sections) {
        json js = {{"K", s.stiffness_K}, {"D_mutual", s.mutual_damping}};
        if (s.has_geometry()) {
            js["R"] = *s.radius_R;
            js["l"] = *s.length_l;
            js["G"] = s.shear_modulus_G;
        }
        j["sections"].push_back(js);
    }
    return j;
}

// ---------------------------------------------------------------------------
// MaterialSpec

void MaterialSpec::validate() const {
    if (!(endurance_Se > 0) || !(endurance_Se <= yield_Sy) || !(yield_Sy <= ultimate_Sut))
        throw ValidationError("material: need 0 < Se <= Sy <= Sut");
    if (sn_points.size() < 2) throw ValidationError("material: need at least two S-N points");
    for (std::size_t i = 0; i < sn_points.size(); ++i) {
        if (!(sn_points[i].first > 0) || !(sn_points[i].second > 0))
            throw ValidationError("material: S-N entries must be positive");
        if (i > 0) {
            if (!(sn_points[i].first > sn_points[i - 1].first))
                throw ValidationError("material: S-N cycle counts must be strictly increasing");
            if (!(sn_points[i].second < sn_points[i - 1].second))
                throw ValidationError("material: S-N amplitudes must be strictly decreasing");
        }
    }
    if (sn_points.back().second < endurance_Se)
        throw ValidationError("material: last S-N amplitude must be >= Se");
}

MaterialSpec parse_material(const std::string& path) {
    return parse_material_json(load_json_file(path), path);
}

MaterialSpec parse_material_json(const json& j, const std::string& origin) {
    MaterialSpec m;
    m.endurance_Se = num(j, "Se", origin);
    m.ultimate_Sut = num(j, "Sut", origin);
    m.yield_Sy = num(j, "Sy", origin);
    m.units = str_or(j, "units", "MPa");
    const json& pts = require(j, "sn_points", origin);
    if (!pts.is_array()) fail(origin + ".sn_points", "expected array of [N, S] pairs");
    for (const auto& p : pts) {
        if (!p.is_array() || p.size() != 2)
            fail(origin + ".sn_points", "expected [N, S] pairs");
        m.sn_points.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    try {
        m.validate();
    } catch (const ValidationError& e) {
        fail(origin, e.what());
    }
    return m;
}

json serialize_material(const MaterialSpec& m) {
    json j;
    j["units"] = m.units;
    j["Se"] = m.endurance_Se;
    j["Sut"] = m.ultimate_Sut;
    j["Sy"] = m.yield_Sy;
    j["sn_points"] = json::array();
    for (const auto& [n, s] : m.sn_points) j["sn_points"].push_back({n, s});
    return j;
}

// ---------------------------------------------------------------------------
// NetworkCase

int NetworkCase::bus_index(int bus_id) const {
    for (std::size_t i = 0; i < buses.size(); ++i)
        if (buses[i].id == bus_id) return static_cast<int>(i);
    return -1;
}

const Bus& NetworkCase::bus_by_id(int bus_id) const {
    int i = bus_index(bus_id);
    if (i < 0) throw ValidationError("unknown bus id " + std::to_string(bus_id));
    return buses[i];
}

int NetworkCase::slack_index() const {
    for (std::size_t i = 0; i < buses.size(); ++i)
        if (buses[i].type == BusType::Slack) return static_cast<int>(i);
    return -1;
}

std::pair<double, double> NetworkCase::effective_shunt(int bus_id) const {
    const Bus& b = bus_by_id(bus_id);
    double g = b.gs, bsh = b.bs;
    for (const auto& l : loads) {
        if (l.bus == bus_id && l.model == LoadModel::ConstantImpedance) {
            double v2 = b.vm * b.vm;
            g += (l.p_mw / system_mva) / v2;
            bsh -= (l.q_mvar / system_mva) / v2;
        }
    }
    return {g, bsh};
}

void NetworkCase::validate() const {
    if (!(system_mva > 0)) throw ValidationError("case: system_mva must be > 0");
    if (buses.empty()) throw ValidationError("case: no buses");

    std::set<int> ids;
    int slacks = 0;
    for (const auto& b : buses) {
        if (!ids.insert(b.id).second)
            throw ValidationError("case: duplicate bus id " + std::to_string(b.id));
        if (b.type == BusType::Slack) ++slacks;
        if (!(b.vm > 0))
            throw ValidationError("case: bus " + std::to_string(b.id) + " has nonpositive voltage");
    }
    if (slacks != 1)
        throw ValidationError("case: exactly one slack bus required, found " +
                              std::to_string(slacks));

    for (const auto& br : branches) {
        if (!ids.count(br.from) || !ids.count(br.to))
            throw ValidationError("case: branch " + std::to_string(br.from) + "-" +
                                  std::to_string(br.to) + " references unknown bus");
        if (br.r == 0.0 && br.x == 0.0)
            throw ValidationError("case: branch " + std::to_string(br.from) + "-" +
                                  std::to_string(br.to) + " has zero impedance");
        if (!(br.tap > 0))
            throw ValidationError("case: branch " + std::to_string(br.from) + "-" +
                                  std::to_string(br.to) + " has nonpositive tap");
    }

    // Connectivity over in-service branches.
    if (buses.size() > 1) {
        std::set<int> seen{buses.front().id};
        std::queue<int> frontier;
        frontier.push(buses.front().id);
        while (!frontier.empty()) {
            int u = frontier.front();
            frontier.pop();
            for (const auto& br : branches) {
                if (!br.in_service) continue;
                int v = -1;
                if (br.from == u) v = br.to;
                else if (br.to == u) v = br.from;
                if (v >= 0 && seen.insert(v).second) frontier.push(v);
            }
        }
        if (seen.size() != buses.size())
            throw ValidationError("case: network graph is disconnected (" +
                                  std::to_string(seen.size()) + " of " +
                                  std::to_string(buses.size()) + " buses reachable)");
    }

    std::set<int> gen_buses;
    for (const auto& g : generators) {
        if (!ids.count(g.bus))
            throw ValidationError("case: generator '" + g.id + "' references unknown bus " +
                                  std::to_string(g.bus));
        if (!gen_buses.insert(g.bus).second)
            throw ValidationError("case: multiple generators at bus " + std::to_string(g.bus));
        if (!(g.mva > 0))
            throw ValidationError("case: generator '" + g.id + "' needs mva > 0");
        if (g.is_sg() && g.subtransient_Xd2 <= 0)
            throw ValidationError("case: SG '" + g.id + "' needs subtransient Xd'' > 0");
    }
    for (const auto& l : loads)
        if (!ids.count(l.bus))
            throw ValidationError("case: load references unknown bus " + std::to_string(l.bus));
    for (const auto& d : datacenters) {
        if (!ids.count(d.bus))
            throw ValidationError("case: datacenter references unknown bus " +
                                  std::to_string(d.bus));
        if (!(d.rating_mw > 0))
            throw ValidationError("case: datacenter at bus " + std::to_string(d.bus) +
                                  " needs rating > 0");
    }
}

NetworkCase parse_case(const std::string& path) {
    return parse_case_json(load_json_file(path), path);
}

NetworkCase parse_case_json(const json& j, const std::string& origin) {
    NetworkCase c;
    c.system_mva = num(j, "system_mva", origin);

    std::string power_unit = "MW";
    if (j.contains("units")) power_unit = str_or(j["units"], "power", "MW");
    if (power_unit != "MW" && power_unit != "pu")
        fail(origin + ".units.power", "expected 'MW' or 'pu'");
    double pscale = (power_unit == "pu") ? c.system_mva : 1.0;

    const json& buses = require(j, "buses", origin);
    int idx = 0;
    for (const auto& jb : buses) {
        std::string where = origin + ".buses[" + std::to_string(idx++) + "]";
        Bus b;
        b.id = static_cast<int>(num(jb, "id", where));
        std::string t = str_or(jb, "type", "PQ");
        if (t == "slack") b.type = BusType::Slack;
        else if (t == "PV") b.type = BusType::PV;
        else if (t == "PQ") b.type = BusType::PQ;
        else fail(where + ".type", "expected slack|PV|PQ, got '" + t + "'");
        b.vm = num_or(jb, "vm", 1.0);
        b.angle_deg = num_or(jb, "angle_deg", 0.0);
        b.gs = num_or(jb, "gs", 0.0);
        b.bs = num_or(jb, "bs", 0.0);
        c.buses.push_back(b);
    }

    idx = 0;
    for (const auto& jb : j.value("branches", json::array())) {
        std::string where = origin + ".branches[" + std::to_string(idx++) + "]";
        Branch br;
        br.from = static_cast<int>(num(jb, "from", where));
        br.to = static_cast<int>(num(jb, "to", where));
        br.r = num_or(jb, "r", 0.0);
        br.x = num(jb, "x", where);
        br.b = num_or(jb, "b", 0.0);
        br.tap = num_or(jb, "tap", 1.0);
        br.in_service = flag_or(jb, "in_service", true);
        c.branches.push_back(br);
    }

    idx = 0;
    for (const auto& jg : j.value("generators", json::array())) {
        std::string where = origin + ".generators[" + std::to_string(idx++) + "]";
        Generator g;
        g.id = str_or(jg, "id", "G" + std::to_string(idx));
        g.bus = static_cast<int>(num(jg, "bus", where));
        g.p_mw = num_or(jg, "p", 0.0) * pscale;
        g.v_setpoint = num_or(jg, "v_setpoint", 1.0);
        g.mva = num(jg, "mva", where);
        g.armature_Ra = num_or(jg, "ra", 0.0);
        g.subtransient_Xd2 = num_or(jg, "xd2", 0.0);
        g.ibr = flag_or(jg, "ibr", false);
        g.shaft_file = str_or(jg, "shaft", "");
        g.material_file = str_or(jg, "material", "");
        c.generators.push_back(g);
    }

    idx = 0;
    for (const auto& jl : j.value("loads", json::array())) {
        std::string where = origin + ".loads[" + std::to_string(idx++) + "]";
        Load l;
        l.bus = static_cast<int>(num(jl, "bus", where));
        l.p_mw = num(jl, "p", where) * pscale;
        l.q_mvar = num_or(jl, "q", 0.0) * pscale;
        std::string m = str_or(jl, "model", "constant_power");
        if (m == "constant_power") l.model = LoadModel::ConstantPower;
        else if (m == "constant_impedance") l.model = LoadModel::ConstantImpedance;
        else fail(where + ".model", "expected constant_power|constant_impedance");
        c.loads.push_back(l);
    }

    idx = 0;
    for (const auto& jd : j.value("datacenters", json::array())) {
        std::string where = origin + ".datacenters[" + std::to_string(idx++) + "]";
        DataCenterSite d;
        d.bus = static_cast<int>(num(jd, "bus", where));
        d.rating_mw = num(jd, "rating", where) * pscale;
        d.existing = flag_or(jd, "existing", false);
        c.datacenters.push_back(d);
    }

    try {
        c.validate();
    } catch (const ValidationError& e) {
        fail(origin, e.what());
    }
    return c;
}

json serialize_case(const NetworkCase& c) {
    json j;
    j["system_mva"] = c.system_mva;
    j["units"] = {{"power", "MW"}};
    j["buses"] = json::array();
    for (const auto& b : c.buses) {
        const char* t = b.type == BusType::Slack ? "slack" : b.type == BusType::PV ? "PV" : "PQ";
        j["buses"].push_back({{"id", b.id},
                              {"type", t},
                              {"vm", b.vm},
                              {"angle_deg", b.angle_deg},
                              {"gs", b.gs},
                              {"bs", b.bs}});
    }
    j["branches"] = json::array();
    for (const auto& br : c.branches)
        j["branches"].push_back({{"from", br.from},
                                 {"to", br.to},
                                 {"r", br.r},
                                 {"x", br.x},
                                 {"b", br.b},
                                 {"tap", br.tap},
                                 {"in_service", br.in_service}});
    j["generators"] = json::array();
    for (const auto& g : c.generators) {
        json jg = {{"id", g.id},
                   {"bus", g.bus},
                   {"p", g.p_mw},
                   {"v_setpoint", g.v_setpoint},
                   {"mva", g.mva},
                   {"ra", g.armature_Ra},
                   {"xd2", g.subtransient_Xd2},
                   {"ibr", g.ibr}};
        if (!g.shaft_file.empty()) jg["shaft"] = g.shaft_file;
        if (!g.material_file.empty()) jg["material"] = g.material_file;
        j["generators"].push_back(jg);
    }
    j["loads"] = json::array();
    for (const auto& l : c.loads)
        j["loads"].push_back(
            {{"bus", l.bus},
             {"p", l.p_mw},
             {"q", l.q_mvar},
             {"model",
              l.model == LoadModel::ConstantPower ? "constant_power" : "constant_impedance"}});
    j["datacenters"] = json::array();
    for (const auto& d : c.datacenters)
        j["datacenters"].push_back(
            {{"bus", d.bus}, {"rating", d.rating_mw}, {"existing", d.existing}});
    return j;
}

}  // namespace torsilimit
