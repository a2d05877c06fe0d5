#include <doctest.h>

#include <nlohmann/json.hpp>

#include "torsilimit/parse.hpp"

using namespace torsilimit;
using nlohmann::json;

namespace {

json minimal_case() {
    return json::parse(R"({
      "system_mva": 100.0,
      "buses": [
        {"id": 1, "type": "slack", "vm": 1.0, "angle_deg": 0.0},
        {"id": 2, "type": "PQ"}
      ],
      "branches": [{"from": 1, "to": 2, "x": 0.1}],
      "generators": [{"id": "G1", "bus": 1, "p": 50.0, "mva": 100.0, "xd2": 0.2}],
      "loads": [{"bus": 2, "p": 50.0, "q": 0.0}]
    })");
}

json fbm_shaft_json() {
    return load_json_file(std::string(TORSILIMIT_DATA_DIR) + "/fbm_shaft.json");
}

}  // namespace

TEST_SUITE("core_model") {

TEST_CASE("minimal two-bus case parses") {
    NetworkCase c = parse_case_json(minimal_case());
    CHECK(c.buses.size() == 2);
    CHECK(c.branches.size() == 1);
    CHECK(c.slack_index() == 0);
    CHECK(c.loads[0].p_mw == doctest::Approx(50.0));
}

TEST_CASE("duplicate bus id is rejected with the id in the message") {
    json j = minimal_case();
    j["buses"].push_back({{"id", 2}, {"type", "PQ"}});
    CHECK_THROWS_WITH_AS(parse_case_json(j), doctest::Contains("duplicate bus id 2"), ParseError);
}

TEST_CASE("disconnected graph is rejected") {
    json j = minimal_case();
    j["buses"].push_back({{"id", 7}, {"type", "PQ"}});
    CHECK_THROWS_WITH_AS(parse_case_json(j), doctest::Contains("disconnected"), ParseError);
}

TEST_CASE("two slack buses are rejected") {
    json j = minimal_case();
    j["buses"][1]["type"] = "slack";
    CHECK_THROWS_AS(parse_case_json(j), ParseError);
}

TEST_CASE("constant-impedance load becomes a bus shunt, y = (P - jQ)/V^2") {
    json j = minimal_case();
    j["loads"].push_back(
        {{"bus", 2}, {"p", 100.0}, {"q", 20.0}, {"model", "constant_impedance"}});
    NetworkCase c = parse_case_json(j);
    auto [g, b] = c.effective_shunt(2);
    CHECK(g == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b == doctest::Approx(-0.2).epsilon(1e-12));
    // Consumed power at nominal voltage is preserved.
    double v2 = c.bus_by_id(2).vm * c.bus_by_id(2).vm;
    CHECK(g * v2 * c.system_mva == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("per-unit power declaration scales to MW") {
    json j = minimal_case();
    j["units"] = {{"power", "pu"}};
    j["loads"][0]["p"] = 0.5;
    j["generators"][0]["p"] = 0.5;
    NetworkCase c = parse_case_json(j);
    CHECK(c.loads[0].p_mw == doctest::Approx(50.0));
}

TEST_CASE("case round-trip is structurally identical") {
    json j = minimal_case();
    j["datacenters"] = json::array({{{"bus", 2}, {"rating", 30.0}}});
    NetworkCase c1 = parse_case_json(j);
    NetworkCase c2 = parse_case_json(serialize_case(c1));
    CHECK(serialize_case(c1) == serialize_case(c2));
}

TEST_CASE("section stiffness from geometry") {
    // G J / l with J = pi R^4 / 2.
    double k_si = section_stiffness_si(0.5, 1.0, 83e9);
    CHECK(k_si == doctest::Approx(8.148e9).epsilon(2e-4));

    SUBCASE("doubling length halves K") {
        CHECK(section_stiffness_si(0.5, 2.0, 83e9) == doctest::Approx(k_si / 2).epsilon(1e-12));
    }
    SUBCASE("doubling radius multiplies K by 16") {
        CHECK(section_stiffness_si(1.0, 1.0, 83e9) == doctest::Approx(16 * k_si).epsilon(1e-12));
    }
    SUBCASE("nonpositive geometry is a domain error") {
        CHECK_THROWS_AS(section_stiffness_si(-0.5, 1.0, 83e9), std::domain_error);
        CHECK_THROWS_AS(section_stiffness_si(0.5, 0.0, 83e9), std::domain_error);
    }
}

TEST_CASE("per-unit stiffness round trip is identity") {
    double tb = 892.4e6 * 2 / (2.0 * 2.0 * kPi * 60.0);
    double k_si = section_stiffness_si(0.4, 2.5, 83e9);
    double k_pu = section_stiffness_pu(k_si, tb, 2);
    CHECK(section_stiffness_si_from_pu(k_pu, tb, 2) == doctest::Approx(k_si).epsilon(1e-12));
}

TEST_CASE("FBM shaft file parses to six masses, five sections") {
    ShaftAssembly a = parse_shaft_json(fbm_shaft_json());
    CHECK(a.num_masses() == 6);
    CHECK(a.num_sections() == 5);
    CHECK(a.generator_index() == 4);
    CHECK(a.masses[4].is_generator);
    CHECK(a.mva_rating == doctest::Approx(892.4));
}

TEST_CASE("two-mass shaft has one section") {
    json j = json::parse(R"({
      "mva": 100.0, "pole_count": 2, "f_sync_hz": 60.0,
      "masses": [
        {"label": "T", "H": 1.0, "has_Tm": true},
        {"label": "G", "H": 1.0, "is_gen": true}
      ],
      "sections": [{"K": 50.0}]
    })");
    ShaftAssembly a = parse_shaft_json(j);
    CHECK(a.num_sections() == 1);
    CHECK(a.masses[0].tm_fraction == doctest::Approx(1.0));  // defaulted equal share
}

TEST_CASE("mass/section count mismatch is rejected") {
    json j = json::parse(R"({
      "mva": 100.0, "pole_count": 2, "f_sync_hz": 60.0,
      "masses": [
        {"label": "A", "H": 1.0, "has_Tm": true},
        {"label": "B", "H": 1.0, "is_gen": true},
        {"label": "C", "H": 1.0}
      ],
      "sections": [{"K": 1.0}, {"K": 1.0}, {"K": 1.0}]
    })");
    CHECK_THROWS_AS(parse_shaft_json(j), ParseError);
}

TEST_CASE("missing generator mass is rejected") {
    json j = json::parse(R"({
      "mva": 100.0, "pole_count": 2, "f_sync_hz": 60.0,
      "masses": [{"label": "A", "H": 1.0}, {"label": "B", "H": 1.0}],
      "sections": [{"K": 1.0}]
    })");
    CHECK_THROWS_AS(parse_shaft_json(j), ParseError);
}

TEST_CASE("geometric sections get their stiffness from G J / l") {
    json j = json::parse(R"({
      "mva": 100.0, "pole_count": 2, "f_sync_hz": 60.0,
      "masses": [
        {"label": "T", "H": 1.0, "has_Tm": true},
        {"label": "G", "H": 1.0, "is_gen": true}
      ],
      "sections": [{"R": 0.5, "l": 1.0, "G": 83e9}]
    })");
    ShaftAssembly a = parse_shaft_json(j);
    double expect = section_stiffness_pu(section_stiffness_si(0.5, 1.0, 83e9), a.torque_base(), 2);
    CHECK(a.sections[0].stiffness_K == doctest::Approx(expect).epsilon(1e-12));

    // A direct K wins over geometry when both are present.
    j["sections"][0]["K"] = 123.0;
    CHECK(parse_shaft_json(j).sections[0].stiffness_K == doctest::Approx(123.0));
}

TEST_CASE("shaft and material round-trips are structurally identical") {
    ShaftAssembly a1 = parse_shaft_json(fbm_shaft_json());
    ShaftAssembly a2 = parse_shaft_json(serialize_shaft(a1));
    CHECK(serialize_shaft(a1) == serialize_shaft(a2));

    MaterialSpec m1 =
        parse_material(std::string(TORSILIMIT_DATA_DIR) + "/material_pu.json");
    MaterialSpec m2 = parse_material_json(serialize_material(m1));
    CHECK(serialize_material(m1) == serialize_material(m2));
}

TEST_CASE("material invariants are enforced") {
    json j = json::parse(R"({
      "Se": 1.2, "Sut": 4.0, "Sy": 3.2,
      "sn_points": [[1000.0, 3.0], [10000.0, 2.2]]
    })");
    CHECK_NOTHROW(parse_material_json(j));

    SUBCASE("Se > Sy rejected") {
        j["Se"] = 3.5;
        CHECK_THROWS_AS(parse_material_json(j), ParseError);
    }
    SUBCASE("non-monotone S-N rejected") {
        j["sn_points"] = {{1000.0, 2.0}, {10000.0, 2.2}};
        CHECK_THROWS_AS(parse_material_json(j), ParseError);
    }
    SUBCASE("last amplitude below Se rejected") {
        j["sn_points"] = {{1000.0, 3.0}, {10000.0, 1.1}};
        CHECK_THROWS_AS(parse_material_json(j), ParseError);
    }
}

}  // TEST_SUITE
