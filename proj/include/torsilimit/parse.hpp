#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "torsilimit/types.hpp"

namespace torsilimit {

/// Parses and validates a network case file (see README for the schema).
/// Power quantities may be declared in MW or p.u. in-file; they are stored in
/// MW internally. Angles are degrees in-file.
NetworkCase parse_case(const std::string& path);
NetworkCase parse_case_json(const nlohmann::json& j, const std::string& origin = "case");

ShaftAssembly parse_shaft(const std::string& path);
ShaftAssembly parse_shaft_json(const nlohmann::json& j, const std::string& origin = "shaft");

MaterialSpec parse_material(const std::string& path);
MaterialSpec parse_material_json(const nlohmann::json& j, const std::string& origin = "material");

nlohmann::json serialize_case(const NetworkCase& c);
nlohmann::json serialize_shaft(const ShaftAssembly& s);
nlohmann::json serialize_material(const MaterialSpec& m);

nlohmann::json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace torsilimit
