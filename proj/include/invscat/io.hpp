#pragma once
#include <json.hpp>
#include <string>

#include "invscat/config.hpp"
#include "invscat/estimates.hpp"
#include "invscat/forward.hpp"
#include "invscat/potential.hpp"
#include "invscat/scattering.hpp"

namespace invscat::io {

using json = nlohmann::json;

// IoError when the file cannot be opened or is not valid JSON.
json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);
void write_text_file(const std::string& path, const std::string& text);

// Field-level problems raise ParseError naming `where` (file) and the field.
json to_json(const Potential& p);
Potential potential_from_json(const json& j, const std::string& where);
// Two columns x,q (optional header); grid must start at 0 and be uniform.
Potential read_potential_csv(const std::string& path);

json to_json(const JostData& jd);
JostData jost_from_json(const json& j, const std::string& where);

json to_json(const ScatteringData& sd);
ScatteringData scattering_from_json(const json& j, const std::string& where);

json to_json(const FFunction& F);
FFunction f_from_json(const json& j, const std::string& where);

json to_json(const TransformKernel& A);
TransformKernel kernel_from_json(const json& j, const std::string& where);
// x,y,A per line for y >= x
std::string kernel_csv(const TransformKernel& A);

RunConfig config_from_json(const json& j, const std::string& where);
json to_json(const RunConfig& c);

json to_json(const std::vector<Check>& checks);
json to_json(const ValidationReport& r);
json to_json(const InequalityReport& r);
json to_json(const ConditionCReport& r);
json to_json(const CompactSupportReport& r);
json to_json(const L2Report& r);

}  // namespace invscat::io
