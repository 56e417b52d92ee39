#pragma once

#include <string>
#include <variant>

#include <json.hpp>

#include "delone/constants.hpp"
#include "delone/netsynth.hpp"
#include "delone/tessellation.hpp"

namespace delone {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json region_to_json(const Region& r);
Region region_from_json(const Json& j, const std::string& path = "region");

Json net_to_json(const Net& net);
/// Validates shape, region, and d1 separation (under m, flat:dim if null).
Net net_from_json(const Json& j, const MetricModel* m = nullptr);

Json complex_to_json(const DelaunayComplex& c);
DelaunayComplex complex_from_json(const Json& j);

Json bundle_to_json(const ConstantBundle& b);
ConstantBundle bundle_from_json(const Json& j);

Json family_to_json(const ParamFamily& f);
ParamFamily family_from_json(const Json& j);

Json certificate_to_json(const StabilityCertificate& c);
/// Reads pass, worst and per-simplex outcomes (enough to render).
StabilityCertificate certificate_from_json(const Json& j);

Json duality_to_json(const DualityReport& r);

/// Throws IoError on missing, unreadable or malformed files.
Json read_json_file(const std::string& path);
/// Two-space indent, trailing newline. Throws IoError.
void write_json_file(const std::string& path, const Json& j);
void write_text_file(const std::string& path, const std::string& text);

using Artifact = std::variant<Net, ConstantBundle, ParamFamily, DelaunayComplex>;

/// Loads a file and dispatches on its shape; every invariant is re-checked.
Artifact parse_and_validate(const std::string& path);

}  // namespace delone
