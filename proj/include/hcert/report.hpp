#pragma once

#include <string>

#include <json.hpp>

namespace hcert::cli {

/// Serializes JSON with every floating-point value printed as %.17g.
/// Non-finite numbers become null.
std::string dump_report(const nlohmann::json& j, int indent = 2);

}  // namespace hcert::cli
