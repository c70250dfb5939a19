#pragma once

#include <json.hpp>

#include <string>

namespace dln {

/// Serialises with every floating-point value at 17 significant digits and
/// non-finite values as null. Object key order is preserved.
std::string to_json_text(const nlohmann::ordered_json& value, int indent = 2);

}  // namespace dln
