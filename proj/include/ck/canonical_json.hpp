#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace ck {

using Json = nlohmann::json;

/// Deterministic serialization: keys in byte order, no insignificant
/// whitespace, floats with 6 significant digits, `-0` written as `0`.
/// Throws ck::ValidationError on non-finite numbers.
std::string canonical_dump(const Json& value);

/// Rounds a double the way canonical_dump prints it.
double round_sig6(double v);

}  // namespace ck
