#pragma once

#include <string>

#include "json.hpp"

namespace leafattack::cli {

/// Parses the subset of TOML used by run configs into a JSON object:
/// `key = value` pairs, `[table]` and `[[array.of.tables]]` headers (dotted
/// names allowed), `#` comments, and values that are basic strings, literal
/// strings, integers, floats, booleans, or (possibly multi-line) arrays of
/// those. Inline tables and dates are rejected.
///
/// Throws ErrorKind::Config with "<source>:<line>: ..." on malformed input.
nlohmann::ordered_json parse_toml(const std::string& text, const std::string& source = "<memory>");

}  // namespace leafattack::cli
