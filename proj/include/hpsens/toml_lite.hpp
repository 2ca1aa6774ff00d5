#pragma once

#include <string>
#include <string_view>

#include "json.hpp"

namespace hps {

/// Reads the TOML subset used by manifests and synthetic-data specs into an
/// insertion-ordered JSON tree.
///
/// Supported: comments, bare/quoted/dotted keys, `[table]` and
/// `[[array.of.tables]]` headers, basic strings, integers, floats (including
/// `inf`/`nan`), booleans, (multi-line) arrays and inline tables. Dates and
/// literal/multi-line strings are rejected. Throws Error(InvalidArgument)
/// naming the offending line.
nlohmann::ordered_json parse_toml_lite(std::string_view text);

}  // namespace hps
