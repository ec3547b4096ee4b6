#pragma once

#include <string>

#include "khash/report.hpp"

namespace khash::cli {

enum class Format { kText, kJson, kCsv };

/// Aligned "key  value" lines; nested objects use dotted keys and arrays of
/// objects become tables.
[[nodiscard]] std::string render_text(const report::Json& j);
/// Flattened "key,value" rows, or a header plus rows when `table` names an
/// array of objects inside j.
[[nodiscard]] std::string render_csv(const report::Json& j, const std::string& table = "");
[[nodiscard]] std::string render(const report::Json& j, Format format,
                                 const std::string& table = "");

}  // namespace khash::cli
