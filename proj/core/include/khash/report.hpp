#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "khash/bounds.hpp"
#include "khash/hashcode.hpp"
#include "khash/pipeline.hpp"

// JSON records for pipeline and lab results. Keys keep insertion order and
// every floating-point value is rounded to 12 significant digits, so a
// record parsed and dumped again is byte-identical.

namespace khash::report {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr int kSignificantDigits = 12;

/// Nearest double to v printed with `digits` significant digits.
[[nodiscard]] double round_sig(double v, int digits = kSignificantDigits);
/// Rounded number, or null for NaN and infinities.
[[nodiscard]] Json number(double v);
/// "%.12g" rendering used by the text and CSV tables.
[[nodiscard]] std::string format_number(double v, int digits = kSignificantDigits);

/// {"schema_version": .., "command": .., <body fields>}.
[[nodiscard]] Json envelope(const std::string& command, const Json& body);

[[nodiscard]] Json to_json(const KmBound& km);
[[nodiscard]] Json to_json(const ThresholdSolution& sol);
[[nodiscard]] Json to_json(const ConjectureVerdict& verdict);
[[nodiscard]] Json to_json(const ContinuityRow& row);
[[nodiscard]] Json to_json(const BoundReport& rep);
[[nodiscard]] Json to_json(const SeparationResult& sep);
[[nodiscard]] Json to_json(const CoordinateClassification& cls);
[[nodiscard]] Json to_json(const HanselCheck& check);
[[nodiscard]] Json to_json(const SubcodeCensus& census);

/// Two-space indented dump with a trailing newline.
[[nodiscard]] std::string dump(const Json& j);
/// dump(parse(text)); equals `text` for anything produced by dump().
[[nodiscard]] std::string reemit(const std::string& text);

}  // namespace khash::report
