#pragma once

#include <string>

#include "json.hpp"
#include "sttneg/geometry.hpp"
#include "sttneg/tube.hpp"

namespace sttneg {

using json = nlohmann::json;

json to_json(const HyperRect& r);
HyperRect rect_from_json(const json& j);

json to_json(const Term& t);
Term term_from_json(const json& j);

json to_json(const BoundaryProfile& p);
BoundaryProfile profile_from_json(const json& j);

/// Tube document:
///   {"agent", "t_start", "horizon", "dims": [{"segments": [...]}, ...]}
/// Each segment carries t0, t1, lower/upper term lists and an optional
/// "fade" object {t0, t1, "from": {"segments": [...]}}. Doubles round-trip
/// bit-exactly.
json to_json(const Tube& t);
Tube tube_from_json(const json& j);

std::string save_tube(const Tube& t);
Tube load_tube(const std::string& text);

/// Writes `contents` next to `path` and renames it into place.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace sttneg
