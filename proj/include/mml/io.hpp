#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mml/core.hpp"
#include "mml/mpf.hpp"

namespace mml {

using json = nlohmann::json;

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);
void write_text_file(const std::string& path, const std::string& text);

// {"labels","dist","weight"} or {"coords","metric","radius","weight"}.
RawSpace raw_space_from_json(const json& j);
FiniteMMSpace space_from_json(const json& j);
json space_to_json(const FiniteMMSpace& x);
FiniteMMSpace load_space(const std::string& path);

Mpf mpf_from_json(const json& j);
json mpf_to_json(const Mpf& f);

// Either a plain index array or {"map":[...]}.
std::vector<std::size_t> map_from_json(const json& j);

// Twelve significant digits, the format used for every CSV cell.
std::string fmt12(double v);

}  // namespace mml
