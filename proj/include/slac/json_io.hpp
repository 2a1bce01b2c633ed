#pragma once

#include <string>

#include "json.hpp"
#include "slac/model.hpp"
#include "slac/patterns.hpp"

namespace slac::io {

// Template file: { "domain": <size or [names]>, "relations": { name:
// { "arity": k, "tuples": [[...], ...] } } }. Tuple entries and potato values
// may be integers or value names; names are resolved here and never leave the
// file layer. Throws std::invalid_argument on malformed input.
Template parse_template(const nlohmann::json& j);

// Instance file: { "variables": [...], "constraints": [ { "scope": [...],
// "relation": name } ], "potatoes": { var: [values] } }. Potatoes are
// optional; absent variables get the full domain.
Instance parse_instance(const nlohmann::json& j, const Template& tpl);

nlohmann::json emit_template(const Template& tpl);
nlohmann::json emit_instance(const Template& tpl, const Instance& inst);

nlohmann::json emit_potatoes(const Template& tpl, const Instance& inst, const PotatoMap& pots);

// Witness certificates: steps carry (relation, scope images, occurrence
// positions) so a verifier can re-find each constraint in the instance.
nlohmann::json emit_witness(const Template& tpl, const Instance& inst, const Witness& w);
Witness parse_witness(const nlohmann::json& j, const Template& tpl, const Instance& inst);

nlohmann::json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

// FNV-1a over the raw file bytes, hex encoded.
std::string file_digest(const std::string& path);

}  // namespace slac::io
