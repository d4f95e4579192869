#pragma once

#include <string>

#include <json.hpp>

#include "spiral/center_bundle.hpp"
#include "spiral/continuation.hpp"
#include "spiral/levelset.hpp"
#include "spiral/planar_map.hpp"
#include "spiral/rd_sim.hpp"

namespace spiral::config {

using json = nlohmann::json;

json load_json(const std::string& path);

// FNV-1a hash of the canonical dump, used as the parameter digest in output
// headers.
std::string digest(const json& j);

// --- Planar map -------------------------------------------------------------

// Coefficient tables use the exponent-keyed convention "20", "11", "02", ...
// ("a"/"b" for the two components of the origin field, "c"/"d" for the xi
// field). The xi field's polynomial is based at xi unless overridden.
planar::MapSpec parse_map_spec(const json& j);
json map_spec_to_json(const planar::MapSpec& spec);

planar::Window parse_window(const json& j, const planar::MapSpec& spec);
json window_to_json(const planar::Window& w);

// --- Center bundle ------------------------------------------------------------

bundle::CenterBundleSystem parse_bundle_system(const json& j);
json bundle_system_to_json(const bundle::CenterBundleSystem& sys);

// --- Reaction-diffusion --------------------------------------------------------

rd::ModelSpec parse_rd_model(const json& j);
json rd_model_to_json(const rd::ModelSpec& model);

rd::GridConfig parse_grid(const json& j);
json grid_to_json(const rd::GridConfig& grid);

rd::Scheme parse_scheme(const std::string& name);
std::string scheme_name(rd::Scheme scheme);

}  // namespace spiral::config
