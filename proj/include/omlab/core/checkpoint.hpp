#pragma once

#include <string>

#include "json.hpp"
#include "omlab/core/adam.hpp"
#include "omlab/core/tensor.hpp"

// Parameter/optimizer snapshots. On disk a checkpoint is a JSON bundle
//   {"format": "grad_core_ckpt_v1", "params": {name: {shape, values}}, ...}
// Callers may attach extra sections (optimizer state, rng, counters) next to
// "params"; loaders ignore sections they don't know.
namespace omlab::core::ckpt {

inline constexpr const char* kFormat = "grad_core_ckpt_v1";

nlohmann::json params_to_json(const NamedParams& params);
// Copies values into the existing tensors; names and shapes must match.
void params_from_json(const nlohmann::json& j, const NamedParams& params);

nlohmann::json adam_to_json(const Adam& opt);
void adam_from_json(const nlohmann::json& j, Adam& opt);

nlohmann::json make_bundle(const NamedParams& params);
void load_bundle(const nlohmann::json& bundle, const NamedParams& params);

void write_file(const std::string& path, const nlohmann::json& j);
nlohmann::json read_file(const std::string& path);

}  // namespace omlab::core::ckpt
