#pragma once

#include <filesystem>
#include <string>

#include "cryptospn/compiler/compiler.hpp"
#include "json.hpp"

namespace cryptospn {

/// Everything in a CompiledSpn except the circuit itself.
nlohmann::json layout_to_json(const CompiledSpn& compiled);
/// Fills the non-circuit fields; throws InputError on schema problems.
void layout_from_json(const nlohmann::json& j, CompiledSpn& compiled);

/// Sidecar path for a circuit file: "<circuit>.layout.json".
std::filesystem::path layout_path(const std::filesystem::path& circuit_path);

void save_compiled(const std::filesystem::path& circuit_path, const CompiledSpn& compiled);
/// Loads circuit and sidecar and checks that they agree.
CompiledSpn load_compiled(const std::filesystem::path& circuit_path);

}  // namespace cryptospn
