#pragma once

#include <filesystem>
#include <iosfwd>

#include "cryptospn/circuit/circuit.hpp"
#include "cryptospn/errors.hpp"

namespace cryptospn {

using FormatError = InputError;

inline constexpr std::uint16_t kCircuitFormatVersion = 1;

/// Binary layout, little-endian: "CSPN", u16 version, u8 precision bits,
/// u64 gate count, gate records (u8 kind, LEB128 operands), input-group
/// table, output table.
void write_circuit(std::ostream& out, const Circuit& circuit);
Circuit read_circuit(std::istream& in);

void save_circuit(const std::filesystem::path& path, const Circuit& circuit);
Circuit load_circuit(const std::filesystem::path& path);

}  // namespace cryptospn
