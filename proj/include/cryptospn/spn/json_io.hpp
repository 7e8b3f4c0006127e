#pragma once

#include <filesystem>
#include <string>

#include "cryptospn/spn/spn.hpp"

namespace cryptospn {

/// Parses an SPN document. Syntax and schema problems raise InputError
/// (with the byte offset for syntax errors); structural problems raise
/// DomainError; when `check` is set, semantic violations raise ValidationError.
SpnGraph parse_spn(const std::string& text, bool check = true);
/// Deterministic rendering: nodes in topological order with id = index.
std::string serialize_spn(const SpnGraph& spn);

SpnGraph load_spn(const std::filesystem::path& path, bool check = true);
void save_spn(const std::filesystem::path& path, const SpnGraph& spn);

/// Hex SHA-256 of serialize_spn(spn).
std::string spn_digest(const SpnGraph& spn);

Evidence parse_evidence(const std::string& text);
std::string serialize_evidence(const Evidence& ev);
Evidence load_evidence(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

std::string sha256_hex(const std::string& data);

}  // namespace cryptospn
