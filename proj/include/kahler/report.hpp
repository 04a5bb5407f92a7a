#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

namespace kahler::report {

inline constexpr int kSchemaVersion = 1;

/// Human-readable statement of every sign and normalization convention the
/// numbers in a report depend on.
const std::string& conventions_text();

/// FNV-1a (64-bit) of conventions_text(), as 16 lowercase hex digits.
std::string conventions_hash();

std::string fnv1a_hex(const std::string& bytes);

/// {schema_version, command, config, conventions, conventions_hash, ok, result}
nlohmann::json envelope(const std::string& command, const nlohmann::json& config,
                        nlohmann::json result, bool ok);

/// Pretty-printed with sorted keys and a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace kahler::report
