#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace kahler::cli {

/// Raised for configurations rejected before any computation (exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Outcome {
  nlohmann::json config;     // fully resolved
  nlohmann::json result;
  nlohmann::json failures = nlohmann::json::array();
  std::map<std::string, std::string> files;  // extra outputs: name -> contents
  bool ok = true;
};

/// Defaults for every key a command accepts; null means "derived".
nlohmann::json default_config(const std::string& command);

/// Fills derived values and checks domains and comparison preconditions.
/// Throws ConfigError.
nlohmann::json resolve_config(const std::string& command, const nlohmann::json& raw);

/// Runs a resolved configuration.
Outcome run_command(const std::string& command, const nlohmann::json& config);

}  // namespace kahler::cli
