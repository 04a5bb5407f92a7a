#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "kahler/report.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::map<std::string, std::string> kHelp = {
    {"space", "flat | fs | ch | product (CP^1 factors)"},
    {"n", "complex dimension"},
    {"K", "curvature parameter (holomorphic sectional curvature 2K)"},
    {"sub", "point | subvariety"},
    {"p", "dimension of the linear subvariety"},
    {"K_bound", "lower bisectional bound used by the comparison"},
    {"rmin", "first grid radius"},
    {"rmax", "last grid radius"},
    {"points", "grid size"},
    {"eps", "seed radius"},
    {"step", "integration step"},
    {"fd", "run the finite-difference oracle (true/false)"},
    {"jacobi", "run the Jacobi-field oracle (true/false)"},
    {"fd_h", "finite-difference step"},
    {"instances", "number of random instances"},
    {"dim", "maximum matrix dimension"},
    {"seed", "suite seed"},
    {"slack", "PSD slack for Loewner checks"},
    {"mode", "radial | mesh | bochner"},
    {"s", "dimension of the linear subspace CP^s"},
    {"r0", "Dirichlet radius (default: critical radius)"},
    {"vertices", "minimum vertex count of the finest mesh"},
    {"write_off", "write the finest mesh as OFF (true/false)"},
    {"lambda", "Chern factor of the model (Ric = lambda * omega)"},
    {"k1", "lower scalar curvature bound"},
    {"k2", "upper scalar curvature bound"},
    {"band_points", "rows in the band CSV"},
    {"radial_order", "Gauss-Legendre order per complex coordinate"},
    {"angular_nodes", "trapezoid nodes per complex coordinate"},
};

std::string flag_name(std::string key) {
  for (auto& ch : key)
    if (ch == '_') ch = '-';
  return "--" + key;
}

// Numbers and booleans are parsed as JSON, everything else is kept as text.
json flag_value(const std::string& text) {
  try {
    json v = json::parse(text);
    if (v.is_number() || v.is_boolean()) return v;
  } catch (const json::exception&) {
  }
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of Kahler comparison theorems on model spaces", "kahler"};
  app.require_subcommand(1);
  std::string out_dir, config_path;
  app.add_option("--out", out_dir, "output directory (default: $KAHLER_OUT_DIR or .)");
  app.add_option("--config", config_path, "JSON file whose keys override the flags");
  app.fallthrough();

  json flags = json::object();
  for (const std::string cmd : {"hessian", "riccati", "eigen", "volume", "all"}) {
    auto* sub = app.add_subcommand(cmd);
    const json defaults = kahler::cli::default_config(cmd);
    for (const auto& [key, value] : defaults.items()) {
      const auto it = kHelp.find(key);
      const std::string k = key;
      sub->add_option_function<std::string>(
          flag_name(key), [&flags, k](const std::string& v) { flags[k] = flag_value(v); },
          it == kHelp.end() ? "" : it->second);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  if (out_dir.empty()) {
    const char* env = std::getenv("KAHLER_OUT_DIR");
    out_dir = env != nullptr && *env != '\0' ? env : ".";
  }

  json config;
  try {
    json raw = flags;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw kahler::cli::ConfigError("cannot read config file " + config_path);
      json file;
      try {
        file = json::parse(f);
      } catch (const json::exception& e) {
        throw kahler::cli::ConfigError(std::string("config file is not valid JSON: ") + e.what());
      }
      if (!file.is_object()) throw kahler::cli::ConfigError("config file must hold a JSON object");
      raw.update(file);
    }
    config = kahler::cli::resolve_config(command, raw);
  } catch (const kahler::cli::ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  }

  kahler::cli::Outcome outcome;
  try {
    outcome = kahler::cli::run_command(command, config);
  } catch (const kahler::cli::ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return 1;
  }

  const fs::path dir(out_dir);
  const fs::path report = dir / (command + ".json");
  try {
    kahler::report::write_json(report,
                               kahler::report::envelope(command, outcome.config, outcome.result, outcome.ok));
    for (const auto& [name, text] : outcome.files) kahler::report::write_text(dir / name, text);
  } catch (const std::exception& e) {
    std::cerr << "cannot write outputs: " << e.what() << "\n";
    return 1;
  }

  std::cout << command << ": " << (outcome.ok ? "ok" : "FAILED") << " -> " << report.string() << "\n";
  if (!outcome.ok) {
    std::cerr << "failing cases:\n" << outcome.failures.dump(2) << "\n";
    return 1;
  }
  return 0;
}
