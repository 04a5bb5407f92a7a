#include "kahler/report.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace kahler::report {

const std::string& conventions_text() {
  static const std::string text =
      "potential: (1/K) log(1 + K|z|^2), |z|^2 at K = 0\n"
      "metric: g_{ab~} = d_a d_b~ potential; Riemannian |v|^2 = 2 g(v, v~)\n"
      "curvature: R_{ab~cd~} = -d_c d_d~ g_{ab~} + g^{pq~} d_c g_{aq~} d_d~ g_{pb~}; "
      "space form R = K(g g + g g)\n"
      "holomorphic sectional curvature: 2K\n"
      "frame: unitary, e_1 = sqrt(2) * unit radial (1,0)-vector\n"
      "hessian: mixed r_{ab~} and holomorphic r_{ab} in the frame\n"
      "bounds: F = x cot x / r, G = -y / (r sin y), H = -x tan x / r, x^2 = K r^2/2, y^2 = 2K r^2\n"
      "laplacian: complex, half the Riemannian one\n"
      "scalar curvature: g^{ab~} Ric_{ab~}, n(n+1)K on CP^n\n"
      "volume measure: 2^n det(g) dLebesgue\n";
  return text;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string conventions_hash() { return fnv1a_hex(conventions_text()); }

nlohmann::json envelope(const std::string& command, const nlohmann::json& config,
                        nlohmann::json result, bool ok) {
  return {{"schema_version", kSchemaVersion},
          {"command", command},
          {"config", config},
          {"conventions", conventions_text()},
          {"conventions_hash", conventions_hash()},
          {"ok", ok},
          {"result", std::move(result)}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

}  // namespace kahler::report
