#include <fftw3.h>
#include <openssl/crypto.h>
#include <openssl/evp.h>

#include <fstream>
#include <sstream>

#include "common.hpp"

namespace covlab::exp {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << bytes;
  if (!out) throw std::runtime_error("short write to " + p.string());
}

// Sidecars excluded from checksums: the manifest itself and the timing log.
bool is_sidecar(const std::string& name) { return name == "manifest.json" || name == "run.log"; }

}  // namespace

std::string library_version() { return "1.0.0"; }

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string config_hash(const json& config) { return sha256_hex(config.dump()); }

void write_run(const fs::path& dir, const json& config, const ScenarioReport& report) {
  fs::create_directories(dir);
  write_file(dir / "config.json", config.dump(2) + "\n");
  for (const Table& t : report.tables) write_file(dir / (t.name + ".csv"), t.csv());
  json summary;
  summary["scenario"] = report.scenario;
  summary["config_hash"] = config_hash(config);
  summary["passed"] = report.passed();
  summary["seeds"] = report.seeds;
  summary["results"] = report.results;
  summary["checks"] = json::array();
  for (const Check& c : report.checks) {
    summary["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}, {"data", c.data}});
  }
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  std::string log;
  for (const auto& line : report.log) log += line + "\n";
  write_file(dir / "run.log", log);
  emit_manifest(dir);
}

json emit_manifest(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("run directory " + dir.string() + " does not exist");
  if (!fs::exists(dir / "config.json")) throw std::runtime_error("run directory " + dir.string() + " holds no completed run");
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && !is_sidecar(name)) names.push_back(name);
  }
  std::sort(names.begin(), names.end());
  json m;
  const json config = json::parse(read_file(dir / "config.json"));
  m["config_hash"] = config_hash(config);
  m["scenario"] = config.value("scenario", "");
  m["seeds"] = json::array();
  if (fs::exists(dir / "summary.json")) m["seeds"] = json::parse(read_file(dir / "summary.json")).value("seeds", json::array());
  m["versions"] = {{"covlab", library_version()},
                   {"fftw", std::string(fftw_version)},
                   {"openssl", std::string(OpenSSL_version(OPENSSL_VERSION))},
                   {"compiler", std::string(__VERSION__)}};
  m["files"] = json::object();
  for (const auto& n : names) m["files"][n] = sha256_hex(read_file(dir / n));
  write_file(dir / "manifest.json", m.dump(2) + "\n");
  return m;
}

VerifyResult verify_run(const fs::path& dir) {
  VerifyResult r;
  if (!fs::is_directory(dir)) throw std::runtime_error("run directory " + dir.string() + " does not exist");
  if (!fs::exists(dir / "manifest.json")) throw std::runtime_error("run directory " + dir.string() + " has no manifest");
  const json m = json::parse(read_file(dir / "manifest.json"));
  const json& files = m.at("files");
  for (const auto& [name, digest] : files.items()) {
    if (!fs::exists(dir / name)) {
      r.problems.push_back(name + ": missing");
      continue;
    }
    if (sha256_hex(read_file(dir / name)) != digest.get<std::string>()) r.problems.push_back(name + ": checksum mismatch");
  }
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && !is_sidecar(name) && !files.contains(name)) r.problems.push_back(name + ": not in manifest");
  }
  if (fs::exists(dir / "config.json") &&
      config_hash(json::parse(read_file(dir / "config.json"))) != m.value("config_hash", "")) {
    r.problems.push_back("config.json: config hash mismatch");
  }
  r.ok = r.problems.empty();
  return r;
}

}  // namespace covlab::exp
