#include "fermi/cli/manifest.hpp"

#include <chrono>
#include <ctime>

#include <fmt/format.h>

#include "fermi/csv.hpp"
#include "fermi/digest.hpp"

namespace fermi::cli {

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                       tm.tm_hour, tm.tm_min, tm.tm_sec);
}

Json make_manifest(const ManifestFields& m, const std::vector<OutputFile>& files) {
    Json j;
    j["artifact"] = kArtifactName;
    j["version"] = kArtifactVersion;
    j["command"] = m.command;
    j["config"] = m.config;
    j["config_digest"] = sha256_hex(canonical_dump(m.config));
    j["discretization"] = m.discretization;
    j["started_utc"] = m.started;
    j["finished_utc"] = m.finished;
    j["status"] = m.status;
    if (!m.error.empty()) j["error"] = m.error;
    Json list = Json::array();
    for (const auto& f : files) list.push_back({{"name", f.name}, {"sha256", sha256_hex(f.content)}, {"bytes", f.content.size()}});
    j["files"] = list;
    return j;
}

bool verify_manifest(const Json& manifest) {
    if (!manifest.contains("config") || !manifest.contains("config_digest")) return false;
    return sha256_hex(canonical_dump(manifest.at("config"))) == manifest.at("config_digest").get<std::string>();
}

void write_output_set(const std::filesystem::path& dir, const std::vector<OutputFile>& files, const Json& manifest) {
    std::filesystem::create_directories(dir);
    for (const auto& f : files) write_text((dir / f.name).string(), f.content);
    write_text((dir / "manifest.json").string(), manifest.dump(2) + "\n");
}

}  // namespace fermi::cli
