#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fermi/config.hpp"

namespace fermi::cli {

inline constexpr const char* kArtifactName = "fermi1d";
inline constexpr const char* kArtifactVersion = "0.1.0";

struct OutputFile {
    std::string name;
    std::string content;
};

/// ISO 8601 UTC timestamp, second resolution.
std::string utc_now();

struct ManifestFields {
    std::string command;
    Json config;                 // canonical configuration document
    Json discretization;         // null when the command has no field model
    std::string started;
    std::string finished;
    std::string status = "ok";
    std::string error;
};

/// Manifest listing every file with its SHA-256 and the config digest.
Json make_manifest(const ManifestFields& m, const std::vector<OutputFile>& files);

/// True when the stored digest matches the stored config.
bool verify_manifest(const Json& manifest);

/// Writes the files and manifest.json into dir, creating it if needed.
void write_output_set(const std::filesystem::path& dir, const std::vector<OutputFile>& files, const Json& manifest);

}  // namespace fermi::cli
