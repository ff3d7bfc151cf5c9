#pragma once

// JSON configuration: strict parsing into validated run records, canonical
// serialization for digests, and sweep expansion. See docs/config.md.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fermi/causality.hpp"
#include "fermi/dynamics.hpp"
#include "fermi/expdesign.hpp"
#include "fermi/model.hpp"
#include "fermi/perturbation.hpp"

namespace fermi {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct RunSection {
    TimeGrid grid;
    double tol = 1e-10;
    InitialKind initial = InitialKind::ExcitedAGroundB;
    std::size_t density_cells = 0;
    bool rwa = false;
};

struct CausalitySection {
    InitialA initial_a = InitialA::Excited;
    std::vector<Discretization> ladder;
};

struct SweepAxis {
    std::string path;             // dotted path, e.g. "qubits.separation"
    std::vector<Json> values;
};

struct SweepSection {
    std::string command;
    std::vector<SweepAxis> axes;
};

struct AppConfig {
    Json canonical;   // the input document; objects are key-sorted on dump
    std::optional<RunConfig> model;
    std::optional<RunSection> run;
    std::optional<UnitScale> units;
    CausalitySection causality;
    PerturbationOptions perturbation;
    std::optional<DesignInput> design;
    std::optional<SweepSection> sweep;

    /// Throws ValidationError naming the section when a command needs it.
    const RunConfig& require_model() const;
    const RunSection& require_run() const;
};

/// Reads a number or a multiple of pi written as "pi", "2*pi", "pi/2", "0.5*pi".
double parse_scalar(const Json& value, const std::string& field);

/// Strict parse of every present section; unknown keys are errors.
/// Throws ValidationError listing all problems found.
AppConfig parse_config(const Json& doc);
AppConfig load_config_file(const std::string& path);

/// Deterministic text form used for digests.
std::string canonical_dump(const Json& doc);

/// Grid points of a sweep in row-major order (first axis slowest). Each
/// document is the base with the sweep section removed and the axis values set.
std::vector<Json> expand_sweep(const Json& doc, const SweepSection& sweep);

/// Sets doc at a dotted path, creating intermediate objects.
void set_path(Json& doc, const std::string& path, const Json& value);

}  // namespace fermi
