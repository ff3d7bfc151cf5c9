#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "fermi/config.hpp"

using namespace fermi;
using nlohmann::json;

namespace {

json minimal() {
    return json::parse(R"({
        "schema_version": 1,
        "qubits": {"k_a": 0.01, "k_b": 0.02, "separation": "pi"},
        "field": {"modes": 200, "omega_max": 12}
    })");
}

bool mentions(const ValidationError& e, const std::string& field) {
    for (const auto& i : e.issues()) {
        if (i.field == field) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("scalars accept multiples of pi") {
    const double pi = std::numbers::pi;
    CHECK(parse_scalar(json(2.5), "x") == 2.5);
    CHECK(parse_scalar(json("pi"), "x") == pi);
    CHECK(parse_scalar(json("pi/2"), "x") == doctest::Approx(pi / 2));
    CHECK(parse_scalar(json("2*pi"), "x") == doctest::Approx(2 * pi));
    CHECK(parse_scalar(json("0.5*pi"), "x") == doctest::Approx(pi / 2));
    CHECK_THROWS_AS(parse_scalar(json("tau"), "x"), ValidationError);
    CHECK_THROWS_AS(parse_scalar(json(true), "x"), ValidationError);
}

TEST_CASE("defaults are derived from the separation") {
    const auto cfg = parse_config(minimal());
    const auto& m = cfg.require_model();
    const auto& run = cfg.require_run();
    CHECK(m.params.omega_b == m.params.omega_a);
    CHECK(m.params.separation() == doctest::Approx(std::numbers::pi));
    CHECK(m.disc.box_length == doctest::Approx(8 * std::numbers::pi));
    CHECK(run.grid.t_max == doctest::Approx(2 * std::numbers::pi));
    CHECK(run.grid.steps == 126);
    CHECK(run.tol == 1e-10);
    CHECK(run.initial == InitialKind::ExcitedAGroundB);
    CHECK(cfg.perturbation.include_pair_term);
    // the design section always exists so that the design command can list what is missing
    REQUIRE(cfg.design.has_value());
    CHECK(missing_fields(*cfg.design).size() == 10);
}

TEST_CASE("dt is turned into a step count") {
    auto doc = minimal();
    doc["run"] = {{"t_max", 2.0}, {"dt", 0.01}};
    const auto cfg = parse_config(doc);
    CHECK(cfg.require_run().grid.steps == 200);
    doc["run"]["steps"] = 10;
    CHECK_THROWS_AS(parse_config(doc), ValidationError);
}

TEST_CASE("unknown keys and missing fields are all reported") {
    auto doc = minimal();
    doc["qubits"].erase("k_a");
    doc["qubits"]["kk_b"] = 1;
    doc["field"]["cutoff"] = "gaussian";
    doc["extra"] = 1;
    try {
        parse_config(doc);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.issues().size() >= 4);
        CHECK(mentions(e, "qubits.k_a"));
        CHECK(mentions(e, "qubits.kk_b"));
        CHECK(mentions(e, "config.extra"));
    }
}

TEST_CASE("model validation errors surface through the parser") {
    auto doc = minimal();
    doc["field"]["box_length"] = 1.0;
    CHECK_THROWS_AS(parse_config(doc), ValidationError);
    doc = minimal();
    doc["schema_version"] = 7;
    CHECK_THROWS_AS(parse_config(doc), ValidationError);
}

TEST_CASE("ladder rungs rescale a soft cutoff with omega_max") {
    auto doc = minimal();
    doc["field"]["cutoff"] = "exponential";
    doc["field"]["omega_c"] = 2.0;
    doc["causality"] = {{"ladder", json::array({{{"omega_max", 12}}, {{"omega_max", 24}, {"modes", 400}}})}};
    const auto cfg = parse_config(doc);
    REQUIRE(cfg.causality.ladder.size() == 2);
    CHECK(cfg.causality.ladder[0].omega_c == doctest::Approx(2.0));
    CHECK(cfg.causality.ladder[1].omega_c == doctest::Approx(4.0));
    CHECK(cfg.causality.ladder[1].modes == 400);
}

TEST_CASE("sweep expansion is row-major and strips the sweep section") {
    auto doc = minimal();
    doc["sweep"] = json::parse(R"({"command": "perturb", "axes": [
        {"path": "qubits.separation", "values": ["pi/2", "pi"]},
        {"path": "qubits.k_a", "values": [0.01, 0.02, 0.03]}]})");
    const auto cfg = parse_config(doc);
    REQUIRE(cfg.sweep.has_value());
    const auto points = expand_sweep(doc, *cfg.sweep);
    REQUIRE(points.size() == 6);
    CHECK(points[0]["qubits"]["separation"] == "pi/2");
    CHECK(points[2]["qubits"]["k_a"] == 0.03);
    CHECK(points[3]["qubits"]["separation"] == "pi");
    for (const auto& p : points) {
        CHECK_FALSE(p.contains("sweep"));
        CHECK_NOTHROW(parse_config(p));
    }

    doc["sweep"]["axes"][1]["path"] = "qubits.nothing";
    CHECK_THROWS_AS(parse_config(doc), ValidationError);
}

TEST_CASE("an empty axis leaves a single point") {
    auto doc = minimal();
    doc["sweep"] = json::parse(R"({"command": "perturb", "axes": [{"path": "qubits.k_a", "values": []}]})");
    const auto cfg = parse_config(doc);
    const auto points = expand_sweep(doc, *cfg.sweep);
    REQUIRE(points.size() == 1);
    auto base = doc;
    base.erase("sweep");
    CHECK(points[0] == base);
}

TEST_CASE("set_path creates intermediate objects") {
    json doc = json::object();
    set_path(doc, "a.b.c", 3);
    CHECK(doc["a"]["b"]["c"] == 3);
}

TEST_CASE("canonical dump ignores key order") {
    const auto a = json::parse(R"({"b": 1, "a": {"y": 2, "x": 3}})");
    const auto b = json::parse(R"({"a": {"x": 3, "y": 2}, "b": 1})");
    CHECK(canonical_dump(a) == canonical_dump(b));
}

TEST_CASE("design section and design-only documents") {
    const auto doc = json::parse(R"({"design": {"temperature_k": 0.05,
        "qubit_a": {"gap_hz": 1e9}, "dressing": {"enabled": false, "modes": 64}}})");
    const auto cfg = parse_config(doc);
    REQUIRE(cfg.design.has_value());
    CHECK(cfg.design->temperature_k == 0.05);
    CHECK(cfg.design->a.gap_hz == 1e9);
    CHECK_FALSE(cfg.design->compute_dressing);
    CHECK(cfg.design->dressing.modes == 64);
    CHECK_FALSE(cfg.model.has_value());
    CHECK_THROWS_AS(cfg.require_model(), ValidationError);
}

TEST_CASE("every shipped configuration parses") {
    std::size_t n = 0;
    for (const auto& entry : std::filesystem::directory_iterator(FERMI_CONFIG_DIR)) {
        if (entry.path().extension() != ".json") continue;
        CAPTURE(entry.path().string());
        CHECK_NOTHROW(load_config_file(entry.path().string()));
        ++n;
    }
    CHECK(n >= 6);
    CHECK_THROWS_AS(load_config_file("/nonexistent.json"), ValidationError);
}
