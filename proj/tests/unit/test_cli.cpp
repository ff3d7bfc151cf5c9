#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fermi/cli/commands.hpp"
#include "fermi/csv.hpp"
#include "fermi/digest.hpp"

using namespace fermi;
using namespace fermi::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / fs::path("fermi_cli_" + std::to_string(::getpid()) + "_" +
                                                    std::to_string(counter()++));
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int n = 0;
        return n;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// Cheap perturbative run: a few dozen modes and a coarse grid.
json small_perturb() {
    return json::parse(R"({
        "schema_version": 1,
        "qubits": {"k_a": 0.0225, "k_b": 0.0225, "separation": "pi"},
        "field": {"modes": 80, "omega_max": 10},
        "run": {"t_max_factor": 2, "steps": 40}
    })");
}

Context quiet(const fs::path& out, std::ostream& log) {
    Context c;
    c.out = out;
    c.log = &log;
    return c;
}

}  // namespace

TEST_CASE("sha256 of known vectors") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("numbers round-trip through the CSV writer") {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 6.02214076e23}) {
        CHECK(std::stod(format_number(x)) == x);
    }
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(std::nan("")) == "nan");
    CsvTable t;
    t.meta("command", "perturb");
    t.meta("r", 0.5);
    t.column("t", {0.0, 1.0});
    t.column("p", {0.25, 0.5});
    CHECK(t.str() == "# command: perturb\n# r: 0.5\nt,p\n0,0.25\n1,0.5\n");
    t.column("q", {1.0});
    CHECK_THROWS_AS(t.str(), std::invalid_argument);
}

TEST_CASE("single run writes files and a verifiable manifest") {
    TempDir dir;
    std::ostringstream log;
    REQUIRE(run_command("perturb", small_perturb(), quiet(dir.path, log)) == kOk);
    CHECK(fs::exists(dir.path / "curves.csv"));
    const auto manifest = json::parse(slurp(dir.path / "manifest.json"));
    CHECK(verify_manifest(manifest));
    CHECK(manifest["command"] == "perturb");
    for (const auto& f : manifest["files"]) {
        const auto name = f["name"].get<std::string>();
        CHECK(f["sha256"] == sha256_file((dir.path / name).string()));
    }
    auto tampered = manifest;
    tampered["config"]["qubits"]["k_a"] = 0.5;
    CHECK_FALSE(verify_manifest(tampered));
}

TEST_CASE("reruns are byte-identical") {
    TempDir a, b;
    std::ostringstream log;
    REQUIRE(run_command("perturb", small_perturb(), quiet(a.path, log)) == kOk);
    REQUIRE(run_command("perturb", small_perturb(), quiet(b.path, log)) == kOk);
    CHECK(slurp(a.path / "curves.csv") == slurp(b.path / "curves.csv"));
}

TEST_CASE("configuration errors exit 2 and write nothing") {
    TempDir dir;
    std::ostringstream log;
    auto doc = small_perturb();
    doc["qubits"]["bogus"] = 1;
    CHECK(run_command("perturb", doc, quiet(dir.path, log)) == kConfigError);
    CHECK_FALSE(fs::exists(dir.path));
    CHECK(log.str().find("qubits.bogus") != std::string::npos);

    CHECK(run_command("design", json::object({{"design", json::object()}}), quiet(dir.path, log)) == kConfigError);
    CHECK_FALSE(fs::exists(dir.path));
    CHECK(run_command_file("perturb", "/nonexistent.json", quiet(dir.path, log)) == kConfigError);
}

TEST_CASE("runtime failures exit 3 and write nothing") {
    TempDir dir;
    std::ostringstream log;
    auto doc = small_perturb();
    doc["run"] = {{"t_max_factor", 2}, {"steps", 10}};  // far too coarse to resolve the front
    CHECK(run_command("causality", doc, quiet(dir.path, log)) == kRuntimeFailure);
    CHECK_FALSE(fs::exists(dir.path));
    CHECK(log.str().find("front unresolved") != std::string::npos);
}

TEST_CASE("sweep order does not change any output") {
    auto doc = small_perturb();
    doc["sweep"] = json::parse(R"({"command": "perturb", "axes": [
        {"path": "qubits.separation", "values": ["pi/2", "pi", "2*pi"]}]})");
    doc["field"]["modes"] = 160;
    doc["run"] = {{"t_max_factor", 2}, {"dt", 0.1}};
    TempDir plain, shuffled;
    std::ostringstream log;
    REQUIRE(run_command("sweep", doc, quiet(plain.path, log)) == kOk);
    Context c = quiet(shuffled.path, log);
    c.shuffle_seed = 12345;
    c.jobs = 3;
    REQUIRE(run_command("sweep", doc, c) == kOk);
    CHECK(slurp(plain.path / "index.csv") == slurp(shuffled.path / "index.csv"));
    for (int i = 0; i < 3; ++i) {
        const auto p = fs::path("point_000" + std::to_string(i)) / "curves.csv";
        CHECK(slurp(plain.path / p) == slurp(shuffled.path / p));
        CHECK(verify_manifest(json::parse(slurp(shuffled.path / p.parent_path() / "manifest.json"))));
    }
}

TEST_CASE("an empty sweep axis reproduces the single run") {
    auto doc = small_perturb();
    TempDir single, sweep;
    std::ostringstream log;
    REQUIRE(run_command("perturb", doc, quiet(single.path, log)) == kOk);
    doc["sweep"] = json::parse(R"({"command": "perturb", "axes": [{"path": "qubits.k_a", "values": []}]})");
    REQUIRE(run_command("sweep", doc, quiet(sweep.path, log)) == kOk);
    CHECK(slurp(single.path / "curves.csv") == slurp(sweep.path / "point_0000" / "curves.csv"));
}

TEST_CASE("failed sweep points are recorded and the sweep exits 1") {
    auto doc = small_perturb();
    doc["sweep"] = json::parse(R"({"command": "perturb", "axes": [{"path": "qubits.k_a", "values": [0.01, -1]}]})");
    TempDir dir;
    std::ostringstream log;
    CHECK(run_command("sweep", doc, quiet(dir.path, log)) == kPartialFailure);
    CHECK(fs::exists(dir.path / "point_0000" / "curves.csv"));
    CHECK(fs::exists(dir.path / "point_0001" / "error.txt"));
    const auto m = json::parse(slurp(dir.path / "point_0001" / "manifest.json"));
    CHECK(m["status"] == "failed");
    const auto index = slurp(dir.path / "index.csv");
    CHECK(index.find(",failed,2,") != std::string::npos);
}

TEST_CASE("design command on the shipped example") {
    TempDir dir;
    std::ostringstream log;
    auto doc = json::parse(slurp(fs::path(FERMI_CONFIG_DIR) / "design_flux_pair.json"));
    doc["design"]["dressing"]["enabled"] = false;
    REQUIRE(run_command("design", doc, quiet(dir.path, log)) == kOk);
    const auto kv = slurp(dir.path / "feasibility.kv");
    CHECK(kv.find("check.strategy_ka_gt_kb.pass=") != std::string::npos);
    CHECK(fs::exists(dir.path / "feasibility.txt"));
}
