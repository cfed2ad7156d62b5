#include "cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <unistd.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

fs::path scratch_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("shuttle_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

fs::path write_config(const json& doc) {
    static std::atomic<int> counter{0};
    const fs::path p = scratch_dir() / ("cfg" + std::to_string(counter++) + ".json");
    std::ofstream(p) << doc.dump(2);
    return p;
}

Outcome run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = shuttle::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

json base_config() {
    return {
        {"params",
         {{"mass", {{"value", 1.455e-25}, {"unit", "kg"}}},
          {"omega0", {{"value", 4.0}, {"unit", "two_pi_mhz"}}},
          {"distance", {{"value", 50.0}, {"unit", "um"}}},
          {"duration", {{"value", 2.0}, {"unit", "us"}}}}},
        {"perturbation",
         {{"type", "frequency_sine"}, {"amplitude", 0.01}, {"omega", {{"value", 6.0}, {"unit", "two_pi_mhz"}}}}},
    };
}

json omega_scan(int points) {
    return {{"variable", "omega"},
            {"min", {{"value", 1.0}, {"unit", "two_pi_mhz"}}},
            {"max", {{"value", 12.0}, {"unit", "two_pi_mhz"}}},
            {"points", points}};
}

int data_rows(const std::string& csv) {
    std::istringstream s(csv);
    std::string line;
    int rows = -1;  // header
    while (std::getline(s, line)) {
        if (!line.empty() && line[0] != '#') {
            ++rows;
        }
    }
    return rows;
}

}  // namespace

TEST_CASE("version flag") {
    const Outcome o = run({"--version"});
    CHECK(o.code == 0);
    CHECK(o.out.find("shuttle 1.0.0") != std::string::npos);
}

TEST_CASE("scan writes a provenance-tagged CSV") {
    json c = base_config();
    c["scan"] = omega_scan(7);
    const fs::path out = scratch_dir() / "scan.csv";
    const Outcome o = run({"scan", "--config", write_config(c).string(), "--out", out.string()});
    REQUIRE(o.code == 0);
    const std::string csv = slurp(out);
    CHECK(csv.rfind("# tool: shuttle 1.0.0\n", 0) == 0);
    CHECK(csv.find("# config_hash: fnv1a64:") != std::string::npos);
    CHECK(csv.find("scan_value,static_quanta,dynamical_quanta,total_quanta") != std::string::npos);
    CHECK(csv.find('\r') == std::string::npos);
    CHECK(data_rows(csv) == 7);
    const json report = json::parse(o.out);
    CHECK(report["command"] == "scan");
}

TEST_CASE("CSV is identical across runs and thread counts") {
    json c = base_config();
    c["scan"] = omega_scan(9);
    const std::string cfg = write_config(c).string();
    const Outcome a = run({"scan", "--config", cfg, "--threads", "1"});
    const Outcome b = run({"scan", "--config", cfg, "--threads", "4"});
    const Outcome d = run({"scan", "--config", cfg, "--threads", "4"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(b.out == d.out);
}

TEST_CASE("frequency units round-trip exactly") {
    json a = base_config();
    json b = base_config();
    b["params"]["omega0"] = {{"value", 2.0 * std::numbers::pi * 4e6}, {"unit", "rad_per_s"}};
    a["scan"] = omega_scan(2);
    b["scan"] = omega_scan(2);
    const Outcome x = run({"scan", "--config", write_config(a).string()});
    const Outcome y = run({"scan", "--config", write_config(b).string()});
    REQUIRE(x.code == 0);
    REQUIRE(y.code == 0);
    const json rx = json::parse(x.err);
    const json ry = json::parse(y.err);
    CHECK(rx["params"]["omega0_rad_per_s"].get<double>() == ry["params"]["omega0_rad_per_s"].get<double>());
}

TEST_CASE("malformed configuration exits with code 2") {
    json c = base_config();
    c["params"]["distance"] = 50.0;  // dimensioned input without a unit
    Outcome o = run({"design", "--config", write_config(c).string()});
    CHECK(o.code == 2);
    const json e = json::parse(o.err);
    CHECK(e["error"]["exit_code"] == 2);
    CHECK(e["error"]["kind"] == "config");

    o = run({"design", "--config", (scratch_dir() / "missing.json").string()});
    CHECK(o.code == 2);
    o = run({"design"});
    CHECK(o.code == 2);

    c = base_config();
    c["params"]["omega0"]["unit"] = "MHz";
    CHECK(run({"design", "--config", write_config(c).string()}).code == 2);
}

TEST_CASE("design reports a cancelled target") {
    json c = base_config();
    c["params"]["duration"] = {{"value", 2.0}, {"unit", "us"}};
    c["protocol"] = {{"type", "fourier"}, {"targets", json::array({{{"value", 5.0}, {"unit", "two_pi_mhz"}}})}};
    const fs::path out = scratch_dir() / "design.csv";
    const Outcome o = run({"design", "--config", write_config(c).string(), "--out", out.string()});
    REQUIRE(o.code == 0);
    const json r = json::parse(o.out);
    CHECK(r["command"] == "design");
    CHECK(r["system"]["terms"] == 4);
    CHECK(slurp(out).find("t,qc0,qc0_dot,qc0_ddot,Q0") != std::string::npos);
    CHECK(data_rows(slurp(out)) > 100);
}

TEST_CASE("underdetermined design exits with code 4") {
    json c = base_config();
    c["protocol"] = {{"type", "fourier"}, {"terms", 3}};
    const Outcome o = run({"design", "--config", write_config(c).string()});
    CHECK(o.code == 4);
    CHECK(json::parse(o.err)["error"]["kind"] == "design");
}

TEST_CASE("verify warns above the perturbative range") {
    json c = base_config();
    c["perturbation"]["amplitude"] = 0.1;
    c["scan"] = {{"variable", "duration"},
                 {"min", {{"value", 1.0}, {"unit", "us"}}},
                 {"max", {{"value", 2.0}, {"unit", "us"}}},
                 {"points", 2}};
    const Outcome o = run({"verify", "--config", write_config(c).string()});
    REQUIRE(o.code == 0);
    const json r = json::parse(o.err);
    CHECK(r["warning"].get<std::string>().find("perturbative accuracy degraded") != std::string::npos);
    CHECK(o.out.find("exact_quanta,perturbative_quanta,relative_error") != std::string::npos);
}

TEST_CASE("ga without a nullspace has nothing to optimize") {
    json c = base_config();
    c["params"]["duration"] = {{"value", 0.5}, {"unit", "us"}};
    c["perturbation"]["omega"] = {{"value", 5.0}, {"unit", "two_pi_mhz"}};
    c["protocol"] = {{"type", "fourier"}, {"terms", 4}};
    const Outcome o = run({"ga", "--config", write_config(c).string()});
    CHECK(o.code == 2);
    CHECK(o.err.find("nothing to optimize") != std::string::npos);
}

TEST_CASE("ga with a fixed seed is reproducible") {
    json c = base_config();
    c["params"]["duration"] = {{"value", 0.5}, {"unit", "us"}};
    c["perturbation"]["omega"] = {{"value", 5.0}, {"unit", "two_pi_mhz"}};
    c["protocol"] = {{"type", "fourier"}, {"terms", 10}};
    const std::string cfg = write_config(c).string();
    const Outcome a = run({"ga", "--config", cfg, "--seed", "11"});
    const Outcome b = run({"ga", "--config", cfg, "--seed", "11", "--threads", "3"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const json r = json::parse(a.err);
    CHECK(r["seed"] == 11);
    CHECK(r["best_cost"].get<double>() == 0.0);
    CHECK(r["converged"] == true);
    CHECK(r["nullspace_dimension"] == 6);
}

TEST_CASE("oct single solve") {
    json c = base_config();
    c["params"]["duration"] = {{"value", 10.0}, {"unit", "us"}};
    c["perturbation"]["omega"] = {{"value", 5.0}, {"unit", "two_pi_mhz"}};
    c["protocol"] = {{"type", "oct"}};
    const Outcome o = run({"oct", "--config", write_config(c).string()});
    REQUIRE(o.code == 0);
    const json r = json::parse(o.err);
    CHECK(r["endpoint_residual"].get<double>() < 1e-8);
    CHECK(o.out.find("t,u,Q0") != std::string::npos);
}
