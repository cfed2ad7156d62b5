#pragma once

// JSON run configuration. Every dimensioned input is an object
// {"value": x, "unit": "..."}; conversion to SI happens here and nowhere else.
//
//   frequency: two_pi_mhz (omega = 2 pi x 1e6), rad_per_s
//   mass:      kg
//   length:    m, um
//   time:      s, us

#include "shuttle/model.hpp"
#include "shuttle/optimize.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace shuttle {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Dimension { Frequency, Mass, Length, Time, None };

/// Converts {"value", "unit"} to SI. Dimension::None accepts a bare number.
double parse_quantity(const nlohmann::json& j, Dimension dim, const std::string& where);

struct ScanAxis {
    std::string variable;  // omega, duration, omega0, distance, amplitude
    double min = 0.0;      // SI
    double max = 0.0;
    std::size_t points = 1;
    bool log = false;

    std::vector<double> values() const;
};

struct ProtocolConfig {
    std::string type = "polynomial5";  // polynomial5, fourier, aux, oct
    std::vector<double> targets;       // rad/s; empty means the perturbation frequency
    int omega_derivatives = 0;
    int omega0_derivatives = 0;
    std::optional<std::size_t> terms;
};

struct RunConfig {
    PhysicalParams params;
    int level = 0;
    Perturbation perturbation;
    ProtocolConfig protocol;
    std::optional<ScanAxis> scan;
    /// 0 selects default_step_count.
    std::size_t steps = 0;
    std::size_t samples = 2000;
    /// Report absolute quanta (times amplitude^2) instead of per amplitude^2.
    bool absolute = false;
    GaConfig ga;
    /// Canonical dump of the parsed document and its FNV-1a hash.
    std::string canonical;
    std::uint64_t hash = 0;
};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

std::uint64_t fnv1a64(const std::string& text);

/// Parameters and perturbation with one scan variable replaced.
struct ScanPoint {
    PhysicalParams params;
    Perturbation perturbation;
};

ScanPoint apply_axis(const RunConfig& cfg, const std::string& variable, double value);

/// Perturbation frequency of a single-frequency perturbation (rad/s).
double primary_omega(const Perturbation& p);

}  // namespace shuttle
