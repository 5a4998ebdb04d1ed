#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kac/density.hpp"
#include "kac/model.hpp"
#include "kac/rng.hpp"

namespace kac {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown by parse_config for --help; what() is the usage text.
class HelpRequested : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string command;                 // sample | simulate | solve | analyze
    int n = 1000;
    double alpha = 1.0;
    std::string construction = "flat";   // flat | dirichlet | detailed
    double dirichlet_k = 1.0;
    // equilibrium | exp | fig-excess-g | step-equal-spacing | step-plus-outlier | path to (x,density) CSV
    std::string target = "equilibrium";
    double t_end = 1.0;
    double snapshot_dt = 0.0;            // 0 means one snapshot at t_end
    int samples = 1;                     // configurations (sample) or replicas (simulate)
    std::uint64_t seed = 1;
    double bin_width = 0.2;
    std::string output_dir = "kac-out";

    double dt = 0.01;                    // kinetic time step
    int kinetic_points = 512;
    double kinetic_xmax = 12.0;
    std::vector<std::string> inputs;     // configuration CSVs for analyze
    double gap_x = 1.0;
    double gap_window = 0.2;
    int tracked = 5;
    int lowest_k = 10;
    int write_configs = 1;
    std::size_t scatter = 10000;
    bool events = false;
    bool mod_variant = false;
};

// Flags (and an optional --config file, overridden by flags) into a validated config.
RunConfig parse_config(int argc, const char* const* argv);
RunConfig parse_config(const std::vector<std::string>& args);
// Throws ConfigError naming the offending field.
void validate_config(const RunConfig& c);

std::string canonical_string(const RunConfig& c);
std::uint64_t config_hash(const RunConfig& c);

bool is_configuration_target(const std::string& target);
DensityTable target_density(const RunConfig& c);

// z = (1/n, ..., 1/n) pushed through the T_n map.
Configuration step_equal_spacing(const ModelParams& p);
// ceil(n/100) particles from outlier_x upward at the minimal gap; the rest equally
// spaced from 0 so that the total is n.
Configuration step_plus_outlier(const ModelParams& p, double outlier_x = 11.0);

// Draws initial configurations for a config; target tables are built once.
class InitialSampler {
public:
    explicit InitialSampler(const RunConfig& c);
    Configuration draw(RngStream& rng) const;

private:
    RunConfig cfg_;
    ModelParams params_;
    std::optional<DensityTable> target_;
    std::optional<Configuration> fixed_;
    std::vector<double> weights_;
};

Configuration initial_configuration(const RunConfig& c, RngStream& rng);

struct RunResult {
    std::vector<std::string> files;
};

RunResult run_experiment(const RunConfig& c);

}  // namespace kac
