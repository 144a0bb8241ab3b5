#ifndef CONIWAVE_CONFIG_HPP
#define CONIWAVE_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "coniwave/potential.hpp"
#include "coniwave/profile.hpp"

namespace coniwave {

enum class RunKind { adiabatic, crossing_single, crossing_pair, lz_table, classical_only };

struct InitialSpec {
    Vec q0, p0;
    Mode mode = Mode::minus;
    double y0_sign = +1.0;
    Vec profile_center;   // Gaussian center offset in y
    Vec profile_poly;     // linear polynomial factor coefficients
};

struct LzTableSpec {
    double eta2_min = -4.0, eta2_max = 4.0, eta2_step = 0.05;
    double r = 1.0;
    double s0 = 200.0;
};

struct ExperimentConfig {
    RunKind kind = RunKind::crossing_single;
    double t0 = 0.0;
    double T = 0.8;
    std::vector<double> epsilons;   // positive, descending
    double delta_exponent = 5.0 / 14.0;
    double beta_R = 1.0 / 50.0;     // R = eps^-beta, diagnostics only
    std::string out_dir = "out";
    bool dump_fields = false;

    std::string model_name = "linear-isotropic";
    int dim = 2;
    std::optional<PotentialModel> model;  // built by the parser

    InitialSpec init_minus;
    std::optional<InitialSpec> init_plus;

    int profile_n = 256;
    double profile_L = 12.0;
    int phys_n = 512;
    double phys_L = 0.0;           // 0: size the box from the trajectories
    double dt_factor = 20.0;       // reference dt = eps / dt_factor

    ProfileEvolveOptions profile_opt;
    LzTableSpec lz;

    int threads = 1;
};

// Parses the key-value/section config format. Unknown keys and malformed
// values raise ConfigError with a line diagnostic.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

} // namespace coniwave

#endif
