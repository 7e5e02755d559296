#ifndef STRUCTPOP_CONFIG_HPP
#define STRUCTPOP_CONFIG_HPP

#include <string>

#include "structpop/model.hpp"

namespace structpop {

/// Parsed run configuration. File format: "[section]" headers with
/// "key = value" lines; '#' starts a comment. Sections/keys:
///   [model] name, beta0, mu0, gamma0, alpha, table_path, mu_table_path,
///           gamma_table_path
///   [grid]  N
///   [run]   T, dt, M
struct RunConfig {
    ModelSpec model;
    int grid_n = 200;
    int steps_m = 0;     // 0: default to grid_n
    double horizon = 0;  // 0: solver default
    double dt = 0;       // requested upwind step; 0: CFL-limited default

    int time_steps() const { return steps_m > 0 ? steps_m : grid_n; }
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

}  // namespace structpop

#endif
