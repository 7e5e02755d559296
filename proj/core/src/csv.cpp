#include "structpop/csv.hpp"

#include <cstdio>
#include <fstream>

#include "structpop/errors.hpp"

namespace structpop {

std::string format_double(double x) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", x);
    return buffer;
}

void write_density_csv(std::ostream& os, const Grid& grid, const Density& p) {
    os << "s,value\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
        os << format_double(grid.nodes[i]) << ',' << format_double(p[i]) << '\n';
}

void write_history_csv(std::ostream& os, const Grid& grid, const BirthHistory& phi) {
    os << "s,t,value\n";
    for (int k = 0; k <= phi.n_time; ++k)
        for (std::size_t i = 0; i < grid.size(); ++i)
            os << format_double(grid.nodes[i]) << ',' << format_double(phi.time_node(k))
               << ',' << format_double(phi.at(static_cast<int>(i), k)) << '\n';
}

void write_trajectory_csv(std::ostream& os, const Grid& grid, const DensityTrajectory& traj) {
    os << "t,s,value\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k)
        for (std::size_t i = 0; i < grid.size(); ++i)
            os << format_double(traj.times[k]) << ',' << format_double(grid.nodes[i]) << ','
               << format_double(traj.columns[k][i]) << '\n';
}

void write_trajectory_csv(std::ostream& os, const Grid& grid, const BirthTrajectory& traj) {
    os << "t,s,value\n";
    for (int k = 0; k <= traj.n_steps; ++k) {
        auto col = traj.col(k);
        for (std::size_t i = 0; i < grid.size(); ++i)
            os << format_double(traj.time(k)) << ',' << format_double(grid.nodes[i]) << ','
               << format_double(col[i]) << '\n';
    }
}

void write_kernel_csv(std::ostream& os, const KernelMatrix& kernel) {
    os << "i,j,value\n";
    for (int i = 0; i <= kernel.n; ++i)
        for (int j = 0; j <= kernel.n; ++j)
            os << i << ',' << j << ',' << format_double(kernel.at(i, j)) << '\n';
}

void write_report_csv(std::ostream& os, const std::vector<EquivalenceReport>& reports) {
    os << "experiment,N,M,T,sup_coarse,sup_fine,ratio,tolerance,pass\n";
    for (const auto& r : reports)
        os << r.experiment << ',' << r.n_coarse << ',' << r.m_coarse << ','
           << format_double(r.T) << ',' << format_double(r.sup_coarse) << ','
           << format_double(r.sup_fine) << ',' << format_double(r.ratio) << ','
           << format_double(r.tolerance) << ',' << (r.pass ? 1 : 0) << '\n';
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::MalformedConfig, "cannot write " + path);
    out << contents;
}

}  // namespace structpop
