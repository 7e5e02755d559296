#ifndef STRUCTPOP_CSV_HPP
#define STRUCTPOP_CSV_HPP

#include <ostream>
#include <string>
#include <vector>

#include "structpop/density.hpp"
#include "structpop/grid.hpp"
#include "structpop/harness.hpp"
#include "structpop/pde.hpp"
#include "structpop/renewal.hpp"
#include "structpop/spectral.hpp"

namespace structpop {

// All writers emit deterministic output: fixed %.17g formatting, rows in
// grid order. Schemas match the documented file interfaces.

void write_density_csv(std::ostream& os, const Grid& grid, const Density& p);          // s,value
void write_history_csv(std::ostream& os, const Grid& grid, const BirthHistory& phi);   // s,t,value
void write_trajectory_csv(std::ostream& os, const Grid& grid, const DensityTrajectory& traj);  // t,s,value
void write_trajectory_csv(std::ostream& os, const Grid& grid, const BirthTrajectory& traj);    // t,s,value
void write_kernel_csv(std::ostream& os, const KernelMatrix& kernel);                   // i,j,value
void write_report_csv(std::ostream& os, const std::vector<EquivalenceReport>& reports);

void write_file(const std::string& path, const std::string& contents);

std::string format_double(double x);

}  // namespace structpop

#endif
