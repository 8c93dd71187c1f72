#pragma once

#include <iosfwd>
#include <string>

#include "tikflow/integrate.hpp"

namespace tikflow {

/// 17 significant digits; round-trips any double exactly.
std::string format_real(double v);

/// Header `t,x_1..x_d,f_gap,grad_norm,dist_min_norm,eps,E`; NaN diagnostics
/// serialize as empty fields.
void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& record);

std::string trajectory_csv_header(int dim);

}  // namespace tikflow
