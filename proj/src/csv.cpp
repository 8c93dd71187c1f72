#include "tikflow/csv.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace tikflow {

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trajectory_csv_header(int dim) {
    std::string h = "t";
    for (int i = 1; i <= dim; ++i) h += ",x_" + std::to_string(i);
    h += ",f_gap,grad_norm,dist_min_norm,eps,E";
    return h;
}

namespace {
void put_optional(std::ostream& os, double v) {
    os << ',';
    if (std::isfinite(v)) os << format_real(v);
}
}  // namespace

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& record) {
    os << trajectory_csv_header(record.dim) << '\n';
    for (std::size_t k = 0; k < record.size(); ++k) {
        os << format_real(record.times[k]);
        for (double x : record.states[k]) os << ',' << format_real(x);
        os << ',' << format_real(record.f_gap[k]);
        put_optional(os, record.grad_norm[k]);
        put_optional(os, record.dist_min_norm[k]);
        os << ',' << format_real(record.eps_value[k]);
        put_optional(os, record.energy[k]);
        os << '\n';
    }
}

}  // namespace tikflow
