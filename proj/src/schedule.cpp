#include "tikflow/schedule.hpp"

#include <cmath>
#include <stdexcept>

#include "tikflow/errors.hpp"

namespace tikflow {

std::string to_string(ScheduleFamily f) {
    switch (f) {
        case ScheduleFamily::DeltaOverT: return "delta_over_t";
        case ScheduleFamily::InversePower: return "inverse_power";
        case ScheduleFamily::Constant: return "constant";
        case ScheduleFamily::Zero: return "zero";
    }
    return "?";
}

TikhonovSchedule::TikhonovSchedule(ScheduleFamily f, double p, double t_ref)
    : family_(f), param_(p), t_ref_(t_ref) {
    if (!(t_ref > 0.0)) throw validation_error("schedule: t_ref must be positive");
}

TikhonovSchedule TikhonovSchedule::delta_over_t(double delta, double t_ref) {
    if (!(delta > 0.0)) throw validation_error("schedule: delta must be positive");
    return {ScheduleFamily::DeltaOverT, delta, t_ref};
}

TikhonovSchedule TikhonovSchedule::inverse_power(double r, double t_ref) {
    if (!(r > 0.0 && r < 1.0)) throw validation_error("schedule: r must lie in (0,1)");
    return {ScheduleFamily::InversePower, r, t_ref};
}

TikhonovSchedule TikhonovSchedule::constant(double c, double t_ref) {
    if (!(c >= 0.0)) throw validation_error("schedule: c must be nonnegative");
    return {ScheduleFamily::Constant, c, t_ref};
}

TikhonovSchedule TikhonovSchedule::zero(double t_ref) {
    return {ScheduleFamily::Zero, 0.0, t_ref};
}

namespace {
void require_positive_time(double t) {
    if (!(t > 0.0)) throw std::domain_error("schedule: t must be positive");
}
}  // namespace

double TikhonovSchedule::epsilon(double t) const {
    require_positive_time(t);
    switch (family_) {
        case ScheduleFamily::DeltaOverT: return param_ / t;
        case ScheduleFamily::InversePower: return std::pow(t, -param_);
        case ScheduleFamily::Constant: return param_;
        case ScheduleFamily::Zero: return 0.0;
    }
    return 0.0;
}

double TikhonovSchedule::epsilon_dot(double t) const {
    require_positive_time(t);
    switch (family_) {
        case ScheduleFamily::DeltaOverT: return -param_ / (t * t);
        case ScheduleFamily::InversePower: return -param_ * std::pow(t, -param_ - 1.0);
        case ScheduleFamily::Constant:
        case ScheduleFamily::Zero: return 0.0;
    }
    return 0.0;
}

double TikhonovSchedule::log_gamma(double t) const {
    if (!(t >= t_ref_)) throw std::domain_error("schedule: gamma requires t >= t_ref");
    switch (family_) {
        case ScheduleFamily::DeltaOverT: return param_ * std::log(t / t_ref_);
        case ScheduleFamily::InversePower: {
            const double q = 1.0 - param_;
            return (std::pow(t, q) - std::pow(t_ref_, q)) / q;
        }
        case ScheduleFamily::Constant: return param_ * (t - t_ref_);
        case ScheduleFamily::Zero: return 0.0;
    }
    return 0.0;
}

double TikhonovSchedule::gamma(double t) const { return std::exp(log_gamma(t)); }

bool TikhonovSchedule::vanishes() const {
    return family_ == ScheduleFamily::DeltaOverT || family_ == ScheduleFamily::InversePower ||
           family_ == ScheduleFamily::Zero || (family_ == ScheduleFamily::Constant && param_ == 0.0);
}

bool TikhonovSchedule::positive() const {
    switch (family_) {
        case ScheduleFamily::DeltaOverT:
        case ScheduleFamily::InversePower: return true;
        case ScheduleFamily::Constant: return param_ > 0.0;
        case ScheduleFamily::Zero: return false;
    }
    return false;
}

ComposedSchedule::ComposedSchedule(TikhonovSchedule base, double alpha)
    : base_(base), alpha_(alpha) {
    if (!(alpha > 1.0)) throw std::domain_error("composed schedule: alpha must exceed 1");
}

double ComposedSchedule::tau(double t) const { return t * t / (2.0 * (alpha_ - 1.0)); }

double ComposedSchedule::tau_dot(double t) const { return t / (alpha_ - 1.0); }

double ComposedSchedule::epsilon(double t) const { return base_.epsilon(tau(t)); }

ComposedSchedule composed_schedule(const TikhonovSchedule& s, double alpha) {
    return ComposedSchedule(s, alpha);
}

}  // namespace tikflow
