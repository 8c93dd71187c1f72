#pragma once

#include <string>

namespace tikflow {

enum class ScheduleFamily { DeltaOverT, InversePower, Constant, Zero };

std::string to_string(ScheduleFamily f);

/// Vanishing regularization coefficient eps(t) together with its derivative
/// and the integrating factor gamma(t) = exp(int_{t_ref}^t eps(s) ds).
///
/// Families:
///   DeltaOverT    eps(t) = delta / t,   delta > 0
///   InversePower  eps(t) = t^{-r},      0 < r < 1
///   Constant      eps(t) = c,           c >= 0
///   Zero          eps(t) = 0
class TikhonovSchedule {
public:
    static TikhonovSchedule delta_over_t(double delta, double t_ref = 1.0);
    static TikhonovSchedule inverse_power(double r, double t_ref = 1.0);
    static TikhonovSchedule constant(double c, double t_ref = 1.0);
    static TikhonovSchedule zero(double t_ref = 1.0);

    ScheduleFamily family() const { return family_; }
    double t_ref() const { return t_ref_; }
    /// Family parameter: delta, r or c; 0 for the Zero family.
    double parameter() const { return param_; }

    double epsilon(double t) const;
    double epsilon_dot(double t) const;

    /// log of the integrating factor, anchored at t_ref. Closed form for
    /// every family; gamma itself overflows for InversePower at large t,
    /// so diagnostics should work with the log.
    double log_gamma(double t) const;
    double gamma(double t) const;

    /// True when eps(t) -> 0 as t -> infinity.
    bool vanishes() const;
    /// True when eps(t) > 0 for all finite t.
    bool positive() const;

private:
    TikhonovSchedule(ScheduleFamily f, double p, double t_ref);

    ScheduleFamily family_;
    double param_;
    double t_ref_;
};

/// The schedule seen by the second-order systems: t -> eps(tau(t)) with
/// tau(t) = t^2 / (2 (alpha - 1)).
class ComposedSchedule {
public:
    ComposedSchedule(TikhonovSchedule base, double alpha);

    double tau(double t) const;
    double tau_dot(double t) const;
    double epsilon(double t) const;  // = base.epsilon(tau(t))

    const TikhonovSchedule& base() const { return base_; }
    double alpha() const { return alpha_; }

private:
    TikhonovSchedule base_;
    double alpha_;
};

/// Factory mirroring the composition operation.
ComposedSchedule composed_schedule(const TikhonovSchedule& s, double alpha);

}  // namespace tikflow
