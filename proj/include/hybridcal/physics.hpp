#pragma once

#include <cstddef>
#include <vector>

namespace hybridcal::physics {

/// Constants of the drag-physics truth model.
struct PhysicsParams {
    double mass = 1.0;        // kg
    double gravity = 9.8;     // m/s^2
    double drag_coeff = 0.01; // kg/m

    void validate() const;  // mass > 0, gravity > 0, drag_coeff >= 0
};

/// A candidate firing decision.
struct LaunchInput {
    double v0 = 0.0;      // initial speed, m/s
    double psi_deg = 0.0; // launch angle, degrees

    /// v0 > 0 and 0 < psi <= 90. psi = 90 is the degenerate straight-up shot
    /// (zero range, handled without root solving).
    void validate() const;
};

struct TrajectoryState {
    double t;  // s
    double x;  // m
    double z;  // m
    double vx; // m/s
    double vz; // m/s
};

inline double deg_to_rad(double deg) { return deg * 0.017453292519943295; }

/// Time to apex from vertical launch speed vz0:
///   t_p = sqrt(m/(C_D g)) * atan(vz0 * sqrt(C_D/(m g)))
/// with the vacuum limit vz0/g when drag is negligible.
double peak_time(const PhysicsParams& p, double vz0);

/// Apex altitude. Closed form (m/(2 C_D)) * ln(1 + C_D vz0^2/(m g)),
/// vacuum limit vz0^2/(2g).
double peak_height(const PhysicsParams& p, double vz0);

/// Altitude on the descent branch, t >= t_peak:
///   z(t) = z_peak - (m/C_D) * ln cosh((t - t_peak) * sqrt(C_D g / m))
/// Strictly decreasing in t; z(t_peak) = z_peak.
double descent_altitude(const PhysicsParams& p, double z_peak, double t_peak, double t);

/// Total flight time: the unique root of descent_altitude(t) = 0 beyond the
/// apex. Bracketed bisection; throws if the bracket cannot be expanded to a
/// sign change (non-physical parameter set).
double solve_flight_time(const PhysicsParams& p, const LaunchInput& launch);

/// Horizontal distance at impact, from the normalized antiderivative
///   x(t) = (m/C_D) * ln(1 + (C_D/m) v0 cos(psi) t)
/// evaluated at the flight time. Vacuum limit equals simple_range.
double impact_distance(const PhysicsParams& p, const LaunchInput& launch);

/// Drag-free parabolic range (2 v0^2 / g) sin(psi) cos(psi).
double simple_range(double gravity, const LaunchInput& launch);

/// The gravity-independent factor 2 v0^2 sin(psi) cos(psi) of simple_range.
double range_factor(const LaunchInput& launch);

/// Fixed-step RK4 integration of the full drag ODE system from launch until
/// the descent z-zero crossing; the final state is interpolated onto z = 0.
/// Verification oracle for the closed forms above.
std::vector<TrajectoryState> integrate_trajectory_oracle(
    const PhysicsParams& p, const LaunchInput& launch, double dt,
    std::size_t max_steps = 200'000'000);

/// Summary of the same integration without storing the trace.
struct OracleImpact {
    double t_peak;   // vz zero crossing, linearly interpolated
    double z_peak;   // max altitude over steps
    double t_impact; // z zero crossing on descent, interpolated
    double x_impact; // horizontal distance at the crossing
};
OracleImpact integrate_impact_oracle(const PhysicsParams& p, const LaunchInput& launch,
                                     double dt, std::size_t max_steps = 200'000'000);

}  // namespace hybridcal::physics
