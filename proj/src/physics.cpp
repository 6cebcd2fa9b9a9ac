#include "hybridcal/physics.hpp"

#include <cmath>
#include <stdexcept>

namespace hybridcal::physics {

namespace {

// Below this value of C_D v^2 / (m g) the closed forms switch to their
// vacuum limits to avoid 0/0 in the arctan/log expressions.
constexpr double kVacuumThreshold = 1e-10;

double log_cosh(double u) {
    const double a = std::abs(u);
    return a + std::log1p(std::exp(-2.0 * a)) - 0.6931471805599453094;
}

}  // namespace

void PhysicsParams::validate() const {
    if (!(mass > 0.0)) throw std::invalid_argument("PhysicsParams: mass must be > 0");
    if (!(gravity > 0.0)) throw std::invalid_argument("PhysicsParams: gravity must be > 0");
    if (!(drag_coeff >= 0.0))
        throw std::invalid_argument("PhysicsParams: drag_coeff must be >= 0");
}

void LaunchInput::validate() const {
    if (!(v0 > 0.0)) throw std::invalid_argument("LaunchInput: v0 must be > 0");
    if (!(psi_deg > 0.0 && psi_deg <= 90.0))
        throw std::invalid_argument("LaunchInput: psi must be in (0, 90] degrees");
}

double peak_time(const PhysicsParams& p, double vz0) {
    if (p.drag_coeff * vz0 * vz0 / (p.mass * p.gravity) < kVacuumThreshold)
        return vz0 / p.gravity;
    const double kappa = std::sqrt(p.drag_coeff / (p.mass * p.gravity));
    return std::atan(vz0 * kappa) / (kappa * p.gravity);
}

double peak_height(const PhysicsParams& p, double vz0) {
    if (p.drag_coeff * vz0 * vz0 / (p.mass * p.gravity) < kVacuumThreshold)
        return vz0 * vz0 / (2.0 * p.gravity);
    return p.mass / (2.0 * p.drag_coeff) *
           std::log1p(p.drag_coeff * vz0 * vz0 / (p.mass * p.gravity));
}

double descent_altitude(const PhysicsParams& p, double z_peak, double t_peak, double t) {
    const double dt = t - t_peak;
    if (p.drag_coeff * p.gravity * dt * dt / p.mass < kVacuumThreshold)
        return z_peak - 0.5 * p.gravity * dt * dt;
    const double inv_tau = std::sqrt(p.drag_coeff * p.gravity / p.mass);
    return z_peak - p.mass / p.drag_coeff * log_cosh(dt * inv_tau);
}

double solve_flight_time(const PhysicsParams& p, const LaunchInput& launch) {
    launch.validate();
    p.validate();
    const double vz0 = launch.v0 * std::sin(deg_to_rad(launch.psi_deg));
    const double t_p = peak_time(p, vz0);
    const double z_p = peak_height(p, vz0);

    double lo = t_p;
    double hi = t_p + 2.0 * vz0 / p.gravity + 1.0;
    int doublings = 0;
    while (descent_altitude(p, z_p, t_p, hi) > 0.0) {
        hi = t_p + 2.0 * (hi - t_p);
        if (++doublings > 60)
            throw std::runtime_error("solve_flight_time: bracket expansion failed");
    }
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (descent_altitude(p, z_p, t_p, mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double impact_distance(const PhysicsParams& p, const LaunchInput& launch) {
    launch.validate();
    p.validate();
    if (launch.psi_deg == 90.0) return 0.0;
    if (p.drag_coeff * launch.v0 * launch.v0 / (p.mass * p.gravity) < kVacuumThreshold)
        return simple_range(p.gravity, launch);
    const double t_f = solve_flight_time(p, launch);
    const double vx0 = launch.v0 * std::cos(deg_to_rad(launch.psi_deg));
    return p.mass / p.drag_coeff * std::log1p(p.drag_coeff / p.mass * vx0 * t_f);
}

double range_factor(const LaunchInput& launch) {
    const double r = deg_to_rad(launch.psi_deg);
    return 2.0 * launch.v0 * launch.v0 * std::sin(r) * std::cos(r);
}

double simple_range(double gravity, const LaunchInput& launch) {
    if (!(gravity > 0.0)) throw std::invalid_argument("simple_range: gravity must be > 0");
    return range_factor(launch) / gravity;
}

namespace {

struct Deriv {
    double ax, az;
};

inline Deriv drag_accel(const PhysicsParams& p, double vx, double vz) {
    const double k = p.drag_coeff / p.mass;
    return {-k * vx * vx, -p.gravity - k * vz * std::abs(vz)};
}

// One RK4 step of (x, z, vx, vz).
inline TrajectoryState rk4_step(const PhysicsParams& p, const TrajectoryState& s, double dt) {
    const Deriv a1 = drag_accel(p, s.vx, s.vz);
    const double vx2 = s.vx + 0.5 * dt * a1.ax, vz2 = s.vz + 0.5 * dt * a1.az;
    const Deriv a2 = drag_accel(p, vx2, vz2);
    const double vx3 = s.vx + 0.5 * dt * a2.ax, vz3 = s.vz + 0.5 * dt * a2.az;
    const Deriv a3 = drag_accel(p, vx3, vz3);
    const double vx4 = s.vx + dt * a3.ax, vz4 = s.vz + dt * a3.az;
    const Deriv a4 = drag_accel(p, vx4, vz4);
    TrajectoryState n;
    n.t = s.t + dt;
    n.x = s.x + dt / 6.0 * (s.vx + 2.0 * vx2 + 2.0 * vx3 + vx4);
    n.z = s.z + dt / 6.0 * (s.vz + 2.0 * vz2 + 2.0 * vz3 + vz4);
    n.vx = s.vx + dt / 6.0 * (a1.ax + 2.0 * a2.ax + 2.0 * a3.ax + a4.ax);
    n.vz = s.vz + dt / 6.0 * (a1.az + 2.0 * a2.az + 2.0 * a3.az + a4.az);
    return n;
}

inline TrajectoryState lerp_state(const TrajectoryState& a, const TrajectoryState& b, double f) {
    return {a.t + f * (b.t - a.t), a.x + f * (b.x - a.x), a.z + f * (b.z - a.z),
            a.vx + f * (b.vx - a.vx), a.vz + f * (b.vz - a.vz)};
}

template <typename Observer>
TrajectoryState integrate_until_impact(const PhysicsParams& p, const LaunchInput& launch,
                                       double dt, std::size_t max_steps, Observer&& observe) {
    launch.validate();
    p.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be > 0");
    const double r = deg_to_rad(launch.psi_deg);
    TrajectoryState s{0.0, 0.0, 0.0, launch.v0 * std::cos(r), launch.v0 * std::sin(r)};
    observe(s);
    for (std::size_t step = 0; step < max_steps; ++step) {
        const TrajectoryState n = rk4_step(p, s, dt);
        if (n.z < 0.0 && s.t > 0.0) {
            const double f = s.z / (s.z - n.z);
            const TrajectoryState hit = lerp_state(s, n, f);
            observe(hit);
            return hit;
        }
        s = n;
        observe(s);
    }
    throw std::runtime_error("integrate: step-count cap exceeded");
}

}  // namespace

std::vector<TrajectoryState> integrate_trajectory_oracle(const PhysicsParams& p,
                                                         const LaunchInput& launch, double dt,
                                                         std::size_t max_steps) {
    std::vector<TrajectoryState> trace;
    integrate_until_impact(p, launch, dt, max_steps,
                           [&](const TrajectoryState& s) { trace.push_back(s); });
    return trace;
}

OracleImpact integrate_impact_oracle(const PhysicsParams& p, const LaunchInput& launch,
                                     double dt, std::size_t max_steps) {
    OracleImpact out{0.0, 0.0, 0.0, 0.0};
    TrajectoryState prev{0.0, 0.0, 0.0, 0.0, 0.0};
    bool have_prev = false;
    bool apex_found = false;
    const TrajectoryState hit =
        integrate_until_impact(p, launch, dt, max_steps, [&](const TrajectoryState& s) {
            if (s.z > out.z_peak) out.z_peak = s.z;
            if (have_prev && !apex_found && prev.vz > 0.0 && s.vz <= 0.0) {
                const double f = prev.vz / (prev.vz - s.vz);
                out.t_peak = prev.t + f * (s.t - prev.t);
                apex_found = true;
            }
            prev = s;
            have_prev = true;
        });
    out.t_impact = hit.t;
    out.x_impact = hit.x;
    return out;
}

}  // namespace hybridcal::physics
