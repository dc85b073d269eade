#pragma once

#include "cuff/errors.hpp"

#include <cstdint>

namespace cuff::plant {

/// Per-motor state as seen by the controller.
struct MotorState {
    double position = 0.0;  // encoder ticks (continuous; quantize with encoder_read)
    double velocity = 0.0;  // ticks/s
    double current = 0.0;   // mA
    double pwm = 0.0;       // duty in [-1, 1]
    bool stalled = false;
};

struct PlantConfig {
    double gear_ratio = 64.0;
    int ticks_per_rev = 4096;
    double roller_diameter_mm = 10.0;
    double dt = 1e-3;                     // s
    double current_limit_ma = 500.0;      // per motor; two-motor stall sum = 1000 mA
    double motor_time_constant_s = 0.05;  // first-order current lag
    double torque_constant_mnm_per_ma = 1.0;

    // Surrogate motor constants (no electrical data in the device datasheet we model;
    // chosen so stall is reached within the staircase protocol timescale).
    double stall_current_ma = 600.0;        // steady free current at full duty
    double back_emf_ma_s_per_tick = 0.1;    // current reduction per tick/s
    double mobility_ticks_s_per_ma = 4.0;   // velocity per excess mA
    double coulomb_friction_ma = 10.0;      // stiction deadband
    double load_ma_per_newton = 19.6;       // holding current per N of belt force
    double velocity_epsilon = 0.5;          // ticks/s, stall detection

    // Measured-force hysteresis half-widths (N); the closed position loop dithers
    // the stiction away, the open current ramp rides it fully.
    double hysteresis_current_mode_n = 1.25;
    double hysteresis_position_mode_n = 0.05;

    double max_force_n = 26.0;  // inversion ceiling; 1 N headroom over the 25 N rescale point

    // Both appear in the source protocol without a reconciled unit; exposed independently.
    double position_ceiling_ticks = 800.0;
    double force_ceiling_n = 17.0;

    void validate() const;
};

/// Maps belt tension state to normal force for one cylinder / arm.
struct ArmLoadModel {
    double size_mm = 80.0;  // label only (fixture size or arm diameter)
    // force N -> net tighten ticks, zero-intercept cubic
    double c3 = 0.1138;
    double c2 = -5.204;
    double c1 = 89.22;
    double gain = 1.0;  // per-radius perturbation of the tick axis
    double pretension_force_n = 0.464;
    double pretension_sd_n = 0.1793;

    void validate() const;  // throws unless the cubic is strictly increasing on [0, 26] N

    /// Eq-style forward evaluation: ticks needed for force f (includes gain).
    double ticks_for_force(double f) const;
};

struct ForceReading {
    double newtons = 0.0;
    bool saturated = false;
};

/// Invert the force curve at a tighten position; floors at the pre-tension force
/// and clamps (with flag) past the model ceiling.
ForceReading belt_force(double net_tighten_ticks, const ArmLoadModel& load,
                        double max_force_n = 26.0);

/// Same-direction motion in mm of belt travel, signed (positive = rightward).
double belt_displacement(double net_slide_ticks, const PlantConfig& cfg);

/// Quantized encoder reading; truncation toward zero, idempotent.
int64_t encoder_read(const MotorState& state);

enum class DriveMode { CurrentOnly, PositionCurrent };

/// Opposite/same decomposition of the two motor positions.
struct BeltState {
    double net_tighten = 0.0;  // ticks, (p_left - p_right)/2
    double net_slide = 0.0;    // ticks, (p_left + p_right)/2
    double normal_force = 0.0;
    double tangential_displacement_mm = 0.0;
    bool saturated = false;
};

/// Discrete-time two-motor device acting on a rigid cylinder.
/// Internally simulated in (tighten, slide) modal coordinates so that
/// same-direction motion can never change the normal force, nor opposite-direction
/// motion the tangential displacement.
class Plant {
public:
    Plant(PlantConfig cfg, ArmLoadModel load);

    void set_drive_mode(DriveMode mode) { mode_ = mode; }
    DriveMode drive_mode() const { return mode_; }

    /// Advance one dt. pwm duty outside [-1,1] is clamped; non-finite input rejected.
    void step(double pwm_left, double pwm_right);

    MotorState left() const;
    MotorState right() const;
    BeltState belt() const;
    double time() const { return t_; }

    const PlantConfig& config() const { return cfg_; }
    const ArmLoadModel& load() const { return load_; }

    /// Start from a loose belt (negative tighten position).
    void set_loose(double slack_ticks);

private:
    double holding_current(double pos_t) const;
    double raw_force(double pos_t) const;

    PlantConfig cfg_;
    ArmLoadModel load_;
    DriveMode mode_ = DriveMode::CurrentOnly;

    // modal state
    double pos_t_ = 0.0, vel_t_ = 0.0, cur_t_ = 0.0, pwm_t_ = 0.0;
    double pos_s_ = 0.0, vel_s_ = 0.0, cur_s_ = 0.0, pwm_s_ = 0.0;
    double t_ = 0.0;
};

}  // namespace cuff::plant
