#pragma once

#include "cuff/plant.hpp"

#include <vector>

namespace cuff::control {

enum class ControlMode { CurrentOnly, PositionCurrent };

struct CascadeGains {
    double position_kp = 5.0;   // mA per tick
    double position_ki = 2.0;   // mA per tick-second
    double current_kp = 0.004;  // pwm per mA
    double current_ki = 0.8;    // pwm per mA-second
    double current_ref_limit_ma = 500.0;

    void validate(const plant::PlantConfig& cfg) const;
};

/// Integrator state for one motor's two PI loops.
struct CascadeState {
    double position_integral = 0.0;
    double current_integral = 0.0;
    double last_i_ref = 0.0;
    double last_pwm = 0.0;

    void reset() { *this = CascadeState{}; }
};

/// One step of the double loop: outer PI makes the current reference from the
/// position error, inner PI makes the pwm from the current error. Conditional
/// integration on both clamps.
double cascade_step(double p_ref, const plant::MotorState& state, const CascadeGains& gains,
                    CascadeState& cs, double dt);

/// Inner loop alone, for the current-only control mode.
double current_step(double i_ref, const plant::MotorState& state, const CascadeGains& gains,
                    CascadeState& cs, double dt);

/// Symmetric tighten-channel driver: left = +ref, right = -ref.
class TightenController {
public:
    TightenController(ControlMode mode, CascadeGains gains) : mode_(mode), gains_(gains) {}

    /// ref is a tighten position (ticks) in PositionCurrent mode,
    /// a tighten current (mA per motor) in CurrentOnly mode.
    void drive(plant::Plant& p, double ref);
    void reset();

    ControlMode mode() const { return mode_; }
    const CascadeGains& gains() const { return gains_; }

private:
    ControlMode mode_;
    CascadeGains gains_;
    CascadeState left_, right_;
};

struct RescaleMap {
    double zero_offset = 0.0;   // ticks, absolute tighten position after pre-tensioning
    double max_position = 0.0;  // ticks, absolute stall position at the current ceiling
    double max_force_n = 25.0;

    double scale(const plant::ArmLoadModel& nominal) const {
        return (max_position - zero_offset) / nominal.ticks_for_force(max_force_n);
    }
    /// Relative tighten command realizing force f on this arm.
    double ticks_for_force(double f, const plant::ArmLoadModel& nominal) const {
        return scale(nominal) * nominal.ticks_for_force(f);
    }
};

struct PretensionOptions {
    double release_epsilon_ma = 10.0;
    double timeout_s = 120.0;
    double release_ramp_s = 5.0;
};

struct PretensionResult {
    double zero_offset = 0.0;
    double residual_force_n = 0.0;
};

/// Tighten to stall, then release until the absorbed current is close to zero.
PretensionResult pretension(plant::Plant& p, const CascadeGains& gains,
                            const PretensionOptions& opt = {});

/// Command an unreachable position, wait for stall, associate that position with 25 N.
RescaleMap rescale(plant::Plant& p, const CascadeGains& gains, const PretensionResult& pre,
                   double timeout_s = 60.0);

/// Piecewise-linear ramp 0 -> target -> 0, sampled at dt.
std::vector<double> profile_tighten_release(double target, double rise_s = 60.0,
                                            double fall_s = 60.0, double dt = 1e-3);

/// Stepwise current reference values: step, 2*step, ... up to limit.
std::vector<double> staircase_levels(double step_ma = 20.0, double limit_ma = 500.0);

struct StaircaseSample {
    double current_ma = 0.0;  // commanded per-motor current
    double force_n = 0.0;     // settled force at that plateau
};

/// Run the staircase protocol on a plant until stall; one sample per plateau.
std::vector<StaircaseSample> run_staircase(plant::Plant& p, const CascadeGains& gains,
                                           double step_ma = 20.0, double period_s = 2.0);

}  // namespace cuff::control
