#include "cuff/control.hpp"

#include <algorithm>
#include <cmath>

namespace cuff::control {

void CascadeGains::validate(const plant::PlantConfig& cfg) const {
    if (position_kp < 0 || position_ki < 0 || current_kp < 0 || current_ki < 0)
        throw ValidationError("gains must be non-negative");
    if (current_ref_limit_ma > cfg.current_limit_ma)
        throw ValidationError("current_ref_limit exceeds plant current limit");
}

double cascade_step(double p_ref, const plant::MotorState& state, const CascadeGains& gains,
                    CascadeState& cs, double dt) {
    if (!std::isfinite(p_ref)) throw ValidationError("cascade_step: non-finite reference");
    double e_p = p_ref - state.position;
    double i_ref = gains.position_kp * e_p + gains.position_ki * cs.position_integral;
    bool outer_clamped = std::abs(i_ref) > gains.current_ref_limit_ma;
    i_ref = std::clamp(i_ref, -gains.current_ref_limit_ma, gains.current_ref_limit_ma);
    if (!outer_clamped) cs.position_integral += e_p * dt;
    cs.last_i_ref = i_ref;
    return current_step(i_ref, state, gains, cs, dt);
}

double current_step(double i_ref, const plant::MotorState& state, const CascadeGains& gains,
                    CascadeState& cs, double dt) {
    if (!std::isfinite(i_ref)) throw ValidationError("current_step: non-finite reference");
    i_ref = std::clamp(i_ref, -gains.current_ref_limit_ma, gains.current_ref_limit_ma);
    double e_i = i_ref - state.current;
    double pwm = gains.current_kp * e_i + gains.current_ki * cs.current_integral;
    bool clamped = std::abs(pwm) > 1.0;
    pwm = std::clamp(pwm, -1.0, 1.0);
    if (!clamped) cs.current_integral += e_i * dt;
    cs.last_i_ref = i_ref;
    cs.last_pwm = pwm;
    return pwm;
}

void TightenController::drive(plant::Plant& p, double ref) {
    double pwm_l, pwm_r;
    if (mode_ == ControlMode::PositionCurrent) {
        pwm_l = cascade_step(ref, p.left(), gains_, left_, p.config().dt);
        pwm_r = cascade_step(-ref, p.right(), gains_, right_, p.config().dt);
    } else {
        pwm_l = current_step(ref, p.left(), gains_, left_, p.config().dt);
        pwm_r = current_step(-ref, p.right(), gains_, right_, p.config().dt);
    }
    p.step(pwm_l, pwm_r);
}

void TightenController::reset() {
    left_.reset();
    right_.reset();
}

PretensionResult pretension(plant::Plant& p, const CascadeGains& gains,
                            const PretensionOptions& opt) {
    gains.validate(p.config());
    const double dt = p.config().dt;
    auto prev_mode = p.drive_mode();
    p.set_drive_mode(plant::DriveMode::CurrentOnly);
    TightenController ctl(ControlMode::CurrentOnly, gains);

    // Phase 1: tighten at the current ceiling until both motors stall.
    double t = 0.0;
    bool stalled = false;
    while (t < opt.timeout_s) {
        ctl.drive(p, gains.current_ref_limit_ma);
        t += dt;
        if (p.left().stalled && p.right().stalled) {
            stalled = true;
            break;
        }
    }
    if (!stalled) {
        p.set_drive_mode(prev_mode);
        throw ProcedureError("pretension: stall not reached within timeout");
    }

    // Phase 2: ramp the current reference back to zero; the belt unwinds until the
    // absorbed current is close to zero.
    double ramp = opt.release_ramp_s;
    for (double tr = 0.0; tr < ramp; tr += dt) {
        double ref = gains.current_ref_limit_ma * (1.0 - tr / ramp);
        ctl.drive(p, ref);
        t += dt;
    }
    while (t < opt.timeout_s) {
        ctl.drive(p, 0.0);
        t += dt;
        if (std::abs(p.left().current) < opt.release_epsilon_ma &&
            std::abs(p.left().velocity) < p.config().velocity_epsilon)
            break;
    }
    if (t >= opt.timeout_s)
        throw ProcedureError("pretension: release did not settle within timeout");

    p.set_drive_mode(prev_mode);
    PretensionResult r;
    r.zero_offset = p.belt().net_tighten;
    r.residual_force_n = p.belt().normal_force;
    return r;
}

RescaleMap rescale(plant::Plant& p, const CascadeGains& gains, const PretensionResult& pre,
                   double timeout_s) {
    gains.validate(p.config());
    const double dt = p.config().dt;
    p.set_drive_mode(plant::DriveMode::PositionCurrent);
    TightenController ctl(ControlMode::PositionCurrent, gains);

    // A position far beyond anything the motors can reach against the belt.
    double unreachable = pre.zero_offset + 10.0 * p.load().ticks_for_force(25.0);
    double t = 0.0;
    bool stalled = false;
    while (t < timeout_s) {
        ctl.drive(p, unreachable);
        t += dt;
        if (p.left().stalled && p.right().stalled) {
            stalled = true;
            break;
        }
    }
    if (!stalled) throw ProcedureError("rescale: stall not reached within timeout");
    // Let the current settle at the ceiling for a stable position reading.
    for (double ts = 0.0; ts < 1.0; ts += dt) ctl.drive(p, unreachable);

    RescaleMap map;
    map.zero_offset = pre.zero_offset;
    map.max_position = p.belt().net_tighten;
    map.max_force_n = 25.0;
    plant::ArmLoadModel nominal;  // aggregate curve
    if (map.max_position - map.zero_offset < nominal.ticks_for_force(5.0))
        throw ProcedureError("rescale: stall position below the 5 N equivalent (arm too small)");
    return map;
}

std::vector<double> profile_tighten_release(double target, double rise_s, double fall_s,
                                            double dt) {
    if (!(rise_s > 0.0) || !(fall_s > 0.0))
        throw ValidationError("profile: rise and fall must be > 0");
    auto n_rise = static_cast<size_t>(std::llround(rise_s / dt));
    auto n_fall = static_cast<size_t>(std::llround(fall_s / dt));
    std::vector<double> out;
    out.reserve(n_rise + n_fall + 1);
    for (size_t i = 0; i < n_rise; ++i) out.push_back(target * double(i) / double(n_rise));
    for (size_t i = 0; i <= n_fall; ++i)
        out.push_back(target * (1.0 - double(i) / double(n_fall)));
    return out;
}

std::vector<double> staircase_levels(double step_ma, double limit_ma) {
    if (!(step_ma > 0.0)) throw ValidationError("staircase: step must be > 0");
    std::vector<double> levels;
    for (double v = step_ma; v < limit_ma + 0.5 * step_ma; v += step_ma)
        levels.push_back(std::min(v, limit_ma));
    return levels;
}

std::vector<StaircaseSample> run_staircase(plant::Plant& p, const CascadeGains& gains,
                                           double step_ma, double period_s) {
    gains.validate(p.config());
    const double dt = p.config().dt;
    p.set_drive_mode(plant::DriveMode::CurrentOnly);
    TightenController ctl(ControlMode::CurrentOnly, gains);
    std::vector<StaircaseSample> samples;
    for (double level : staircase_levels(step_ma, gains.current_ref_limit_ma)) {
        for (double t = 0.0; t < period_s; t += dt) ctl.drive(p, level);
        samples.push_back({level, p.belt().normal_force});
        if (p.left().stalled && p.right().stalled) break;
    }
    return samples;
}

}  // namespace cuff::control
