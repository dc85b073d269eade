#include "cuff/plant.hpp"

#include "cuff/math_util.hpp"

#include <algorithm>
#include <cmath>

namespace cuff::plant {

void PlantConfig::validate() const {
    if (!(dt > 0.0)) throw ValidationError("plant: dt must be > 0");
    if (ticks_per_rev != 4096) throw ValidationError("plant: ticks_per_rev must be 4096");
    if (current_limit_ma < 0.0) throw ValidationError("plant: negative current limit");
    if (roller_diameter_mm <= 0.0) throw ValidationError("plant: roller diameter must be > 0");
}

void ArmLoadModel::validate() const {
    if (gain <= 0.0) throw ValidationError("load model: gain must be > 0");
    if (!num::cubic_strictly_increasing(c3, c2, c1, 0.0, 26.0))
        throw ValidationError("load model: force curve not strictly increasing on [0, 26] N");
}

double ArmLoadModel::ticks_for_force(double f) const {
    return gain * num::cubic_eval(c3, c2, c1, f);
}

ForceReading belt_force(double net_tighten_ticks, const ArmLoadModel& load,
                        double max_force_n) {
    ForceReading r;
    double ceiling = load.ticks_for_force(max_force_n);
    double p = net_tighten_ticks;
    if (p > ceiling) {
        p = ceiling;
        r.saturated = true;
    }
    if (p < 0.0) p = 0.0;
    double f = num::cubic_invert(load.c3, load.c2, load.c1, p / load.gain, 0.0, max_force_n);
    r.newtons = std::max(f, load.pretension_force_n);
    return r;
}

double belt_displacement(double net_slide_ticks, const PlantConfig& cfg) {
    return net_slide_ticks / cfg.ticks_per_rev * M_PI * cfg.roller_diameter_mm;
}

int64_t encoder_read(const MotorState& state) {
    return static_cast<int64_t>(std::trunc(state.position));
}

Plant::Plant(PlantConfig cfg, ArmLoadModel load) : cfg_(std::move(cfg)), load_(std::move(load)) {
    cfg_.validate();
    load_.validate();
}

void Plant::set_loose(double slack_ticks) {
    pos_t_ = -std::abs(slack_ticks);
    vel_t_ = cur_t_ = 0.0;
}

double Plant::holding_current(double pos_t) const {
    if (pos_t <= 0.0) return 0.0;  // slack belt, no tension load
    double ceiling = load_.ticks_for_force(cfg_.max_force_n);
    double p = std::min(pos_t, ceiling);
    double f = num::cubic_invert(load_.c3, load_.c2, load_.c1, p / load_.gain, 0.0,
                                 cfg_.max_force_n);
    return cfg_.load_ma_per_newton * f;
}

double Plant::raw_force(double pos_t) const {
    return belt_force(pos_t, load_, cfg_.max_force_n).newtons;
}

void Plant::step(double pwm_left, double pwm_right) {
    if (!std::isfinite(pwm_left) || !std::isfinite(pwm_right))
        throw ValidationError("plant: non-finite pwm");
    pwm_left = std::clamp(pwm_left, -1.0, 1.0);
    pwm_right = std::clamp(pwm_right, -1.0, 1.0);

    // Opposite/same decomposition: positive left and negative right tighten.
    pwm_t_ = 0.5 * (pwm_left - pwm_right);
    pwm_s_ = 0.5 * (pwm_left + pwm_right);

    const double dt = cfg_.dt;
    const double tau = cfg_.motor_time_constant_s;
    const double fric = cfg_.coulomb_friction_ma;

    // Electrical: first-order lag toward duty-driven current minus back-EMF.
    auto advance_current = [&](double cur, double pwm, double vel) {
        double target = pwm * cfg_.stall_current_ma - cfg_.back_emf_ma_s_per_tick * vel;
        double next = cur + dt / tau * (target - cur);
        return std::clamp(next, -cfg_.current_limit_ma, cfg_.current_limit_ma);
    };
    cur_t_ = advance_current(cur_t_, pwm_t_, vel_t_);
    cur_s_ = advance_current(cur_s_, pwm_s_, vel_s_);

    // Mechanical: quasi-static viscous motion against belt tension plus stiction.
    auto advance_velocity = [&](double cur, double load_ma) {
        double drive = cur - load_ma;
        if (std::abs(drive) <= fric) return 0.0;
        return cfg_.mobility_ticks_s_per_ma * (drive - std::copysign(fric, drive));
    };
    vel_t_ = advance_velocity(cur_t_, holding_current(pos_t_));
    vel_s_ = advance_velocity(cur_s_, 0.0);
    pos_t_ += vel_t_ * dt;
    pos_s_ += vel_s_ * dt;
    t_ += dt;
}

MotorState Plant::left() const {
    MotorState m;
    m.position = pos_s_ + pos_t_;
    m.velocity = vel_s_ + vel_t_;
    m.current = std::clamp(cur_s_ + cur_t_, -cfg_.current_limit_ma, cfg_.current_limit_ma);
    m.pwm = std::clamp(pwm_s_ + pwm_t_, -1.0, 1.0);
    m.stalled = std::abs(m.current) >= cfg_.current_limit_ma - 0.5 &&
                std::abs(m.velocity) < cfg_.velocity_epsilon;
    if (m.stalled) m.current = std::copysign(cfg_.current_limit_ma, m.current);
    return m;
}

MotorState Plant::right() const {
    MotorState m;
    m.position = pos_s_ - pos_t_;
    m.velocity = vel_s_ - vel_t_;
    m.current = std::clamp(cur_s_ - cur_t_, -cfg_.current_limit_ma, cfg_.current_limit_ma);
    m.pwm = std::clamp(pwm_s_ - pwm_t_, -1.0, 1.0);
    m.stalled = std::abs(m.current) >= cfg_.current_limit_ma - 0.5 &&
                std::abs(m.velocity) < cfg_.velocity_epsilon;
    if (m.stalled) m.current = std::copysign(cfg_.current_limit_ma, m.current);
    return m;
}

BeltState Plant::belt() const {
    BeltState b;
    b.net_tighten = pos_t_;
    b.net_slide = pos_s_;
    ForceReading fr = belt_force(pos_t_, load_, cfg_.max_force_n);
    b.saturated = fr.saturated;
    double h = (mode_ == DriveMode::CurrentOnly) ? cfg_.hysteresis_current_mode_n
                                                 : cfg_.hysteresis_position_mode_n;
    double f = fr.newtons;
    if (std::abs(vel_t_) > cfg_.velocity_epsilon) f -= std::copysign(h, vel_t_);
    b.normal_force = std::max(f, load_.pretension_force_n);
    b.tangential_displacement_mm = belt_displacement(pos_s_, cfg_);
    return b;
}

}  // namespace cuff::plant
