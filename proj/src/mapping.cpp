#include "cuff/mapping.hpp"

#include <algorithm>

namespace cuff::mapping {

void MappingConfig::validate(bool need_rc) const {
    if (!(p_sh_max > 0.0) || !(p_c_max > 0.0) || !(rc_c_max > 0.0))
        throw ValidationError("mapping: spans must be > 0");
    if (need_rc && !(rc_sh_max > 0.0))
        throw ValidationError("mapping: rc_sh_max must be configured (> 0); it has no default");
}

namespace {
double apply_log(double x, LogBase base) {
    return base == LogBase::Natural ? std::log(x) : std::log10(x);
}

MapResult clamp_unit(double x) {
    MapResult r;
    r.value = std::clamp(x, 0.0, 1.0);
    r.clamped = x < 0.0 || x > 1.0;
    return r;
}
}  // namespace

MapResult map_linear_position(double p_sh_meas, const MappingConfig& cfg) {
    cfg.validate(false);
    auto u = clamp_unit(p_sh_meas / cfg.p_sh_max);
    return {u.value * cfg.p_c_max, u.clamped};
}

MapResult map_linear_force(double rc_sh_meas, const MappingConfig& cfg) {
    cfg.validate();
    MapResult r;
    r.clamped = rc_sh_meas < 0.0 || rc_sh_meas > cfg.rc_sh_max;
    r.value = std::clamp(rc_sh_meas, 0.0, cfg.rc_sh_max) * cfg.gain;
    return r;
}

ProjectedExpConstants projected_exp_constants() {
    double b = 3.0 * std::log(1.0 + std::sqrt(3.0));
    double a = 1.0 / std::expm1(b);
    return {a, b};
}

MapResult map_exponential(double p_sh_meas, const MappingConfig& cfg) {
    cfg.validate(false);
    auto u = clamp_unit(p_sh_meas / cfg.p_sh_max);
    double x = u.value;
    double y;
    if (cfg.variant == Variant::Verbatim) {
        y = cfg.alpha * std::exp(-cfg.beta * x);
    } else {
        auto [a, b] = projected_exp_constants();
        y = a * std::expm1(b * x);
    }
    return {y * cfg.p_c_max, u.clamped};
}

MapResult map_logarithmic(double rc_sh_meas, const MappingConfig& cfg) {
    cfg.validate();
    auto u = clamp_unit(rc_sh_meas / cfg.rc_sh_max);
    double x = u.value;
    double arg = 1.0 - cfg.delta * x;
    if (arg <= 0.0) throw ValidationError("mapping: log argument not positive");
    double y = cfg.gamma * apply_log(arg, cfg.log_base);
    if (cfg.variant == Variant::Projected) {
        double end = cfg.gamma * apply_log(1.0 - cfg.delta, cfg.log_base);
        y /= end;
    }
    return {y * cfg.rc_c_max, u.clamped};
}

double position_command(double p_sh_meas, const MappingConfig& cfg, Family family) {
    return family == Family::Linear ? map_linear_position(p_sh_meas, cfg).value
                                    : map_exponential(p_sh_meas, cfg).value;
}

double force_command(double rc_sh_meas, const MappingConfig& cfg, Family family) {
    return family == Family::Linear ? map_linear_force(rc_sh_meas, cfg).value
                                    : map_logarithmic(rc_sh_meas, cfg).value;
}

CombinedCommand combined_schedule(double p_sh_meas, double rc_sh_meas, const MappingConfig& cfg,
                                  Family family, double dwell_s) {
    CombinedCommand cmd;
    cmd.slide_ticks = std::lround(position_command(p_sh_meas, cfg, family));
    cmd.squeeze_ticks = std::lround(force_command(rc_sh_meas, cfg, family));
    cmd.dwell_s = dwell_s;
    return cmd;
}

}  // namespace cuff::mapping
