#pragma once

#include "cuff/errors.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cuff::softhand {

enum class Kind { Rigid, Soft, None };

struct GraspObject {
    double diameter_mm = 0.0;
    double stiffness_ma_per_tick = 0.0;  // residual current per tick of penetration
    Kind kind = Kind::None;

    static GraspObject rigid(double diameter_mm, double stiffness = 0.25) {
        return {diameter_mm, stiffness, Kind::Rigid};
    }
    static GraspObject soft(double diameter_mm, double stiffness = 0.05) {
        return {diameter_mm, stiffness, Kind::Soft};
    }
    static GraspObject none() { return {0.0, 0.0, Kind::None}; }
};

struct SofthandConfig {
    double p_sh_max = 19000.0;     // ticks; largest referenced closure is 18000
    double d_open_mm = 280.0;      // aperture scale of the synthetic contact model
    double closure_speed = 12000;  // ticks/s free closing speed
    double contact_speed_factor = 0.25;  // closing slowdown after contact
    double rc_sat_ma = 1000.0;     // motor current ceiling
    double rc_noise_sd_ma = 4.0;
    double sample_rate_hz = 1000.0;

    /// Contact position for an object diameter: larger objects stop the hand earlier.
    double contact_position(double diameter_mm) const {
        return p_sh_max * (1.0 - diameter_mm / d_open_mm);
    }
};

struct GraspSignal {
    double sample_rate_hz = 1000.0;
    std::vector<double> p_sh;   // encoder ticks, nondecreasing during closure
    std::vector<double> rc_sh;  // residual current, mA, >= 0
    // label metadata
    double diameter_mm = 0.0;
    Kind kind = Kind::None;
    double closure_cmd = 0.0;
    uint64_t seed = 0;
};

/// Closure ramp toward closure_cmd; past contact the position slows and the
/// residual current rises with stiffness * penetration, saturating at rc_sat.
GraspSignal simulate_grasp(const GraspObject& object, double closure_cmd, double duration_s,
                           const SofthandConfig& cfg, uint64_t seed);

/// Linear residual-current-to-force surrogate.
std::vector<double> grasp_force_estimate(const GraspSignal& signal, double k_f_n_per_ma);

struct BreakResult {
    bool broken = false;
    size_t first_break_index = 0;
};
/// Broken iff any sample reaches the threshold; index of the first crossing.
BreakResult break_check(const std::vector<double>& force_n, double threshold_n = 35.0);

/// CSV + JSON-sidecar round trip (sidecar at path + ".json").
void record(const GraspSignal& signal, const std::string& path);
GraspSignal playback(const std::string& path);

}  // namespace cuff::softhand
