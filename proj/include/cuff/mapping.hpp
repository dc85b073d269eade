#pragma once

#include "cuff/errors.hpp"

#include <cmath>
#include <string>

namespace cuff::mapping {

enum class Variant { Verbatim, Projected };
enum class LogBase { Natural, Ten };
enum class Family { Linear, Nonlinear };

struct MappingConfig {
    double p_sh_max = 19000.0;  // SoftHand encoder span, ticks
    double p_c_max = 2334.0;    // CUFF slide span, ticks (17.91 mm on the default roller)
    double rc_sh_max = std::nan("");  // SoftHand residual current span, mA; must be configured
    double rc_c_max = 756.0;          // CUFF squeeze span, ticks (the 25 N position)

    double gain = 0.4;      // ticks per mA, linear force map
    double alpha = 0.1547;  // exponential map constants as printed
    double beta = 1.944;
    double gamma = 0.9510;  // logarithmic map constants as printed
    double delta = -0.3317;

    Variant variant = Variant::Projected;
    LogBase log_base = LogBase::Natural;

    void validate(bool need_rc = true) const;
};

struct MapResult {
    double value = 0.0;
    bool clamped = false;
};

/// Proportional position map: endpoints exact, out-of-range clamped with flag.
MapResult map_linear_position(double p_sh_meas, const MappingConfig& cfg);

/// Linear force map: residual current times the heuristic gain.
MapResult map_linear_force(double rc_sh_meas, const MappingConfig& cfg);

/// Exponential position map. Verbatim evaluates the printed formula
/// alpha*exp(-beta*x)*p_c_max; projected solves a*(e^{b x}-1)*p_c_max from the
/// stated constraints (2/3 -> 1/3, 1 -> 1), giving b = 3 ln(1+sqrt(3)).
MapResult map_exponential(double p_sh_meas, const MappingConfig& cfg);

/// Logarithmic force map. Verbatim evaluates gamma*log(1 - delta*x)*rc_c_max with the
/// configured base; projected rescales so the endpoint reaches rc_c_max.
MapResult map_logarithmic(double rc_sh_meas, const MappingConfig& cfg);

/// Constants of the projected exponential; exposed for verification.
struct ProjectedExpConstants {
    double a;
    double b;
};
ProjectedExpConstants projected_exp_constants();

/// Slide phase followed by a squeeze phase ("stretch, then immediately squeeze").
struct CombinedCommand {
    long slide_ticks = 0;
    long squeeze_ticks = 0;
    double dwell_s = 0.0;
};
CombinedCommand combined_schedule(double p_sh_meas, double rc_sh_meas, const MappingConfig& cfg,
                                  Family family, double dwell_s = 0.0);

/// Position-channel command under the chosen family (slide ticks, unrounded).
double position_command(double p_sh_meas, const MappingConfig& cfg, Family family);
/// Force-channel command under the chosen family (squeeze ticks, unrounded).
double force_command(double rc_sh_meas, const MappingConfig& cfg, Family family);

}  // namespace cuff::mapping
