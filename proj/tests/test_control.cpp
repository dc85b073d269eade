#include "cuff/control.hpp"
#include "cuff/math_util.hpp"
#include "cuff/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace cuff;
using namespace cuff::control;

namespace {
plant::Plant fresh_plant() { return plant::Plant(plant::PlantConfig{}, plant::ArmLoadModel{}); }
}  // namespace

TEST_CASE("gain validation") {
    plant::PlantConfig cfg;
    CascadeGains g;
    CHECK_NOTHROW(g.validate(cfg));
    g.current_ref_limit_ma = cfg.current_limit_ma + 1.0;
    CHECK_THROWS_AS(g.validate(cfg), ValidationError);
    g = CascadeGains{};
    g.position_kp = -1.0;
    CHECK_THROWS_AS(g.validate(cfg), ValidationError);
}

TEST_CASE("zero error with zero integrators yields zero pwm") {
    CascadeGains g;
    CascadeState cs;
    plant::MotorState m;
    m.position = 123.0;
    CHECK(cascade_step(123.0, m, g, cs, 1e-3) == doctest::Approx(0.0));
}

TEST_CASE("cascade rejects non-finite references") {
    CascadeGains g;
    CascadeState cs;
    plant::MotorState m;
    CHECK_THROWS_AS(cascade_step(std::nan(""), m, g, cs, 1e-3), ValidationError);
    CHECK_THROWS_AS(current_step(INFINITY, m, g, cs, 1e-3), ValidationError);
}

TEST_CASE("cascade never violates pwm or current-reference clamps (random refs)") {
    CascadeGains g;
    CascadeState cs;
    Rng rng = make_rng(3, "test/cascade-clamp");
    std::uniform_real_distribution<double> ref(-1e6, 1e6);
    std::uniform_real_distribution<double> pos(-1e5, 1e5);
    std::uniform_real_distribution<double> cur(-500.0, 500.0);
    for (int k = 0; k < 20000; ++k) {
        plant::MotorState m;
        m.position = pos(rng);
        m.current = cur(rng);
        double pwm = cascade_step(ref(rng), m, g, cs, 1e-3);
        CHECK(std::abs(pwm) <= 1.0);
        CHECK(std::abs(cs.last_i_ref) <= g.current_ref_limit_ma);
    }
}

TEST_CASE("unreachable reference: bounded integrators, saturated current") {
    auto p = fresh_plant();
    p.set_drive_mode(plant::DriveMode::PositionCurrent);
    CascadeGains g;
    CascadeState l, r;
    double max_integral = 0.0;
    for (int k = 0; k < 200000; ++k) {
        double pwm_l = cascade_step(5000.0, p.left(), g, l, p.config().dt);
        double pwm_r = cascade_step(-5000.0, p.right(), g, r, p.config().dt);
        p.step(pwm_l, pwm_r);
        max_integral = std::max(max_integral, std::abs(l.position_integral));
        CHECK(std::abs(l.last_i_ref) <= g.current_ref_limit_ma);
    }
    CHECK(p.left().stalled);
    CHECK(max_integral < 1e4);  // conditional integration keeps it bounded
}

TEST_CASE("position step settles within 2% on the free (slide) axis") {
    auto p = fresh_plant();
    CascadeGains g;
    CascadeState l, r;
    for (int k = 0; k < 8000; ++k) {
        double pwm_l = cascade_step(800.0, p.left(), g, l, p.config().dt);
        double pwm_r = cascade_step(800.0, p.right(), g, r, p.config().dt);
        p.step(pwm_l, pwm_r);
        CHECK(std::abs(p.left().current) <= g.current_ref_limit_ma + 1e-6);
    }
    CHECK(p.belt().net_slide == doctest::Approx(800.0).epsilon(0.02));
}

TEST_CASE("pretension lands near the nominal residual force and is idempotent") {
    auto p = fresh_plant();
    p.set_loose(100.0);
    CascadeGains g;
    auto pre = pretension(p, g);
    CHECK(pre.residual_force_n == doctest::Approx(0.464).epsilon(0.5));
    CHECK(pre.residual_force_n < 1.0);
    auto pre2 = pretension(p, g);
    CHECK(std::abs(pre2.zero_offset - pre.zero_offset) < 5.0);
}

TEST_CASE("pretension times out with a dead current limit") {
    plant::PlantConfig cfg;
    cfg.current_limit_ma = 0.0;
    plant::Plant p(cfg, plant::ArmLoadModel{});
    CascadeGains g;
    g.current_ref_limit_ma = 0.0;
    PretensionOptions opt;
    opt.timeout_s = 2.0;
    CHECK_THROWS_AS(pretension(p, g, opt), ProcedureError);
}

TEST_CASE("rescale associates the stall position with 25 N") {
    auto p = fresh_plant();
    p.set_loose(100.0);
    CascadeGains g;
    auto pre = pretension(p, g);
    auto map = rescale(p, g, pre);
    CHECK(map.max_position == doctest::Approx(756.125).epsilon(0.02));
    CHECK(map.max_force_n == 25.0);
    CHECK(map.max_position > map.zero_offset);
    plant::ArmLoadModel nominal;
    CHECK(map.scale(nominal) == doctest::Approx(1.0).epsilon(0.1));
    CHECK(map.ticks_for_force(25.0, nominal) ==
          doctest::Approx(map.max_position - map.zero_offset).epsilon(1e-9));
}

TEST_CASE("rescale flags a degenerate (too small) arm") {
    CascadeGains g;
    PretensionResult pre;
    pre.zero_offset = 750.0;  // pretension claims almost the whole range
    auto p = fresh_plant();
    CHECK_THROWS_AS(rescale(p, g, pre, 30.0), ProcedureError);
}

TEST_CASE("tighten-release profile shape") {
    auto prof = profile_tighten_release(800.0, 60.0, 60.0, 1e-3);
    CHECK(prof.size() == 120001);
    CHECK(prof[0] == doctest::Approx(0.0));
    CHECK(prof[60000] == doctest::Approx(800.0));
    CHECK(prof.back() == doctest::Approx(0.0));
    auto small = profile_tighten_release(100.0, 1.0, 1.0, 1e-3);
    CHECK(small[500] == doctest::Approx(50.0));
    auto zero = profile_tighten_release(0.0, 1.0, 1.0, 1e-3);
    for (double v : zero) CHECK(v == 0.0);
    CHECK_THROWS_AS(profile_tighten_release(10.0, 0.0, 1.0, 1e-3), ValidationError);
}

TEST_CASE("staircase levels and protocol") {
    auto levels = staircase_levels(20.0, 500.0);
    CHECK(levels.size() == 25);
    CHECK(levels.front() == doctest::Approx(20.0));
    CHECK(levels.back() == doctest::Approx(500.0));
    CHECK(staircase_levels(500.0, 500.0).size() == 1);

    auto p = fresh_plant();
    CascadeGains g;
    auto samples = run_staircase(p, g, 50.0, 3.0);
    CHECK(samples.size() <= 10);
    for (size_t i = 1; i < samples.size(); ++i)
        CHECK(samples[i].force_n >= samples[i - 1].force_n - 0.1);
    CHECK(samples.back().force_n == doctest::Approx(25.0).epsilon(0.05));
}

TEST_CASE("position-current hysteresis loop is strictly tighter than current-only") {
    CascadeGains g;

    // Current-only: ramp the per-motor current reference up and back down.
    auto loop_current = [&] {
        auto p = fresh_plant();
        p.set_drive_mode(plant::DriveMode::CurrentOnly);
        TightenController ctl(ControlMode::CurrentOnly, g);
        std::vector<std::pair<double, double>> pts;
        auto prof = profile_tighten_release(470.0, 20.0, 20.0, p.config().dt);
        for (size_t i = 0; i < prof.size(); ++i) {
            ctl.drive(p, prof[i]);
            if (i % 10 == 0) pts.push_back({p.belt().net_tighten, p.belt().normal_force});
        }
        return std::abs(num::polygon_area(pts));
    };

    // Position-current: ramp the tighten position reference over the same range.
    auto loop_position = [&] {
        auto p = fresh_plant();
        p.set_drive_mode(plant::DriveMode::PositionCurrent);
        TightenController ctl(ControlMode::PositionCurrent, g);
        std::vector<std::pair<double, double>> pts;
        auto prof = profile_tighten_release(700.0, 20.0, 20.0, p.config().dt);
        for (size_t i = 0; i < prof.size(); ++i) {
            ctl.drive(p, prof[i]);
            if (i % 10 == 0) pts.push_back({p.belt().net_tighten, p.belt().normal_force});
        }
        return std::abs(num::polygon_area(pts));
    };

    double a_current = loop_current();
    double a_position = loop_position();
    CHECK(a_position < a_current);
    CHECK(a_current > 0.0);
}
