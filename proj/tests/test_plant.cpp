#include "cuff/math_util.hpp"
#include "cuff/plant.hpp"
#include "cuff/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace cuff;
using namespace cuff::plant;

TEST_CASE("belt_force pins the device curve") {
    ArmLoadModel load;
    CHECK(belt_force(0.0, load).newtons == doctest::Approx(0.464).epsilon(1e-12));
    CHECK(belt_force(464.4162, load).newtons == doctest::Approx(9.0).epsilon(1e-7));
    CHECK(belt_force(756.125, load).newtons == doctest::Approx(25.0).epsilon(1e-7));
}

TEST_CASE("belt_force round-trip inversion within 1e-6 N on [0, 25]") {
    ArmLoadModel load;
    load.pretension_force_n = 0.0;  // expose the raw inverse
    for (double f = 0.0; f <= 25.0; f += 0.125) {
        double ticks = load.ticks_for_force(f);
        CHECK(belt_force(ticks, load).newtons == doctest::Approx(f).epsilon(1e-6));
    }
}

TEST_CASE("belt_force floors at the pre-tension force") {
    ArmLoadModel load;
    CHECK(belt_force(-50.0, load).newtons == doctest::Approx(load.pretension_force_n));
    CHECK(belt_force(10.0, load).newtons >= load.pretension_force_n);
}

TEST_CASE("belt_force monotone and saturating over random inputs") {
    ArmLoadModel load;
    Rng rng = make_rng(11, "test/belt-monotone");
    std::uniform_real_distribution<double> ticks(-100.0, 1200.0);
    for (int k = 0; k < 100000; ++k) {
        double a = ticks(rng), b = ticks(rng);
        if (a > b) std::swap(a, b);
        auto fa = belt_force(a, load), fb = belt_force(b, load);
        CHECK(fa.newtons <= fb.newtons + 1e-9);
    }
    CHECK(belt_force(load.ticks_for_force(26.0) + 1.0, load).saturated);
    CHECK_FALSE(belt_force(400.0, load).saturated);
}

TEST_CASE("belt displacement closed forms") {
    PlantConfig cfg;
    CHECK(belt_displacement(0.0, cfg) == doctest::Approx(0.0));
    CHECK(belt_displacement(4096.0, cfg) == doctest::Approx(M_PI * 10.0).epsilon(1e-12));
    CHECK(belt_displacement(-2334.0, cfg) == doctest::Approx(-17.91).epsilon(1e-3));
}

TEST_CASE("encoder truncates toward zero and is idempotent") {
    MotorState m;
    m.position = 100.7;
    CHECK(encoder_read(m) == 100);
    m.position = 0.0;
    CHECK(encoder_read(m) == 0);
    m.position = -3.2;
    CHECK(encoder_read(m) == -3);
    m.position = double(encoder_read(m));
    CHECK(encoder_read(m) == -3);
}

TEST_CASE("load model construction rejects a non-monotone curve") {
    ArmLoadModel bad;
    bad.c3 = 1.0;
    bad.c2 = -10.0;
    bad.c1 = 1.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    CHECK_THROWS_AS(Plant(PlantConfig{}, bad), ValidationError);
}

TEST_CASE("zero input leaves a zero-state plant unchanged") {
    Plant p(PlantConfig{}, ArmLoadModel{});
    p.step(0.0, 0.0);
    p.step(0.0, 0.0);
    CHECK(p.left().position == doctest::Approx(0.0));
    CHECK(p.left().current == doctest::Approx(0.0));
    CHECK(p.belt().net_tighten == doctest::Approx(0.0));
}

TEST_CASE("plant rejects non-finite pwm and clamps out-of-range duty") {
    Plant p(PlantConfig{}, ArmLoadModel{});
    CHECK_THROWS_AS(p.step(std::nan(""), 0.0), ValidationError);
    CHECK_THROWS_AS(p.step(0.0, INFINITY), ValidationError);
    p.step(5.0, -5.0);  // clamped to +-1
    CHECK(std::abs(p.left().pwm) <= 1.0);
}

TEST_CASE("constant tighten duty drives the motor to stall at the current limit") {
    PlantConfig cfg;
    Plant p(cfg, ArmLoadModel{});
    double prev = 0.0;
    bool stalled = false;
    for (int k = 0; k < 30000; ++k) {
        p.step(1.0, -1.0);
        double cur = p.left().current;
        CHECK(cur >= prev - 1e-6);  // monotone approach
        prev = cur;
        if (p.left().stalled && p.right().stalled) {
            stalled = true;
            break;
        }
    }
    CHECK(stalled);
    CHECK(p.left().current == doctest::Approx(cfg.current_limit_ma));
    // Stall happens where the holding current meets the ceiling: 25 N.
    CHECK(p.belt().normal_force == doctest::Approx(25.0).epsilon(0.02));
    CHECK(p.belt().net_tighten == doctest::Approx(756.125).epsilon(0.02));
}

TEST_CASE("same-direction drive never changes the normal force") {
    Plant p(PlantConfig{}, ArmLoadModel{});
    for (int k = 0; k < 5000; ++k) {
        p.step(0.7, 0.7);
        CHECK(p.belt().net_tighten == doctest::Approx(0.0));
        CHECK(p.belt().normal_force == doctest::Approx(0.464).epsilon(1e-9));
    }
    CHECK(p.belt().net_slide > 100.0);
}

TEST_CASE("opposite-direction drive never changes the tangential displacement") {
    Plant p(PlantConfig{}, ArmLoadModel{});
    for (int k = 0; k < 5000; ++k) {
        p.step(0.7, -0.7);
        CHECK(p.belt().net_slide == doctest::Approx(0.0));
        CHECK(p.belt().tangential_displacement_mm == doctest::Approx(0.0));
    }
    CHECK(p.belt().net_tighten > 10.0);
}

TEST_CASE("stepping is deterministic") {
    auto run = [] {
        Plant p(PlantConfig{}, ArmLoadModel{});
        for (int k = 0; k < 2000; ++k) p.step(0.3 + 0.001 * k, -0.2);
        return p.belt();
    };
    auto a = run(), b = run();
    CHECK(a.net_tighten == b.net_tighten);
    CHECK(a.net_slide == b.net_slide);
    CHECK(a.normal_force == b.normal_force);
}
