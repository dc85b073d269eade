#include "cuff/softhand.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>

using namespace cuff;
using namespace cuff::softhand;

TEST_CASE("free closure reaches the command with only noise-level residual") {
    SofthandConfig cfg;
    auto sig = simulate_grasp(GraspObject::none(), cfg.p_sh_max, 3.0, cfg, 1);
    CHECK(sig.p_sh.back() == doctest::Approx(cfg.p_sh_max));
    CHECK(sig.rc_sh.back() < 5.0 * cfg.rc_noise_sd_ma);
    for (size_t i = 1; i < sig.p_sh.size(); ++i) CHECK(sig.p_sh[i] >= sig.p_sh[i - 1]);
    for (double rc : sig.rc_sh) CHECK(rc >= 0.0);
}

TEST_CASE("larger objects stop the hand earlier") {
    SofthandConfig cfg;
    CHECK(cfg.contact_position(80.0) < cfg.contact_position(60.0));
    CHECK(cfg.contact_position(60.0) < cfg.contact_position(40.0));
    auto sig80 = simulate_grasp(GraspObject::rigid(80.0), 18000.0, 3.0, cfg, 1);
    auto sig40 = simulate_grasp(GraspObject::rigid(40.0), 18000.0, 3.0, cfg, 1);
    CHECK(sig80.p_sh.back() < sig40.p_sh.back() + 1.0);
    CHECK(sig80.rc_sh.back() > sig40.rc_sh.back());
}

TEST_CASE("residual current rises with closure command") {
    SofthandConfig cfg;
    GraspObject obj = GraspObject::rigid(60.0);
    double prev = -1.0;
    for (double cmd : {15000.0, 16500.0, 18000.0}) {
        auto sig = simulate_grasp(obj, cmd, 4.0, cfg, 1);
        CHECK(sig.rc_sh.back() > prev);
        prev = sig.rc_sh.back();
    }
}

TEST_CASE("stiffer objects draw more residual current") {
    SofthandConfig cfg;
    auto rigid = simulate_grasp(GraspObject::rigid(60.0), 18000.0, 3.0, cfg, 1);
    auto soft = simulate_grasp(GraspObject::soft(60.0), 18000.0, 3.0, cfg, 1);
    CHECK(rigid.rc_sh.back() > soft.rc_sh.back());
}

TEST_CASE("grasps are deterministic per seed") {
    SofthandConfig cfg;
    auto a = simulate_grasp(GraspObject::rigid(60.0), 18000.0, 1.0, cfg, 9);
    auto b = simulate_grasp(GraspObject::rigid(60.0), 18000.0, 1.0, cfg, 9);
    auto c = simulate_grasp(GraspObject::rigid(60.0), 18000.0, 1.0, cfg, 10);
    CHECK(a.rc_sh == b.rc_sh);
    CHECK(a.rc_sh != c.rc_sh);
    CHECK(a.p_sh == c.p_sh);  // noise enters only the current channel
}

TEST_CASE("closure command validation") {
    SofthandConfig cfg;
    CHECK_THROWS_AS(simulate_grasp(GraspObject::none(), cfg.p_sh_max + 1.0, 1.0, cfg, 1),
                    ValidationError);
    CHECK_THROWS_AS(simulate_grasp(GraspObject::none(), -1.0, 1.0, cfg, 1), ValidationError);
}

TEST_CASE("force estimate is linear in the residual current") {
    GraspSignal sig;
    sig.rc_sh = {0.0, 100.0, 875.0};
    sig.p_sh = {0.0, 0.0, 0.0};
    auto f = grasp_force_estimate(sig, 0.04);
    CHECK(f[0] == 0.0);
    CHECK(f[1] == doctest::Approx(4.0));
    CHECK(f[2] == doctest::Approx(35.0));
    CHECK_THROWS_AS(grasp_force_estimate(sig, 0.0), ValidationError);
}

TEST_CASE("break threshold semantics: first crossing, never before") {
    CHECK_FALSE(break_check({10.0, 20.0, 34.9}).broken);
    auto r = break_check({10.0, 34.9, 35.0, 36.0, 35.0});
    CHECK(r.broken);
    CHECK(r.first_break_index == 2);
    CHECK_FALSE(break_check({}).broken);
    CHECK_THROWS_AS(break_check({1.0}, 0.0), ValidationError);
}

TEST_CASE("record / playback round-trip") {
    SofthandConfig cfg;
    auto sig = simulate_grasp(GraspObject::rigid(60.0), 18000.0, 0.5, cfg, 4);
    const std::string path = "grasp_roundtrip_test.csv";
    record(sig, path);
    auto back = playback(path);
    CHECK(back.p_sh == sig.p_sh);
    CHECK(back.rc_sh == sig.rc_sh);
    CHECK(back.diameter_mm == sig.diameter_mm);
    CHECK(back.kind == sig.kind);
    CHECK(back.closure_cmd == sig.closure_cmd);
    std::remove(path.c_str());
    std::remove((path + ".json").c_str());
}

TEST_CASE("truncated recording is rejected with the missing sample index") {
    SofthandConfig cfg;
    auto sig = simulate_grasp(GraspObject::rigid(60.0), 18000.0, 0.1, cfg, 4);
    const std::string path = "grasp_truncated_test.csv";
    record(sig, path);
    {
        // Drop the last line.
        std::ifstream in(path);
        std::string all, line;
        int n = 0;
        while (std::getline(in, line)) ++n;
        in.clear();
        in.seekg(0);
        std::ofstream out(path + ".tmp");
        for (int k = 0; k < n - 1; ++k) {
            std::getline(in, line);
            out << line << "\n";
        }
    }
    std::rename((path + ".tmp").c_str(), path.c_str());
    try {
        playback(path);
        FAIL("expected a truncation error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("99") != std::string::npos);
    }
    std::remove(path.c_str());
    std::remove((path + ".json").c_str());
}
