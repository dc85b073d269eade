#include "cuff/calibration.hpp"
#include "cuff/csv.hpp"
#include "cuff/math_util.hpp"
#include "cuff/rng.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>

using namespace cuff;
using namespace cuff::calib;

namespace {

/// Noise-free rows sampled straight from the device cubic.
CharacterizationDataset synthetic_dataset(double pos_noise_sd = 0.0, uint64_t seed = 5) {
    CharacterizationDataset data;
    Rng rng = make_rng(seed, "test/synthetic-calib");
    std::normal_distribution<double> noise(0.0, pos_noise_sd > 0.0 ? pos_noise_sd : 1.0);
    for (int rep = 0; rep < 4; ++rep)
        for (double f = 0.25; f <= 25.0; f += 0.25) {
            Row r;
            r.size_mm = 80.0;
            r.repetition = rep;
            r.force_n = f;
            r.position_ticks = num::cubic_eval(0.1138, -5.204, 89.22, f) +
                               (pos_noise_sd > 0.0 ? noise(rng) : 0.0);
            data.rows.push_back(r);
        }
    return data;
}

}  // namespace

TEST_CASE("noiseless fit recovers the device coefficients to 1e-9 relative") {
    auto fit = fit_force_to_position(synthetic_dataset());
    CHECK(fit.c3 == doctest::Approx(0.1138).epsilon(1e-9));
    CHECK(fit.c2 == doctest::Approx(-5.204).epsilon(1e-9));
    CHECK(fit.c1 == doctest::Approx(89.22).epsilon(1e-9));
    CHECK(fit.adjusted_r2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("40-tick position noise lands adjusted R^2 in the reference bracket") {
    auto fit = fit_force_to_position(synthetic_dataset(40.0));
    CHECK(fit.adjusted_r2 > 0.90);
    CHECK(fit.adjusted_r2 < 0.97);
}

TEST_CASE("fit rejects degenerate designs") {
    CharacterizationDataset flat;
    for (int k = 0; k < 10; ++k) {
        Row r;
        r.force_n = 5.0;
        r.position_ticks = 330.0;
        flat.rows.push_back(r);
    }
    CHECK_THROWS_AS(fit_force_to_position(flat), FitError);

    CharacterizationDataset two;
    for (int k = 0; k < 10; ++k) {
        Row r;
        r.force_n = (k % 2) ? 5.0 : 10.0;
        r.position_ticks = (k % 2) ? 330.0 : 434.0;
        two.rows.push_back(r);
    }
    CHECK_THROWS_AS(fit_force_to_position(two), FitError);
}

TEST_CASE("self-consistency: fit -> invert -> refit") {
    auto fit = fit_force_to_position(synthetic_dataset());
    CharacterizationDataset regen;
    for (double f = 0.5; f <= 25.0; f += 0.5) {
        Row r;
        r.position_ticks = fit.eval(f);
        r.force_n = fit.invert(r.position_ticks);
        regen.rows.push_back(r);
    }
    auto refit = fit_force_to_position(regen);
    CHECK(refit.c3 == doctest::Approx(fit.c3).epsilon(1e-6));
    CHECK(refit.c2 == doctest::Approx(fit.c2).epsilon(1e-6));
    CHECK(refit.c1 == doctest::Approx(fit.c1).epsilon(1e-6));
}

TEST_CASE("validation on self-generated holdout gives zero RMSE") {
    auto fit = fit_force_to_position(synthetic_dataset());
    CharacterizationDataset holdout;
    for (double f = 1.0; f <= 24.0; f += 1.0) {
        Row r;
        r.force_n = f;
        r.position_ticks = fit.eval(f);
        holdout.rows.push_back(r);
    }
    auto val = validate_fit(fit, holdout);
    CHECK(val.rmse_n == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(val.flagged_rows == 0);

    CharacterizationDataset empty;
    CHECK_THROWS_AS(validate_fit(fit, empty), ValidationError);
}

TEST_CASE("out-of-range holdout positions are clamped and flagged") {
    auto fit = fit_force_to_position(synthetic_dataset());
    CharacterizationDataset holdout;
    Row r;
    r.force_n = 26.0;
    r.position_ticks = fit.eval(26.0) + 500.0;
    holdout.rows.push_back(r);
    auto val = validate_fit(fit, holdout);
    CHECK(val.flagged_rows == 1);
}

TEST_CASE("dataset CSV round-trip and parse errors") {
    auto data = synthetic_dataset();
    data.rows[3].valid = false;
    data.rows[5].phase = Phase::Release;
    const std::string path = "calib_roundtrip_test.csv";
    save_dataset(data, path);
    auto loaded = load_dataset(path);
    REQUIRE(loaded.rows.size() == data.rows.size());
    for (size_t i = 0; i < data.rows.size(); ++i) {
        CHECK(loaded.rows[i].force_n == data.rows[i].force_n);
        CHECK(loaded.rows[i].position_ticks == data.rows[i].position_ticks);
        CHECK(loaded.rows[i].valid == data.rows[i].valid);
        CHECK(loaded.rows[i].phase == data.rows[i].phase);
    }
    std::remove(path.c_str());

    {
        std::ofstream bad("calib_bad_test.csv");
        bad << "size_mm,repetition,phase,position_ticks,current_ma,force_n,valid\n";
        for (int k = 0; k < 5; ++k) bad << "80,0,tighten,100,50,1.5,1\n";
        bad << "80,0,tighten,100,50,oops,1\n";
    }
    try {
        load_dataset("calib_bad_test.csv");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line == 7);
    }
    std::remove("calib_bad_test.csv");

    {
        std::ofstream bad("calib_missing_test.csv");
        bad << "size_mm,repetition\n80,0\n";
    }
    CHECK_THROWS_AS(load_dataset("calib_missing_test.csv"), ParseError);
    std::remove("calib_missing_test.csv");
}

TEST_CASE("trial split is deterministic and disjoint") {
    auto data = synthetic_dataset();
    CharacterizationDataset tr1, ho1, tr2, ho2;
    split_dataset(data, 0.25, 9, tr1, ho1);
    split_dataset(data, 0.25, 9, tr2, ho2);
    CHECK(tr1.rows.size() == tr2.rows.size());
    CHECK(ho1.rows.size() == ho2.rows.size());
    CHECK(tr1.rows.size() + ho1.rows.size() == data.rows.size());
    CHECK(ho1.rows.size() > 0);
    CHECK_THROWS_AS(split_dataset(data, 0.0, 1, tr1, ho1), ValidationError);
}

TEST_CASE("small characterization run: structure and determinism") {
    CharacterizationConfig ccfg;
    ccfg.radii_mm = {80.0, 115.0};
    ccfg.repetitions = 1;
    ccfg.rise_s = 2.0;
    ccfg.fall_s = 2.0;
    ccfg.ramp_target_ticks = 400.0;
    plant::PlantConfig pcfg;
    control::CascadeGains gains;
    auto a = run_characterization(ccfg, pcfg, gains);
    auto b = run_characterization(ccfg, pcfg, gains);
    REQUIRE(a.rows.size() == b.rows.size());
    CHECK(a.rows.size() > 100);
    for (size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].position_ticks == b.rows[i].position_ticks);
        CHECK(a.rows[i].force_n == b.rows[i].force_n);
        CHECK(a.rows[i].position_ticks >= 0.0);
        CHECK(a.rows[i].force_n >= 0.0);
    }
    CHECK_THROWS_AS(run_characterization(CharacterizationConfig{.radii_mm = {}}, pcfg, gains),
                    ValidationError);
}
