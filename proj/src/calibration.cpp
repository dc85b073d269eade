#include "cuff/calibration.hpp"

#include "cuff/csv.hpp"
#include "cuff/math_util.hpp"
#include "cuff/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>

namespace cuff::calib {

CharacterizationDataset run_characterization(const CharacterizationConfig& ccfg,
                                             const plant::PlantConfig& pcfg,
                                             const control::CascadeGains& gains) {
    if (ccfg.radii_mm.empty()) throw ValidationError("characterization: empty radius set");
    if (ccfg.repetitions < 1) throw ValidationError("characterization: repetitions < 1");

    CharacterizationDataset out;
    const size_t decimate = std::max<size_t>(1, std::llround(1.0 / (pcfg.dt * ccfg.log_hz)));
    const size_t nr = ccfg.radii_mm.size();

    for (size_t ri = 0; ri < nr; ++ri) {
        double radius = ccfg.radii_mm[ri];
        // Spread the per-radius curves evenly across +-radius_gain_span on the
        // force axis: position = f(g * F), expressed by scaling the coefficients.
        double frac = (nr == 1) ? 0.0 : (2.0 * double(ri) / double(nr - 1) - 1.0);
        double g = 1.0 + ccfg.radius_gain_span * frac;
        plant::ArmLoadModel load;
        load.size_mm = radius;
        load.c3 *= g * g * g;
        load.c2 *= g * g;
        load.c1 *= g;

        for (int rep = 0; rep < ccfg.repetitions; ++rep) {
            Rng noise = make_rng(ccfg.seed, "characterize/" + std::to_string(ri) + "/" +
                                                std::to_string(rep));
            std::normal_distribution<double> wander(0.0, ccfg.tension_wander_sd_n);
            std::normal_distribution<double> pos_noise(0.0, ccfg.position_noise_sd_ticks);
            std::normal_distribution<double> force_noise(0.0, ccfg.force_noise_sd_n);

            plant::Plant p(pcfg, load);
            p.set_loose(100.0);
            control::PretensionResult pre;
            bool trial_valid = true;
            try {
                pre = control::pretension(p, gains);
            } catch (const ProcedureError&) {
                trial_valid = false;
            }
            if (!trial_valid) {
                Row r;
                r.size_mm = radius;
                r.repetition = rep;
                r.valid = false;
                out.rows.push_back(r);
                continue;
            }

            p.set_drive_mode(plant::DriveMode::PositionCurrent);
            control::TightenController ctl(control::ControlMode::PositionCurrent, gains);
            auto profile = control::profile_tighten_release(ccfg.ramp_target_ticks, ccfg.rise_s,
                                                            ccfg.fall_s, pcfg.dt);
            const size_t peak = static_cast<size_t>(std::llround(ccfg.rise_s / pcfg.dt));
            for (size_t i = 0; i < profile.size(); ++i) {
                ctl.drive(p, pre.zero_offset + profile[i]);
                if (i % decimate != 0) continue;
                Row r;
                r.size_mm = radius;
                r.repetition = rep;
                r.phase = (i <= peak) ? Phase::Tighten : Phase::Release;
                double f_true = p.belt().normal_force;
                double w = wander(noise);
                // Belt slack wander moves the encoder against the gauge; the
                // position channel sees it through the local curve slope, so the
                // tick scatter concentrates where the curve is steep.
                double slope = num::cubic_deriv(load.c3, load.c2, load.c1, f_true) * load.gain;
                r.position_ticks = std::max(0.0, p.belt().net_tighten - pre.zero_offset +
                                                     slope * w + pos_noise(noise));
                r.current_ma = std::abs(p.left().current) + std::abs(p.right().current);
                r.force_n = std::max(0.0, f_true + force_noise(noise));
                out.rows.push_back(r);
            }
        }
    }
    return out;
}

double CubicFit::eval(double f) const { return num::cubic_eval(c3, c2, c1, f); }

double CubicFit::invert(double position_ticks, bool* clamped) const {
    double hi = eval(26.0);
    bool clip = position_ticks < 0.0 || position_ticks > hi;
    if (clamped) *clamped = clip;
    double p = std::clamp(position_ticks, 0.0, hi);
    return num::cubic_invert(c3, c2, c1, p, 0.0, 26.0);
}

CubicFit fit_force_to_position(const CharacterizationDataset& data, bool tighten_only) {
    std::vector<const Row*> rows;
    for (const auto& r : data.rows) {
        if (!r.valid) continue;
        if (tighten_only && r.phase != Phase::Tighten) continue;
        rows.push_back(&r);
    }
    std::set<long> distinct;
    for (const auto* r : rows) distinct.insert(std::lround(r->force_n * 1e6));
    if (distinct.size() < 4)
        throw FitError("fit: need at least 4 distinct force values, got " +
                       std::to_string(distinct.size()));

    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd X(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double f = rows[i]->force_n;
        X(i, 0) = f * f * f;
        X(i, 1) = f * f;
        X(i, 2) = f;
        y(i) = rows[i]->position_ticks;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < 3) throw FitError("fit: rank-deficient design matrix");
    Eigen::Vector3d beta = qr.solve(y);

    CubicFit fit;
    fit.c3 = beta(0);
    fit.c2 = beta(1);
    fit.c1 = beta(2);
    fit.n = rows.size();

    double ybar = y.mean();
    double sst = (y.array() - ybar).square().sum();
    double ssr = (y - X * beta).squaredNorm();
    double r2 = (sst > 0.0) ? 1.0 - ssr / sst : 1.0;
    fit.adjusted_r2 = 1.0 - (1.0 - r2) * (double(fit.n) - 1.0) / (double(fit.n) - 3.0);

    if (!num::cubic_strictly_increasing(fit.c3, fit.c2, fit.c1, 0.0, 25.0))
        throw FitError("fit: fitted cubic is not strictly increasing on [0, 25] N "
                       "(c3=" + std::to_string(fit.c3) + ", c2=" + std::to_string(fit.c2) +
                       ", c1=" + std::to_string(fit.c1) + ")");
    return fit;
}

ValidationResult validate_fit(const CubicFit& fit, const CharacterizationDataset& holdout) {
    ValidationResult res;
    double ss = 0.0;
    size_t n = 0;
    for (const auto& r : holdout.rows) {
        if (!r.valid) continue;
        bool clamped = false;
        double predicted = fit.invert(r.position_ticks, &clamped);
        if (clamped) ++res.flagged_rows;
        double e = predicted - r.force_n;
        ss += e * e;
        ++n;
    }
    if (n == 0) throw ValidationError("validate_fit: empty holdout");
    res.rmse_n = std::sqrt(ss / double(n));
    return res;
}

namespace {
const std::vector<std::string> kHeader = {"size_mm",        "repetition", "phase",
                                          "position_ticks", "current_ma", "force_n",
                                          "valid"};
}

void save_dataset(const CharacterizationDataset& data, const std::string& path) {
    csv::Writer w(path, kHeader);
    for (const auto& r : data.rows) {
        w.row({csv::fmt(r.size_mm), std::to_string(r.repetition),
               r.phase == Phase::Tighten ? "tighten" : "release", csv::fmt(r.position_ticks),
               csv::fmt(r.current_ma), csv::fmt(r.force_n), r.valid ? "1" : "0"});
    }
}

CharacterizationDataset load_dataset(const std::string& path) {
    auto t = csv::read(path);
    size_t c_size = t.column("size_mm"), c_rep = t.column("repetition"),
           c_phase = t.column("phase"), c_pos = t.column("position_ticks"),
           c_cur = t.column("current_ma"), c_force = t.column("force_n"),
           c_valid = t.column("valid");
    CharacterizationDataset data;
    long lineno = 1;
    for (const auto& cells : t.rows) {
        ++lineno;
        Row r;
        r.size_mm = csv::to_double(cells[c_size], lineno, "size_mm");
        r.repetition = static_cast<int>(csv::to_double(cells[c_rep], lineno, "repetition"));
        const auto& ph = cells[c_phase];
        if (ph == "tighten") r.phase = Phase::Tighten;
        else if (ph == "release") r.phase = Phase::Release;
        else throw ParseError("bad phase value: '" + ph + "'", lineno);
        r.position_ticks = csv::to_double(cells[c_pos], lineno, "position_ticks");
        r.current_ma = csv::to_double(cells[c_cur], lineno, "current_ma");
        r.force_n = csv::to_double(cells[c_force], lineno, "force_n");
        r.valid = cells[c_valid] != "0";
        data.rows.push_back(r);
    }
    return data;
}

void split_dataset(const CharacterizationDataset& data, double holdout_frac, uint64_t seed,
                   CharacterizationDataset& train, CharacterizationDataset& holdout) {
    if (!(holdout_frac > 0.0 && holdout_frac < 1.0))
        throw ValidationError("split: holdout fraction must be in (0, 1)");
    // Split by trial (size, repetition) so a held-out trial is fully unseen.
    std::set<std::pair<long, int>> trials;
    for (const auto& r : data.rows) trials.insert({std::lround(r.size_mm * 10), r.repetition});
    std::vector<std::pair<long, int>> order(trials.begin(), trials.end());
    Rng rng = make_rng(seed, "calibration/split");
    std::shuffle(order.begin(), order.end(), rng);
    size_t n_hold = std::max<size_t>(1, std::llround(holdout_frac * order.size()));
    std::set<std::pair<long, int>> hold(order.begin(), order.begin() + n_hold);
    for (const auto& r : data.rows) {
        if (hold.count({std::lround(r.size_mm * 10), r.repetition}))
            holdout.rows.push_back(r);
        else
            train.rows.push_back(r);
    }
}

}  // namespace cuff::calib
