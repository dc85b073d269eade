#include "cuff/softhand.hpp"

#include "cuff/csv.hpp"
#include "cuff/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace cuff::softhand {

using nlohmann::json;

GraspSignal simulate_grasp(const GraspObject& object, double closure_cmd, double duration_s,
                           const SofthandConfig& cfg, uint64_t seed) {
    if (closure_cmd > cfg.p_sh_max)
        throw ValidationError("simulate_grasp: closure command beyond p_sh_max");
    if (closure_cmd < 0.0) throw ValidationError("simulate_grasp: negative closure command");

    const double dt = 1.0 / cfg.sample_rate_hz;
    const auto n = static_cast<size_t>(std::llround(duration_s * cfg.sample_rate_hz));
    const double contact =
        (object.kind == Kind::None) ? cfg.p_sh_max + 1.0 : cfg.contact_position(object.diameter_mm);

    Rng rng = make_rng(seed, "softhand/grasp");
    std::normal_distribution<double> noise(0.0, cfg.rc_noise_sd_ma);

    GraspSignal sig;
    sig.sample_rate_hz = cfg.sample_rate_hz;
    sig.diameter_mm = object.diameter_mm;
    sig.kind = object.kind;
    sig.closure_cmd = closure_cmd;
    sig.seed = seed;
    sig.p_sh.reserve(n);
    sig.rc_sh.reserve(n);

    double p = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double speed = cfg.closure_speed;
        if (p > contact) speed *= cfg.contact_speed_factor;
        double rc_clean = 0.0;
        if (p > contact && object.stiffness_ma_per_tick > 0.0)
            rc_clean = std::min(object.stiffness_ma_per_tick * (p - contact), cfg.rc_sat_ma);
        bool stalled = rc_clean >= cfg.rc_sat_ma;
        if (p < closure_cmd && !stalled) p = std::min(p + speed * dt, closure_cmd);
        sig.p_sh.push_back(p);
        sig.rc_sh.push_back(std::max(0.0, rc_clean + noise(rng)));
    }
    return sig;
}

std::vector<double> grasp_force_estimate(const GraspSignal& signal, double k_f_n_per_ma) {
    if (!(k_f_n_per_ma > 0.0)) throw ValidationError("grasp_force_estimate: k_f must be > 0");
    std::vector<double> force;
    force.reserve(signal.rc_sh.size());
    for (double rc : signal.rc_sh) force.push_back(k_f_n_per_ma * rc);
    return force;
}

BreakResult break_check(const std::vector<double>& force_n, double threshold_n) {
    if (!(threshold_n > 0.0)) throw ValidationError("break_check: threshold must be > 0");
    for (size_t i = 0; i < force_n.size(); ++i)
        if (force_n[i] >= threshold_n) return {true, i};
    return {false, 0};
}

namespace {
std::string kind_name(Kind k) {
    switch (k) {
        case Kind::Rigid: return "rigid";
        case Kind::Soft: return "soft";
        default: return "none";
    }
}
Kind kind_from(const std::string& s) {
    if (s == "rigid") return Kind::Rigid;
    if (s == "soft") return Kind::Soft;
    if (s == "none") return Kind::None;
    throw ParseError("unknown grasp object kind: " + s);
}
}  // namespace

void record(const GraspSignal& signal, const std::string& path) {
    if (signal.p_sh.size() != signal.rc_sh.size())
        throw ValidationError("record: series length mismatch");
    csv::Writer w(path, {"t_s", "p_sh_ticks", "rc_sh_ma"});
    double dt = 1.0 / signal.sample_rate_hz;
    for (size_t i = 0; i < signal.p_sh.size(); ++i)
        w.row({csv::fmt(double(i) * dt), csv::fmt(signal.p_sh[i]), csv::fmt(signal.rc_sh[i])});

    json meta{{"sample_rate_hz", signal.sample_rate_hz},
              {"diameter_mm", signal.diameter_mm},
              {"kind", kind_name(signal.kind)},
              {"closure_cmd", signal.closure_cmd},
              {"seed", signal.seed},
              {"samples", signal.p_sh.size()}};
    std::ofstream out(path + ".json");
    if (!out) throw Error("cannot open for writing: " + path + ".json");
    out << meta.dump(2) << "\n";
}

GraspSignal playback(const std::string& path) {
    std::ifstream meta_in(path + ".json");
    if (!meta_in) throw Error("cannot open sidecar: " + path + ".json");
    json meta = json::parse(meta_in);

    GraspSignal sig;
    sig.sample_rate_hz = meta.at("sample_rate_hz").get<double>();
    sig.diameter_mm = meta.at("diameter_mm").get<double>();
    sig.kind = kind_from(meta.at("kind").get<std::string>());
    sig.closure_cmd = meta.at("closure_cmd").get<double>();
    sig.seed = meta.at("seed").get<uint64_t>();
    auto expected = meta.at("samples").get<size_t>();

    auto t = csv::read(path);
    size_t c_t = t.column("t_s"), c_p = t.column("p_sh_ticks"), c_rc = t.column("rc_sh_ma");
    long lineno = 1;
    double dt_expected = 1.0 / sig.sample_rate_hz;
    for (const auto& cells : t.rows) {
        ++lineno;
        double ts = csv::to_double(cells[c_t], lineno, "t_s");
        size_t idx = sig.p_sh.size();
        if (std::abs(ts - double(idx) * dt_expected) > 0.5 * dt_expected)
            throw ParseError("sample rate mismatch at sample " + std::to_string(idx), lineno);
        sig.p_sh.push_back(csv::to_double(cells[c_p], lineno, "p_sh_ticks"));
        sig.rc_sh.push_back(csv::to_double(cells[c_rc], lineno, "rc_sh_ma"));
    }
    if (sig.p_sh.size() != expected)
        throw ParseError("truncated signal: expected " + std::to_string(expected) +
                             " samples, got " + std::to_string(sig.p_sh.size()) +
                             " (first missing sample " + std::to_string(sig.p_sh.size()) + ")",
                         lineno);
    return sig;
}

}  // namespace cuff::softhand
