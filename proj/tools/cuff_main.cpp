// cuff: command-line workbench around the simulated device.
//
// Exit codes: 0 success, 1 I/O, 2 usage, 3 runtime/link failure.

#include "cuff/calibration.hpp"
#include "cuff/config.hpp"
#include "cuff/control.hpp"
#include "cuff/csv.hpp"
#include "cuff/errors.hpp"
#include "cuff/mapping.hpp"
#include "cuff/plant.hpp"
#include "cuff/psycho.hpp"
#include "cuff/softhand.hpp"
#include "cuff/teleop.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cuff;

namespace {

constexpr const char* kToolVersion = "1.0.0";

void write_manifest(const fs::path& out_dir, const std::string& subcommand,
                    const json& params, uint64_t seed) {
    json m{{"subcommand", subcommand},
           {"seed", seed},
           {"output_directory", out_dir.string()},
           {"tool_version", kToolVersion},
           {"timestamp",
            std::chrono::duration_cast<std::chrono::seconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count()},
           {"parameters", params}};
    std::ofstream f(out_dir / "manifest.json");
    if (!f) throw Error("cannot write manifest in " + out_dir.string());
    f << m.dump(2) << "\n";
}

void ensure_dir(const fs::path& p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw Error("cannot create output directory: " + p.string());
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw Error("cannot open for writing: " + path.string());
    f << j.dump(2) << "\n";
}

// --- psychophysics trial CSV (subject,block,comparison,order,response) -----

void save_trials(const std::vector<std::vector<psycho::TrialRecord>>& subjects,
                 const std::string& path) {
    csv::Writer w(path, {"subject", "block", "comparison", "order", "response"});
    for (const auto& s : subjects)
        for (const auto& t : s)
            w.row({std::to_string(t.subject_id), t.block, csv::fmt(t.comparison),
                   t.order == psycho::Order::RefFirst ? "ref-first" : "ref-second",
                   std::to_string(t.response)});
}

std::vector<std::vector<psycho::TrialRecord>> load_trials(const std::string& path) {
    csv::Table tab = csv::read(path);
    size_t c_subj = tab.column("subject"), c_block = tab.column("block");
    size_t c_comp = tab.column("comparison"), c_order = tab.column("order");
    size_t c_resp = tab.column("response");
    std::map<int, std::vector<psycho::TrialRecord>> by_subject;
    long lineno = 1;
    for (const auto& r : tab.rows) {
        ++lineno;
        psycho::TrialRecord t;
        t.subject_id = static_cast<int>(csv::to_double(r[c_subj], lineno, "subject"));
        t.block = r[c_block];
        t.comparison = csv::to_double(r[c_comp], lineno, "comparison");
        if (r[c_order] == "ref-first")
            t.order = psycho::Order::RefFirst;
        else if (r[c_order] == "ref-second")
            t.order = psycho::Order::RefSecond;
        else
            throw ParseError("bad order value '" + r[c_order] + "' in " + path, lineno);
        t.response = static_cast<int>(csv::to_double(r[c_resp], lineno, "response"));
        by_subject[t.subject_id].push_back(t);
    }
    std::vector<std::vector<psycho::TrialRecord>> subjects;
    for (auto& [id, trials] : by_subject) subjects.push_back(std::move(trials));
    return subjects;
}

json fit_to_json(const psycho::PsychometricFit& fit) {
    json j{{"beta0", fit.beta0},
           {"beta1", fit.beta1},
           {"pse", fit.pse},
           {"jnd", fit.jnd},
           {"model", fit.model == psycho::ModelKind::Glmm ? "glmm" : "per_subject_glm"},
           {"log_likelihood", fit.log_likelihood}};
    if (fit.model == psycho::ModelKind::Glmm) {
        j["random_effect_sd"] = fit.random_effect_sd;
        if (fit.random_slope_sd > 0.0) j["random_slope_sd"] = fit.random_slope_sd;
    }
    if (fit.ci95_pse) j["ci95_pse"] = {(*fit.ci95_pse)[0], (*fit.ci95_pse)[1]};
    if (fit.ci95_jnd) j["ci95_jnd"] = {(*fit.ci95_jnd)[0], (*fit.ci95_jnd)[1]};
    return j;
}

softhand::GraspObject parse_object(const std::string& spec) {
    if (spec == "none") return softhand::GraspObject::none();
    auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw ValidationError("object must be 'none', 'rigid:<mm>' or 'soft:<mm>': " + spec);
    std::string kind = spec.substr(0, colon);
    double d = 0.0;
    try {
        d = std::stod(spec.substr(colon + 1));
    } catch (const std::exception&) {
        throw ValidationError("bad object diameter in '" + spec + "'");
    }
    if (kind == "rigid") return softhand::GraspObject::rigid(d);
    if (kind == "soft") return softhand::GraspObject::soft(d);
    throw ValidationError("unknown object kind '" + kind + "'");
}

// --- subcommand bodies ------------------------------------------------------

int cmd_characterize(const std::vector<double>& radii, int reps, const std::string& out,
                     uint64_t seed) {
    if (reps < 1) throw ValidationError("--reps must be >= 1");
    ensure_dir(out);
    calib::CharacterizationConfig ccfg;
    if (!radii.empty()) ccfg.radii_mm = radii;
    ccfg.repetitions = reps;
    ccfg.seed = seed;
    plant::PlantConfig pcfg;
    control::CascadeGains gains;
    auto data = calib::run_characterization(ccfg, pcfg, gains);
    calib::save_dataset(data, (fs::path(out) / "characterization.csv").string());
    write_manifest(out, "characterize",
                   json{{"radii", ccfg.radii_mm}, {"reps", reps}}, seed);
    size_t trials = ccfg.radii_mm.size() * size_t(reps);
    std::cout << "characterize: " << trials << " trials, " << data.rows.size()
              << " rows -> " << out << "/characterization.csv\n";
    return 0;
}

int cmd_fit(const std::string& data_path, double holdout_frac, const std::string& out,
            uint64_t seed) {
    if (holdout_frac <= 0.0 || holdout_frac >= 1.0)
        throw ValidationError("--holdout-frac must be in (0, 1)");
    ensure_dir(out);
    auto data = calib::load_dataset(data_path);
    calib::CharacterizationDataset train, holdout;
    calib::split_dataset(data, holdout_frac, seed, train, holdout);
    auto fit = calib::fit_force_to_position(train);
    auto val = calib::validate_fit(fit, holdout);
    json j{{"c3", fit.c3},
           {"c2", fit.c2},
           {"c1", fit.c1},
           {"adjusted_r2", fit.adjusted_r2},
           {"n_train", fit.n},
           {"rmse_n", val.rmse_n},
           {"flagged_rows", val.flagged_rows}};
    write_json(fs::path(out) / "fit.json", j);
    write_manifest(out, "fit",
                   json{{"data", data_path}, {"holdout_frac", holdout_frac}}, seed);
    std::cout << "fit: P = " << fit.c3 << " F^3 + " << fit.c2 << " F^2 + " << fit.c1
              << " F, adjusted R^2 " << fit.adjusted_r2 << ", holdout RMSE " << val.rmse_n
              << " N\n";
    return 0;
}

psycho::StimulusSpec spec_for(const std::string& channel) {
    if (channel == "tangential") return psycho::StimulusSpec::tangential();
    if (channel == "force") return psycho::StimulusSpec::force();
    throw ValidationError("--channel must be tangential or force");
}

int cmd_psycho_run(const std::string& channel, const std::string& direction, int subjects,
                   double pse, double jnd, double between_sd, const std::string& out,
                   uint64_t seed) {
    if (subjects < 1) throw ValidationError("--subjects must be >= 1");
    ensure_dir(out);
    auto spec = spec_for(channel);
    psycho::ObserverTruth truth;
    if (std::isnan(pse)) pse = channel == "force" ? 9.75 : 17.42;
    if (std::isnan(jnd)) jnd = channel == "force" ? 2.21 : 2.91;
    truth.pse = pse;
    truth.jnd = jnd;
    std::string block = channel == "force" ? "force"
                        : direction == "left" ? "leftward"
                                              : "rightward";
    auto pop = psycho::generate_population(spec, truth, subjects, between_sd, block, seed);
    save_trials(pop, (fs::path(out) / "trials.csv").string());
    write_manifest(out, "psycho-run",
                   json{{"channel", channel},
                        {"block", block},
                        {"subjects", subjects},
                        {"pse", pse},
                        {"jnd", jnd},
                        {"between_subject_sd", between_sd}},
                   seed);
    std::cout << "psycho run: " << subjects << " subjects x " << spec.trials_per_session
              << " trials -> " << out << "/trials.csv\n";
    return 0;
}

int cmd_psycho_fit(const std::string& data_path, const std::string& model,
                   const std::string& out, uint64_t seed) {
    ensure_dir(out);
    auto subjects = load_trials(data_path);
    psycho::PsychometricFit fit;
    if (model == "glm") {
        std::vector<psycho::TrialRecord> pooled;
        for (const auto& s : subjects) pooled.insert(pooled.end(), s.begin(), s.end());
        fit = psycho::fit_probit_glm(pooled);
    } else if (model == "glmm") {
        fit = psycho::fit_glmm(subjects);
    } else {
        throw ValidationError("--model must be glm or glmm");
    }
    write_json(fs::path(out) / "psycho_fit.json", fit_to_json(fit));
    write_manifest(out, "psycho-fit", json{{"data", data_path}, {"model", model}}, seed);
    std::cout << "psycho fit (" << model << "): pse " << fit.pse << ", jnd " << fit.jnd
              << "\n";
    return 0;
}

int cmd_psycho_bootstrap(const std::string& data_path, int B, const std::string& fitter_name,
                         const std::string& out, uint64_t seed) {
    ensure_dir(out);
    auto subjects = load_trials(data_path);
    psycho::Fitter fitter = fitter_name == "glmm" ? psycho::Fitter::Glmm
                                                  : psycho::Fitter::PooledGlm;
    auto res = psycho::bootstrap_ci(subjects, fitter, B, seed);
    json j{{"B", B},
           {"fitter", fitter_name},
           {"ci95_pse", {res.ci95_pse[0], res.ci95_pse[1]}},
           {"ci95_jnd", {res.ci95_jnd[0], res.ci95_jnd[1]}},
           {"failed_refits", res.failed_refits}};
    write_json(fs::path(out) / "bootstrap.json", j);
    write_manifest(out, "psycho-bootstrap",
                   json{{"data", data_path}, {"B", B}, {"fitter", fitter_name}}, seed);
    std::cout << "psycho bootstrap: pse CI [" << res.ci95_pse[0] << ", " << res.ci95_pse[1]
              << "], jnd CI [" << res.ci95_jnd[0] << ", " << res.ci95_jnd[1] << "]\n";
    return 0;
}

int cmd_psycho_compare(const std::string& path_a, const std::string& path_b, int B,
                       const std::string& out, uint64_t seed) {
    ensure_dir(out);
    auto a = load_trials(path_a);
    auto b = load_trials(path_b);
    auto cmp = psycho::compare_conditions(a, b, psycho::Channel::TangentialMm,
                                          psycho::Channel::TangentialMm,
                                          psycho::Fitter::PooledGlm, B, seed);
    json j{{"pse_difference", cmp.pse_difference},
           {"jnd_difference", cmp.jnd_difference},
           {"ci95_pse_difference", {cmp.ci95_pse_difference[0], cmp.ci95_pse_difference[1]}},
           {"ci95_jnd_difference", {cmp.ci95_jnd_difference[0], cmp.ci95_jnd_difference[1]}},
           {"pse_ci_includes_zero", cmp.pse_ci_includes_zero},
           {"jnd_ci_includes_zero", cmp.jnd_ci_includes_zero}};
    write_json(fs::path(out) / "comparison.json", j);
    write_manifest(out, "psycho-compare",
                   json{{"data_a", path_a}, {"data_b", path_b}, {"B", B}}, seed);
    std::cout << "psycho compare: jnd difference " << cmp.jnd_difference << " (CI ["
              << cmp.ci95_jnd_difference[0] << ", " << cmp.ci95_jnd_difference[1]
              << "], includes zero: " << (cmp.jnd_ci_includes_zero ? "yes" : "no") << ")\n";
    return 0;
}

int cmd_teleop(const std::string& mapping_name, const std::string& object_spec,
               const std::string& mode_name, double duration, double rc_sh_max,
               double corruption, const std::string& out, uint64_t seed) {
    ensure_dir(out);
    mapping::MappingConfig mcfg;
    mcfg.rc_sh_max = rc_sh_max;
    mcfg.validate();
    mapping::Family family = mapping_name == "nonlinear" ? mapping::Family::Nonlinear
                                                         : mapping::Family::Linear;

    softhand::SofthandConfig hcfg;
    auto object = parse_object(object_spec);
    auto signal = softhand::simulate_grasp(object, 18000.0, duration, hcfg,
                                           substream_seed(seed, "teleop/grasp"));
    teleop::SofthandEndpoint softhand_ep(signal);
    teleop::CuffEndpoint cuff_ep(plant::PlantConfig{}, plant::ArmLoadModel{},
                                 control::CascadeGains{});
    teleop::LinkOptions opt;
    opt.mode = mode_name == "realtime" ? teleop::LinkMode::Realtime
                                       : teleop::LinkMode::Lockstep;
    opt.duration_s = duration;
    opt.corruption_probability = corruption;
    opt.seed = seed;
    auto run = teleop::run_link(softhand_ep, cuff_ep, mcfg, family, opt);

    {
        csv::Writer w((fs::path(out) / "trace.csv").string(),
                      {"t", "p_sh", "rc_sh", "slide_cmd", "squeeze_cmd", "p_left", "p_right",
                       "i_left", "i_right", "force_n", "slide_mm"});
        for (const auto& r : run.trace)
            w.row({csv::fmt(r.t), std::to_string(r.p_sh), std::to_string(r.rc_sh),
                   std::to_string(r.slide_cmd), std::to_string(r.squeeze_cmd),
                   csv::fmt(r.p_left), csv::fmt(r.p_right), csv::fmt(r.i_left),
                   csv::fmt(r.i_right), csv::fmt(r.force_n), csv::fmt(r.slide_mm)});
    }
    {
        std::ofstream f(fs::path(out) / "link_stats.json");
        f << run.stats.to_json() << "\n";
    }
    write_manifest(out, "teleop",
                   json{{"mapping", mapping_name},
                        {"object", object_spec},
                        {"mode", mode_name},
                        {"duration_s", duration},
                        {"rc_sh_max", rc_sh_max},
                        {"corruption", corruption}},
                   seed);
    std::cout << "teleop: " << run.stats.exchanges << " exchanges, "
              << run.stats.frames_crc_fail << " CRC failures -> " << out << "/trace.csv\n";
    return 0;
}

int cmd_discriminate(const std::string& mapping_name, double rc_sh_max,
                     const std::string& out, uint64_t seed) {
    ensure_dir(out);
    mapping::MappingConfig mcfg;
    mcfg.rc_sh_max = rc_sh_max;
    mcfg.validate();
    mapping::Family family = mapping_name == "nonlinear" ? mapping::Family::Nonlinear
                                                         : mapping::Family::Linear;
    psycho::DiscriminationObserver observer;
    psycho::DiscriminationConfig cfg;
    cfg.seed = seed;

    struct Task {
        const char* name;
        psycho::Modality modality;
        std::vector<softhand::GraspObject> objects;
    };
    std::vector<softhand::GraspObject> rigid = {
        softhand::GraspObject::none(), softhand::GraspObject::rigid(40.0),
        softhand::GraspObject::rigid(60.0), softhand::GraspObject::rigid(80.0)};
    std::vector<softhand::GraspObject> mixed = {
        softhand::GraspObject::none(), softhand::GraspObject::rigid(60.0),
        softhand::GraspObject::soft(60.0), softhand::GraspObject::rigid(80.0)};
    std::vector<Task> tasks = {{"proprioception", psycho::Modality::Proprioception, rigid},
                               {"force", psycho::Modality::Force, mixed},
                               {"combined", psycho::Modality::Combined, mixed}};

    json summary;
    for (const auto& task : tasks) {
        auto m = psycho::run_discrimination(mcfg, family, task.objects, observer,
                                            task.modality, cfg);
        std::vector<std::string> header = {"first"};
        header.insert(header.end(), m.labels.begin(), m.labels.end());
        csv::Writer w((fs::path(out) / (std::string(task.name) + "_matrix.csv")).string(),
                      header);
        for (size_t i = 0; i < m.labels.size(); ++i) {
            std::vector<std::string> cells = {m.labels[i]};
            for (double v : m.success[i]) cells.push_back(csv::fmt(v));
            w.row(cells);
        }
        summary[task.name] = {{"mean_success", m.mean_success()},
                              {"mean_offdiagonal_success", m.mean_offdiagonal_success()}};
        std::cout << "discriminate " << task.name << ": mean off-diagonal success "
                  << m.mean_offdiagonal_success() << "\n";
    }
    write_json(fs::path(out) / "summary.json", summary);
    write_manifest(out, "discriminate",
                   json{{"mapping", mapping_name}, {"rc_sh_max", rc_sh_max}}, seed);
    return 0;
}

int cmd_maptable(double rc_sh_max, const std::string& out, uint64_t seed) {
    ensure_dir(out);
    mapping::MappingConfig mcfg;
    mcfg.rc_sh_max = rc_sh_max;
    mcfg.validate();
    csv::Writer w((fs::path(out) / "mapping_table.csv").string(),
                  {"x", "linear_position", "exponential_position", "linear_force",
                   "logarithmic_force"});
    for (int k = 0; k <= 200; ++k) {
        double x = double(k) / 200.0;
        w.row({csv::fmt(x), csv::fmt(mapping::map_linear_position(x * mcfg.p_sh_max, mcfg).value),
               csv::fmt(mapping::map_exponential(x * mcfg.p_sh_max, mcfg).value),
               csv::fmt(mapping::map_linear_force(x * mcfg.rc_sh_max, mcfg).value),
               csv::fmt(mapping::map_logarithmic(x * mcfg.rc_sh_max, mcfg).value)});
    }
    write_manifest(out, "maptable", json{{"rc_sh_max", rc_sh_max}}, seed);
    std::cout << "maptable -> " << out << "/mapping_table.csv\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wearable haptic device workbench"};
    app.require_subcommand(1);
    app.fallthrough();  // accept global options after the subcommand name
    uint64_t seed = 1;
    app.add_option("--seed", seed, "Top-level seed; all randomness derives from it");

    // characterize
    auto* sc_char = app.add_subcommand("characterize", "Run the characterization protocol");
    std::vector<double> radii;
    int reps = 10;
    std::string out = "out";
    sc_char->add_option("--radii", radii, "Fixture radii in mm (default 80 85 90 100 115)");
    sc_char->add_option("--reps", reps, "Repetitions per radius");
    sc_char->add_option("--out", out, "Output directory")->required();

    // fit
    auto* sc_fit = app.add_subcommand("fit", "Fit the force-position cubic to a dataset");
    std::string data_path;
    double holdout_frac = 0.3;
    sc_fit->add_option("--data", data_path, "Characterization CSV")->required();
    sc_fit->add_option("--holdout-frac", holdout_frac, "Validation holdout fraction");
    sc_fit->add_option("--out", out, "Output directory")->required();

    // psycho
    auto* sc_psy = app.add_subcommand("psycho", "Psychophysics sessions and analyses");
    sc_psy->require_subcommand(1);
    std::string channel = "tangential", direction = "right", model = "glmm",
                fitter_name = "glm", path_a, path_b;
    int subjects = 11, B = 1000;
    double pse = std::nan(""), jnd = std::nan(""), between_sd = 0.3;
    auto* sc_run = sc_psy->add_subcommand("run", "Simulate a constant-stimuli experiment");
    sc_run->add_option("--channel", channel, "tangential | force");
    sc_run->add_option("--direction", direction, "right | left (tangential only)");
    sc_run->add_option("--subjects", subjects, "Number of synthetic subjects");
    sc_run->add_option("--pse", pse, "Observer truth PSE (default per channel)");
    sc_run->add_option("--jnd", jnd, "Observer truth JND (default per channel)");
    sc_run->add_option("--between-sd", between_sd, "Between-subject PSE SD");
    sc_run->add_option("--out", out, "Output directory")->required();
    auto* sc_pfit = sc_psy->add_subcommand("fit", "Fit a psychometric model");
    sc_pfit->add_option("--data", data_path, "Trial CSV")->required();
    sc_pfit->add_option("--model", model, "glm | glmm");
    sc_pfit->add_option("--out", out, "Output directory")->required();
    auto* sc_boot = sc_psy->add_subcommand("bootstrap", "Cluster bootstrap intervals");
    sc_boot->add_option("--data", data_path, "Trial CSV")->required();
    sc_boot->add_option("--B", B, "Bootstrap replicates");
    sc_boot->add_option("--fitter", fitter_name, "glm | glmm");
    sc_boot->add_option("--out", out, "Output directory")->required();
    auto* sc_cmp = sc_psy->add_subcommand("compare", "Bootstrap difference of two conditions");
    sc_cmp->add_option("--data-a", path_a, "Trial CSV, condition A")->required();
    sc_cmp->add_option("--data-b", path_b, "Trial CSV, condition B")->required();
    sc_cmp->add_option("--B", B, "Bootstrap replicates");
    sc_cmp->add_option("--out", out, "Output directory")->required();

    // teleop
    auto* sc_tel = app.add_subcommand("teleop", "End-to-end hand-to-device run");
    std::string mapping_name = "linear", object_spec = "rigid:60", mode_name = "lockstep";
    double duration = 1.0, rc_sh_max = std::nan(""), corruption = 0.0;
    sc_tel->add_option("--mapping", mapping_name, "linear | nonlinear");
    sc_tel->add_option("--object", object_spec, "none | rigid:<mm> | soft:<mm>");
    sc_tel->add_option("--mode", mode_name, "lockstep | realtime");
    sc_tel->add_option("--duration", duration, "Run duration, s");
    sc_tel->add_option("--rc-sh-max", rc_sh_max, "Residual current span, mA")->required();
    sc_tel->add_option("--corruption", corruption, "Per-byte corruption probability");
    sc_tel->add_option("--out", out, "Output directory")->required();

    // discriminate
    auto* sc_dis = app.add_subcommand("discriminate", "Object discrimination experiment");
    sc_dis->add_option("--mapping", mapping_name, "linear | nonlinear");
    sc_dis->add_option("--rc-sh-max", rc_sh_max, "Residual current span, mA")->required();
    sc_dis->add_option("--out", out, "Output directory")->required();

    // maptable
    auto* sc_map = app.add_subcommand("maptable", "Plot-ready mapping curves");
    sc_map->add_option("--rc-sh-max", rc_sh_max, "Residual current span, mA")->required();
    sc_map->add_option("--out", out, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sc_char->parsed()) return cmd_characterize(radii, reps, out, seed);
        if (sc_fit->parsed()) return cmd_fit(data_path, holdout_frac, out, seed);
        if (sc_psy->parsed()) {
            if (sc_run->parsed())
                return cmd_psycho_run(channel, direction, subjects, pse, jnd, between_sd,
                                      out, seed);
            if (sc_pfit->parsed()) return cmd_psycho_fit(data_path, model, out, seed);
            if (sc_boot->parsed())
                return cmd_psycho_bootstrap(data_path, B, fitter_name, out, seed);
            if (sc_cmp->parsed()) return cmd_psycho_compare(path_a, path_b, B, out, seed);
        }
        if (sc_tel->parsed())
            return cmd_teleop(mapping_name, object_spec, mode_name, duration, rc_sh_max,
                              corruption, out, seed);
        if (sc_dis->parsed()) return cmd_discriminate(mapping_name, rc_sh_max, out, seed);
        if (sc_map->parsed()) return cmd_maptable(rc_sh_max, out, seed);
    } catch (const ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const LinkTimeout& e) {
        std::cerr << "link error: " << e.what() << "\n";
        return 3;
    } catch (const FitError& e) {
        std::cerr << "fit error: " << e.what() << "\n";
        return 3;
    } catch (const ProcedureError& e) {
        std::cerr << "procedure error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
