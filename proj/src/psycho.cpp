#include "cuff/psycho.hpp"

#include "cuff/math_util.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cuff::psycho {

using num::kProbit75;
using num::log_norm_cdf;
using num::mills_ratio;
using num::norm_cdf;
using num::norm_pdf;

void StimulusSpec::validate() const {
    if (comparisons.empty()) throw ValidationError("stimulus spec: no comparison values");
    if (trials_per_session < 1) throw ValidationError("stimulus spec: no trials");
}

double ObserverTruth::slope() const {
    if (!(jnd > 0.0)) throw ValidationError("observer truth: jnd must be > 0");
    return kProbit75 / jnd;
}

double ObserverTruth::intercept() const { return -pse * slope(); }

std::vector<TrialRecord> build_session(const StimulusSpec& spec, uint64_t seed) {
    spec.validate();
    const size_t cells = spec.comparisons.size() * 2;
    if (spec.trials_per_session % cells != 0)
        throw ValidationError("build_session: " + std::to_string(spec.trials_per_session) +
                              " trials not divisible by " + std::to_string(cells) +
                              " design cells");
    const size_t per_cell = spec.trials_per_session / cells;
    std::vector<TrialRecord> session;
    session.reserve(spec.trials_per_session);
    for (double c : spec.comparisons)
        for (Order o : {Order::RefFirst, Order::RefSecond})
            for (size_t k = 0; k < per_cell; ++k) {
                TrialRecord t;
                t.comparison = c;
                t.order = o;
                session.push_back(t);
            }
    Rng rng = make_rng(seed, "psycho/session");
    std::shuffle(session.begin(), session.end(), rng);
    return session;
}

double observer_probability(double comparison, const ObserverTruth& truth) {
    return norm_cdf(truth.slope() * comparison + truth.intercept());
}

int synthetic_observer(double comparison, const ObserverTruth& truth, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return u(rng) < observer_probability(comparison, truth) ? 1 : 0;
}

void run_session(std::vector<TrialRecord>& session, const ObserverTruth& truth, Rng& rng) {
    for (auto& t : session) t.response = synthetic_observer(t.comparison, truth, rng);
}

std::vector<std::vector<TrialRecord>> generate_population(const StimulusSpec& spec,
                                                          const ObserverTruth& truth,
                                                          int n_subjects,
                                                          double between_subject_sd,
                                                          const std::string& block,
                                                          uint64_t seed) {
    std::vector<std::vector<TrialRecord>> subjects;
    Rng shift_rng = make_rng(seed, "psycho/population-shifts");
    std::normal_distribution<double> shift(0.0, between_subject_sd);
    for (int s = 0; s < n_subjects; ++s) {
        ObserverTruth t = truth;
        if (between_subject_sd > 0.0) t.pse += shift(shift_rng);
        auto session = build_session(spec, substream_seed(seed, "subject-" + std::to_string(s)));
        Rng rng = make_rng(seed, "psycho/responses-" + std::to_string(s));
        run_session(session, t, rng);
        for (auto& trial : session) {
            trial.subject_id = s;
            trial.block = block;
        }
        subjects.push_back(std::move(session));
    }
    return subjects;
}

PsychometricFit fit_probit_glm(const std::vector<TrialRecord>& trials) {
    size_t ones = 0;
    for (const auto& t : trials) {
        if (t.response != 0 && t.response != 1)
            throw ValidationError("fit_probit_glm: trial without a response");
        ones += size_t(t.response);
    }
    if (trials.size() < 2 || ones == 0 || ones == trials.size())
        throw FitError("fit_probit_glm: both response classes must be present");

    const auto n = static_cast<Eigen::Index>(trials.size());
    Eigen::VectorXd x(n), y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x(i) = trials[i].comparison;
        y(i) = trials[i].response;
    }

    Eigen::Vector2d beta(0.0, 0.0);
    for (int iter = 0; iter < 100; ++iter) {
        Eigen::Matrix2d xtwx = Eigen::Matrix2d::Zero();
        Eigen::Vector2d xtwz = Eigen::Vector2d::Zero();
        for (Eigen::Index i = 0; i < n; ++i) {
            double eta = beta(0) + beta(1) * x(i);
            if (std::abs(eta) > 30.0)
                throw FitError("fit_probit_glm: complete separation (diverging linear predictor)");
            double mu = norm_cdf(eta);
            double phi = norm_pdf(eta);
            mu = std::clamp(mu, 1e-12, 1.0 - 1e-12);
            double w = phi * phi / (mu * (1.0 - mu));
            double z = eta + (y(i) - mu) / phi;
            Eigen::Vector2d xi(1.0, x(i));
            xtwx += w * xi * xi.transpose();
            xtwz += w * xi * z;
        }
        if (std::abs(xtwx.determinant()) < 1e-12)
            throw FitError("fit_probit_glm: singular information matrix (degenerate design)");
        Eigen::Vector2d next = xtwx.ldlt().solve(xtwz);
        double delta = (next - beta).norm();
        beta = next;
        if (delta < 1e-8) break;
        if (iter == 99)
            throw FitError("fit_probit_glm: IRLS did not converge in 100 iterations");
    }
    if (!(beta(1) > 0.0))
        throw FitError("fit_probit_glm: non-positive slope; psychometric fit invalid");

    PsychometricFit fit;
    fit.beta0 = beta(0);
    fit.beta1 = beta(1);
    fit.pse = -beta(0) / beta(1);
    fit.jnd = kProbit75 / beta(1);
    fit.model = ModelKind::PerSubjectGlm;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double eta = beta(0) + beta(1) * x(i);
        ll += (y(i) > 0.5) ? log_norm_cdf(eta) : log_norm_cdf(-eta);
    }
    fit.log_likelihood = ll;
    return fit;
}

namespace {

struct SubjectData {
    std::vector<double> x;
    std::vector<double> sign;  // +1 for response 1, -1 for response 0
};

/// log integrand and derivatives for one subject at random effect u
/// (random intercept model): g(u) = sum log Phi(s*(eta + u)) - u^2/(2 sd^2).
struct Integrand1D {
    const SubjectData& subj;
    double b0, b1, sd;

    double value(double u) const {
        double g = -0.5 * u * u / (sd * sd);
        for (size_t j = 0; j < subj.x.size(); ++j)
            g += log_norm_cdf(subj.sign[j] * (b0 + b1 * subj.x[j] + u));
        return g;
    }
    void derivatives(double u, double& g1, double& g2) const {
        g1 = -u / (sd * sd);
        g2 = -1.0 / (sd * sd);
        for (size_t j = 0; j < subj.x.size(); ++j) {
            double s = subj.sign[j];
            double z = s * (b0 + b1 * subj.x[j] + u);
            double lam = mills_ratio(z);
            g1 += s * lam;
            g2 -= lam * (z + lam);
        }
    }
};

double subject_log_marginal_1d(const SubjectData& subj, double b0, double b1, double sd,
                               const num::HermiteRule& rule) {
    Integrand1D g{subj, b0, b1, sd};
    // Mode by Newton; g is strictly concave.
    double u = 0.0;
    for (int it = 0; it < 50; ++it) {
        double g1, g2;
        g.derivatives(u, g1, g2);
        double step = g1 / g2;
        u -= step;
        if (std::abs(step) < 1e-11) break;
    }
    double g1, g2;
    g.derivatives(u, g1, g2);
    double tau = 1.0 / std::sqrt(-g2);
    std::vector<double> terms;
    terms.reserve(rule.nodes.size());
    for (size_t k = 0; k < rule.nodes.size(); ++k) {
        double t = rule.nodes[k];
        terms.push_back(std::log(rule.weights[k]) + t * t + g.value(u + std::sqrt(2.0) * tau * t));
    }
    // integral of exp(g) du, then normalize by the random-effect density constant
    return std::log(std::sqrt(2.0) * tau) + num::logsumexp(terms) -
           0.5 * std::log(2.0 * M_PI) - std::log(sd);
}

/// Random intercept + slope with a diagonal covariance; tensor-product AGHQ.
double subject_log_marginal_2d(const SubjectData& subj, double b0, double b1, double sd0,
                               double sd1, const num::HermiteRule& rule) {
    auto value = [&](double u0, double u1) {
        double g = -0.5 * u0 * u0 / (sd0 * sd0) - 0.5 * u1 * u1 / (sd1 * sd1);
        for (size_t j = 0; j < subj.x.size(); ++j)
            g += log_norm_cdf(subj.sign[j] * (b0 + u0 + (b1 + u1) * subj.x[j]));
        return g;
    };
    auto grad_hess = [&](double u0, double u1, Eigen::Vector2d& g1, Eigen::Matrix2d& H) {
        g1 << -u0 / (sd0 * sd0), -u1 / (sd1 * sd1);
        H.setZero();
        H(0, 0) = -1.0 / (sd0 * sd0);
        H(1, 1) = -1.0 / (sd1 * sd1);
        for (size_t j = 0; j < subj.x.size(); ++j) {
            double s = subj.sign[j];
            double xj = subj.x[j];
            double z = s * (b0 + u0 + (b1 + u1) * xj);
            double lam = mills_ratio(z);
            double w = lam * (z + lam);
            g1(0) += s * lam;
            g1(1) += s * lam * xj;
            H(0, 0) -= w;
            H(0, 1) -= w * xj;
            H(1, 1) -= w * xj * xj;
        }
        H(1, 0) = H(0, 1);
    };
    Eigen::Vector2d u(0.0, 0.0);
    for (int it = 0; it < 60; ++it) {
        Eigen::Vector2d g1;
        Eigen::Matrix2d H;
        grad_hess(u(0), u(1), g1, H);
        Eigen::Vector2d step = H.ldlt().solve(g1);
        u -= step;
        if (step.norm() < 1e-11) break;
    }
    Eigen::Vector2d g1;
    Eigen::Matrix2d H;
    grad_hess(u(0), u(1), g1, H);
    Eigen::LLT<Eigen::Matrix2d> llt(-H);
    Eigen::Matrix2d L = llt.matrixL();
    Eigen::Matrix2d Linv = L.inverse();
    double log_det_scale = -std::log(L(0, 0)) - std::log(L(1, 1));

    std::vector<double> terms;
    terms.reserve(rule.nodes.size() * rule.nodes.size());
    for (size_t a = 0; a < rule.nodes.size(); ++a)
        for (size_t b = 0; b < rule.nodes.size(); ++b) {
            Eigen::Vector2d t(rule.nodes[a], rule.nodes[b]);
            Eigen::Vector2d uu = u + std::sqrt(2.0) * (Linv.transpose() * t);
            terms.push_back(std::log(rule.weights[a]) + std::log(rule.weights[b]) +
                            t.squaredNorm() + value(uu(0), uu(1)));
        }
    return std::log(2.0) + log_det_scale + num::logsumexp(terms) - std::log(2.0 * M_PI) -
           std::log(sd0) - std::log(sd1);
}

}  // namespace

PsychometricFit fit_glmm(const std::vector<std::vector<TrialRecord>>& subjects,
                         const GlmmOptions& opt) {
    if (subjects.size() < 2) throw FitError("fit_glmm: need at least 2 subjects");
    if (opt.quadrature_nodes < 1) throw ValidationError("fit_glmm: quadrature_nodes < 1");

    std::vector<SubjectData> data;
    std::vector<TrialRecord> pooled;
    for (const auto& s : subjects) {
        SubjectData sd;
        for (const auto& t : s) {
            if (t.response != 0 && t.response != 1)
                throw ValidationError("fit_glmm: trial without a response");
            sd.x.push_back(t.comparison);
            sd.sign.push_back(t.response == 1 ? 1.0 : -1.0);
            pooled.push_back(t);
        }
        if (!sd.x.empty()) data.push_back(std::move(sd));
    }

    PsychometricFit start = fit_probit_glm(pooled);
    auto rule = num::gauss_hermite(opt.quadrature_nodes);

    const double kLogSdFloor = -8.0;
    auto negll = [&](const std::vector<double>& theta) {
        double b0 = theta[0], b1 = theta[1];
        double sd0 = std::exp(std::max(theta[2], kLogSdFloor));
        double ll = 0.0;
        if (!opt.random_slope) {
            for (const auto& s : data) ll += subject_log_marginal_1d(s, b0, b1, sd0, rule);
        } else {
            double sd1 = std::exp(std::max(theta[3], kLogSdFloor));
            for (const auto& s : data) ll += subject_log_marginal_2d(s, b0, b1, sd0, sd1, rule);
        }
        return std::isfinite(ll) ? -ll : 1e100;
    };

    std::vector<double> theta0 = {start.beta0, start.beta1, std::log(0.25)};
    if (opt.random_slope) theta0.push_back(std::log(0.05));
    auto res = num::nelder_mead(negll, theta0, 0.3, 1e-11, opt.max_outer_evaluations);
    if (!res.converged)
        throw FitError("fit_glmm: outer optimization did not converge (last -loglik " +
                       std::to_string(res.fmin) + ")");

    PsychometricFit fit;
    fit.beta0 = res.x[0];
    fit.beta1 = res.x[1];
    if (!(fit.beta1 > 0.0)) throw FitError("fit_glmm: non-positive population slope");
    fit.pse = -fit.beta0 / fit.beta1;
    fit.jnd = kProbit75 / fit.beta1;
    fit.model = ModelKind::Glmm;
    fit.random_effect_sd = std::exp(std::max(res.x[2], kLogSdFloor));
    if (fit.random_effect_sd < 1.5 * std::exp(kLogSdFloor)) fit.random_effect_sd = 0.0;
    if (opt.random_slope) {
        fit.random_slope_sd = std::exp(std::max(res.x[3], kLogSdFloor));
        if (fit.random_slope_sd < 1.5 * std::exp(kLogSdFloor)) fit.random_slope_sd = 0.0;
    }
    fit.log_likelihood = -res.fmin;
    return fit;
}

namespace {

PsychometricFit refit(const std::vector<std::vector<TrialRecord>>& subjects, Fitter fitter,
                      const GlmmOptions& glmm_opt) {
    if (fitter == Fitter::Glmm) return fit_glmm(subjects, glmm_opt);
    std::vector<TrialRecord> pooled;
    for (const auto& s : subjects) pooled.insert(pooled.end(), s.begin(), s.end());
    return fit_probit_glm(pooled);
}

std::array<double, 2> percentile_ci(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    auto at = [&](double q) {
        double idx = q * (double(v.size()) - 1.0);
        size_t lo = static_cast<size_t>(idx);
        size_t hi = std::min(lo + 1, v.size() - 1);
        double w = idx - double(lo);
        return v[lo] * (1.0 - w) + v[hi] * w;
    };
    return {at(0.025), at(0.975)};
}

}  // namespace

BootstrapResult bootstrap_ci(const std::vector<std::vector<TrialRecord>>& subjects,
                             Fitter fitter, int B, uint64_t seed,
                             const GlmmOptions& glmm_opt) {
    if (B < 100) throw ValidationError("bootstrap_ci: B must be >= 100");
    if (subjects.empty()) throw ValidationError("bootstrap_ci: no subjects");

    BootstrapResult res;
    for (int b = 0; b < B; ++b) {
        Rng rng = make_rng(seed, "psycho/bootstrap-" + std::to_string(b));
        std::uniform_int_distribution<size_t> pick(0, subjects.size() - 1);
        std::vector<std::vector<TrialRecord>> resample;
        resample.reserve(subjects.size());
        for (size_t i = 0; i < subjects.size(); ++i) resample.push_back(subjects[pick(rng)]);
        try {
            PsychometricFit fit = refit(resample, fitter, glmm_opt);
            res.pse_samples.push_back(fit.pse);
            res.jnd_samples.push_back(fit.jnd);
        } catch (const FitError&) {
            ++res.failed_refits;
        }
    }
    if (res.failed_refits > B / 5)
        throw FitError("bootstrap_ci: more than 20% of refits failed (" +
                       std::to_string(res.failed_refits) + "/" + std::to_string(B) + ")");
    res.ci95_pse = percentile_ci(res.pse_samples);
    res.ci95_jnd = percentile_ci(res.jnd_samples);
    return res;
}

ConditionComparison compare_conditions(const std::vector<std::vector<TrialRecord>>& a,
                                       const std::vector<std::vector<TrialRecord>>& b,
                                       Channel channel_a, Channel channel_b, Fitter fitter,
                                       int B, uint64_t seed) {
    if (channel_a != channel_b)
        throw ValidationError("compare_conditions: datasets are from different channels");
    GlmmOptions glmm_opt;
    PsychometricFit fa = refit(a, fitter, glmm_opt);
    PsychometricFit fb = refit(b, fitter, glmm_opt);

    std::vector<double> dpse, djnd;
    int failed = 0;
    for (int k = 0; k < B; ++k) {
        Rng rng = make_rng(seed, "psycho/compare-" + std::to_string(k));
        auto resample = [&](const std::vector<std::vector<TrialRecord>>& src) {
            std::uniform_int_distribution<size_t> pick(0, src.size() - 1);
            std::vector<std::vector<TrialRecord>> out;
            out.reserve(src.size());
            for (size_t i = 0; i < src.size(); ++i) out.push_back(src[pick(rng)]);
            return out;
        };
        try {
            PsychometricFit ra = refit(resample(a), fitter, glmm_opt);
            PsychometricFit rb = refit(resample(b), fitter, glmm_opt);
            dpse.push_back(ra.pse - rb.pse);
            djnd.push_back(ra.jnd - rb.jnd);
        } catch (const FitError&) {
            ++failed;
        }
    }
    if (dpse.empty() || failed > B / 5)
        throw FitError("compare_conditions: too many failed bootstrap refits");

    ConditionComparison cmp;
    cmp.pse_difference = fa.pse - fb.pse;
    cmp.jnd_difference = fa.jnd - fb.jnd;
    cmp.ci95_pse_difference = percentile_ci(dpse);
    cmp.ci95_jnd_difference = percentile_ci(djnd);
    cmp.pse_ci_includes_zero =
        cmp.ci95_pse_difference[0] <= 0.0 && 0.0 <= cmp.ci95_pse_difference[1];
    cmp.jnd_ci_includes_zero =
        cmp.ci95_jnd_difference[0] <= 0.0 && 0.0 <= cmp.ci95_jnd_difference[1];
    return cmp;
}

double SuccessMatrix::mean_success() const {
    double s = 0.0;
    size_t n = 0;
    for (const auto& row : success)
        for (double v : row) {
            s += v;
            ++n;
        }
    return n ? s / double(n) : 0.0;
}

double SuccessMatrix::mean_offdiagonal_success() const {
    double s = 0.0;
    size_t n = 0;
    for (size_t i = 0; i < success.size(); ++i)
        for (size_t j = 0; j < success[i].size(); ++j) {
            if (i == j) continue;
            s += success[i][j];
            ++n;
        }
    return n ? s / double(n) : 0.0;
}

namespace {
std::string object_label(const softhand::GraspObject& o) {
    switch (o.kind) {
        case softhand::Kind::None: return "none";
        case softhand::Kind::Rigid: return "rigid-" + std::to_string(int(o.diameter_mm));
        default: return "soft-" + std::to_string(int(o.diameter_mm));
    }
}
}  // namespace

SuccessMatrix run_discrimination(const mapping::MappingConfig& mcfg, mapping::Family family,
                                 const std::vector<softhand::GraspObject>& objects,
                                 const DiscriminationObserver& observer, Modality modality,
                                 const DiscriminationConfig& cfg) {
    if (objects.empty()) throw ValidationError("run_discrimination: empty object set");

    // Stimulus command per object from its grasp signal's settled sample.
    std::vector<double> slide_cmd(objects.size()), squeeze_cmd(objects.size());
    for (size_t i = 0; i < objects.size(); ++i) {
        auto sig = softhand::simulate_grasp(objects[i], cfg.closure_cmd, cfg.grasp_duration_s,
                                            cfg.hand, substream_seed(cfg.seed, "grasp"));
        // Average the last 10% to suppress sensor noise, like a settled reading.
        size_t n = sig.p_sh.size();
        size_t tail = std::max<size_t>(1, n / 10);
        double p = 0.0, rc = 0.0;
        for (size_t k = n - tail; k < n; ++k) {
            p += sig.p_sh[k];
            rc += sig.rc_sh[k];
        }
        p /= double(tail);
        rc /= double(tail);
        slide_cmd[i] = mapping::position_command(p, mcfg, family);
        squeeze_cmd[i] = mapping::force_command(rc, mcfg, family);
    }

    auto judge = [&](double c1, double c2, double e1, double e2, double jnd) {
        // returns -1 / 0 / +1 for smaller / equal / bigger (second vs first)
        double sd = jnd / kProbit75;
        double delta = (c2 + e2 * sd) - (c1 + e1 * sd);
        double window = observer.equality_window_factor * jnd;
        if (delta > window) return 1;
        if (delta < -window) return -1;
        return 0;
    };
    auto truth_of = [](double c1, double c2) {
        if (c2 > c1) return 1;
        if (c2 < c1) return -1;
        return 0;
    };

    SuccessMatrix m;
    m.labels.reserve(objects.size());
    for (const auto& o : objects) m.labels.push_back(object_label(o));
    m.success.assign(objects.size(), std::vector<double>(objects.size(), 0.0));

    for (size_t i = 0; i < objects.size(); ++i)
        for (size_t j = 0; j < objects.size(); ++j) {
            // Noise draws are independent of the mapping family so that paired-seed
            // runs share them (common random numbers).
            Rng rng = make_rng(cfg.seed, "discriminate/" + std::to_string(i) + "/" +
                                             std::to_string(j));
            std::normal_distribution<double> normal(0.0, 1.0);
            int correct = 0;
            for (int rep = 0; rep < cfg.repetitions_per_pair; ++rep) {
                double e1 = normal(rng), e2 = normal(rng);
                double e3 = normal(rng), e4 = normal(rng);
                bool ok = true;
                if (modality == Modality::Proprioception || modality == Modality::Combined) {
                    ok = ok && judge(slide_cmd[i], slide_cmd[j], e1, e2,
                                     observer.jnd_slide_ticks) ==
                                   truth_of(slide_cmd[i], slide_cmd[j]);
                }
                if (modality == Modality::Force || modality == Modality::Combined) {
                    ok = ok && judge(squeeze_cmd[i], squeeze_cmd[j], e3, e4,
                                     observer.jnd_squeeze_ticks) ==
                                   truth_of(squeeze_cmd[i], squeeze_cmd[j]);
                }
                if (ok) ++correct;
            }
            m.success[i][j] = double(correct) / double(cfg.repetitions_per_pair);
        }
    return m;
}

}  // namespace cuff::psycho
