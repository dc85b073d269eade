#pragma once

#include "cuff/errors.hpp"
#include "cuff/mapping.hpp"
#include "cuff/rng.hpp"
#include "cuff/softhand.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace cuff::psycho {

enum class Channel { TangentialMm, ForceN };

struct StimulusSpec {
    Channel channel = Channel::TangentialMm;
    double reference = 17.91;
    std::vector<double> comparisons = {5.97, 11.94, 17.91, 23.88, 29.85};
    int trials_per_session = 100;
    double inter_stimulus_interval_s = 2.0;
    double stimulus_duration_s = 1.0;

    void validate() const;

    static StimulusSpec tangential() { return {}; }
    static StimulusSpec force() {
        StimulusSpec s;
        s.channel = Channel::ForceN;
        s.reference = 9.0;
        s.comparisons = {3.0, 6.0, 9.0, 12.0, 15.0};
        return s;
    }
};

enum class Order { RefFirst, RefSecond };

struct TrialRecord {
    int subject_id = 0;
    std::string block;  // rightward / leftward / force
    double comparison = 0.0;
    Order order = Order::RefFirst;
    int response = -1;  // 1 = comparison judged larger; -1 = not yet collected
};

/// Ground truth of a synthetic observer on one channel.
struct ObserverTruth {
    double pse = 17.42;
    double jnd = 2.91;

    double slope() const;      // beta1 = Phi^-1(0.75)/jnd
    double intercept() const;  // beta0 = -pse * beta1
};

/// Balanced comparisons x orders design, shuffled by seed; responses left empty.
std::vector<TrialRecord> build_session(const StimulusSpec& spec, uint64_t seed);

/// Response probability Phi(beta1 * comparison + beta0).
double observer_probability(double comparison, const ObserverTruth& truth);

/// One Bernoulli draw from the observer.
int synthetic_observer(double comparison, const ObserverTruth& truth, Rng& rng);

/// Fill a session's responses with a given observer.
void run_session(std::vector<TrialRecord>& session, const ObserverTruth& truth, Rng& rng);

/// Simulate a population: each subject's PSE is shifted by N(0, between_subject_sd)
/// and responses are drawn per block of trials.
std::vector<std::vector<TrialRecord>> generate_population(const StimulusSpec& spec,
                                                          const ObserverTruth& truth,
                                                          int n_subjects,
                                                          double between_subject_sd,
                                                          const std::string& block,
                                                          uint64_t seed);

enum class ModelKind { PerSubjectGlm, Glmm };

struct PsychometricFit {
    double beta0 = 0.0;
    double beta1 = 0.0;
    double pse = 0.0;
    double jnd = 0.0;
    ModelKind model = ModelKind::PerSubjectGlm;
    double random_effect_sd = 0.0;        // glmm only (intercept)
    double random_slope_sd = 0.0;         // glmm with random slope
    double log_likelihood = 0.0;
    std::optional<std::array<double, 2>> ci95_pse;
    std::optional<std::array<double, 2>> ci95_jnd;
};

/// Probit GLM by iteratively reweighted least squares.
PsychometricFit fit_probit_glm(const std::vector<TrialRecord>& trials);

struct GlmmOptions {
    int quadrature_nodes = 15;  // adaptive Gauss-Hermite
    bool random_slope = false;
    int max_outer_evaluations = 4000;
};

/// Probit mixed model with subject-level random intercept (optionally slope);
/// marginal likelihood by adaptive Gauss-Hermite quadrature, simplex outer loop.
PsychometricFit fit_glmm(const std::vector<std::vector<TrialRecord>>& subjects,
                         const GlmmOptions& opt = {});

enum class Fitter { PooledGlm, Glmm };

struct BootstrapResult {
    std::array<double, 2> ci95_pse{};
    std::array<double, 2> ci95_jnd{};
    std::vector<double> pse_samples;
    std::vector<double> jnd_samples;
    int failed_refits = 0;
};

/// Cluster (subject-level) bootstrap: resample subjects with replacement, refit,
/// take the 2.5/97.5 percentiles.
BootstrapResult bootstrap_ci(const std::vector<std::vector<TrialRecord>>& subjects,
                             Fitter fitter, int B, uint64_t seed,
                             const GlmmOptions& glmm_opt = {});

struct ConditionComparison {
    double pse_difference = 0.0;
    double jnd_difference = 0.0;
    std::array<double, 2> ci95_pse_difference{};
    std::array<double, 2> ci95_jnd_difference{};
    bool pse_ci_includes_zero = false;
    bool jnd_ci_includes_zero = false;
};

/// Bootstrap distribution of (a - b) for PSE and JND; both datasets must share a channel.
ConditionComparison compare_conditions(const std::vector<std::vector<TrialRecord>>& a,
                                       const std::vector<std::vector<TrialRecord>>& b,
                                       Channel channel_a, Channel channel_b, Fitter fitter,
                                       int B, uint64_t seed);

// --- discrimination task harness -------------------------------------------

enum class Modality { Proprioception, Force, Combined };

/// Observer for the three-way (smaller / equal / bigger) judgement, acting on the
/// commanded CUFF quantity in ticks.
struct DiscriminationObserver {
    double jnd_slide_ticks = 379.0;    // 2.91 mm on the default roller
    double jnd_squeeze_ticks = 51.0;   // 2.21 N through the force curve slope at 9 N
    double equality_window_factor = 0.5;
};

struct SuccessMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> success;  // [first][second], aggregated over orders

    double mean_success() const;
    double mean_offdiagonal_success() const;
};

struct DiscriminationConfig {
    softhand::SofthandConfig hand;
    double closure_cmd = 18000.0;
    double grasp_duration_s = 3.0;
    int repetitions_per_pair = 200;
    uint64_t seed = 1;
};

/// Drives grasp playback -> mapping for every ordered object pair and scores the
/// observer's three-way judgement. Matched noise draws across mapping families
/// (paired seeds) for family comparisons.
SuccessMatrix run_discrimination(const mapping::MappingConfig& mcfg, mapping::Family family,
                                 const std::vector<softhand::GraspObject>& objects,
                                 const DiscriminationObserver& observer, Modality modality,
                                 const DiscriminationConfig& cfg);

}  // namespace cuff::psycho
