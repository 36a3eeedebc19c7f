#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "illusion/arrange/arrangements.hpp"
#include "illusion/guidance/backend.hpp"
#include "illusion/loss/losses.hpp"
#include "illusion/parametric/parametric_image.hpp"
#include "illusion/targets/targets.hpp"

namespace illusion::opt {

enum class OptimizerKind { sgd, adam };

OptimizerKind optimizer_from_string(const std::string& s);
std::string to_string(OptimizerKind k);

struct ScheduleConfig {
    int phase1_steps = 500;
    std::vector<double> phase2_strengths = default_strengths();
    int steps_per_target = 1000;
    double learning_rate = 1e-3;
    OptimizerKind optimizer = OptimizerKind::adam;
    loss::SdWeighting sd_weighting = loss::SdWeighting::constant;
    int img2img_steps = 50;
    uint64_t seed = 0;

    // 0.90, 0.89, ..., 0.01
    static std::vector<double> default_strengths();
    std::vector<std::string> check() const;
    void validate() const;
};

struct LossRecord {
    int64_t step = 0;
    std::string phase;  // "SD" or "DT"
    std::vector<double> per_derived;
    double total = 0.0;
};

// {"step":N,"phase":"SD","per_derived":[...],"total":X}
std::string loss_record_json(const LossRecord& r);

// First-moment / second-moment optimizer state over the concatenated prime
// parameters.
struct OptimizerState {
    OptimizerKind kind = OptimizerKind::adam;
    double lr = 1e-3;
    int64_t t = 0;
    std::vector<double> m, v;

    void init(OptimizerKind kind, double lr, size_t nparams);
    void apply(std::span<double> params, std::span<const double> grad);
};

// Two-phase optimization over the prime images. Phase 1 takes score
// distillation (or similarity for image targets) steps; phase 2 walks the
// strength schedule, refreshing dream targets once per segment and
// regressing the derived images onto them. Only prime parameters are
// updated; the backend and spec stay untouched.
class Runner {
public:
    Runner(arrange::IllusionSpec spec, std::vector<std::unique_ptr<parametric::ParametricImage>> primes,
           const guidance::GuidanceBackend& backend, ScheduleConfig schedule);

    using StepCallback = std::function<void(const LossRecord&)>;
    void set_step_callback(StepCallback cb) { callback_ = std::move(cb); }
    void set_diagnostic_checkpoint_path(std::string path) { diag_path_ = std::move(path); }

    // One optimizer update (running any pending target refresh first).
    // Returns false once the full schedule is exhausted.
    bool advance_one();
    void run_phase1();
    void run_phase2();  // skips any remaining phase-1 steps
    void run_all();
    // Up to `n` optimizer updates; used to interrupt and resume runs.
    int run_steps(int n);
    bool finished() const;

    const arrange::IllusionSpec& spec() const { return spec_; }
    const ScheduleConfig& schedule() const { return schedule_; }
    int64_t step_count() const { return global_step_; }
    const std::vector<LossRecord>& loss_history() const { return history_; }
    const std::vector<double>& last_gradient() const { return last_grad_; }
    const targets::DreamTargetState& dream_targets() const { return dream_; }

    size_t prime_count() const { return primes_.size(); }
    const parametric::ParametricImage& prime(size_t i) const { return *primes_[i]; }
    std::vector<Image> render_primes() const;
    std::vector<Image> derived() const;

    void save_checkpoint(const std::string& path) const;
    static Runner resume_checkpoint(const std::string& path, const guidance::GuidanceBackend& backend);

private:
    void phase1_step();
    void phase2_step();
    void apply_gradient(const std::vector<Image>& prime_pixel_grads, LossRecord record);
    size_t total_param_count() const;

    arrange::IllusionSpec spec_;
    std::vector<std::unique_ptr<parametric::ParametricImage>> primes_;
    const guidance::GuidanceBackend* backend_;
    ScheduleConfig schedule_;

    OptimizerState opt_;
    RngStream rng_sd_, rng_img2img_;
    targets::DreamTargetState dream_;

    int64_t global_step_ = 0;
    int p1_done_ = 0;
    size_t segment_ = 0;
    int segment_step_ = 0;
    bool segment_refreshed_ = false;

    std::vector<LossRecord> history_;
    std::vector<double> last_grad_;
    StepCallback callback_;
    std::string diag_path_;
};

}  // namespace illusion::opt
