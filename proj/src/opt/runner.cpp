#include "illusion/opt/runner.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "illusion/core/errors.hpp"
#include "illusion/core/parallel.hpp"

namespace illusion::opt {

OptimizerKind optimizer_from_string(const std::string& s) {
    if (s == "sgd") return OptimizerKind::sgd;
    if (s == "adam") return OptimizerKind::adam;
    throw ConfigError("unknown optimizer: " + s + " (expected sgd|adam)");
}

std::string to_string(OptimizerKind k) { return k == OptimizerKind::sgd ? "sgd" : "adam"; }

std::vector<double> ScheduleConfig::default_strengths() {
    std::vector<double> s;
    for (int i = 90; i >= 1; --i) s.push_back(i / 100.0);
    return s;
}

std::vector<std::string> ScheduleConfig::check() const {
    std::vector<std::string> errs;
    if (phase1_steps < 0) errs.push_back("phase1_steps must be >= 0");
    if (steps_per_target < 0) errs.push_back("steps_per_target must be >= 0");
    if (!(learning_rate > 0)) errs.push_back("learning_rate must be > 0");
    if (img2img_steps < 1) errs.push_back("img2img_steps must be >= 1");
    for (size_t i = 0; i < phase2_strengths.size(); ++i) {
        double s = phase2_strengths[i];
        if (!(s > 0.0 && s < 1.0)) {
            errs.push_back("phase2_strengths[" + std::to_string(i) + "] must lie in (0,1)");
        }
        if (i > 0 && !(s < phase2_strengths[i - 1])) {
            errs.push_back("phase2_strengths must be strictly decreasing");
            break;
        }
    }
    return errs;
}

void ScheduleConfig::validate() const {
    auto errs = check();
    if (errs.empty()) return;
    std::ostringstream os;
    os << "invalid schedule:";
    for (const auto& e : errs) os << "\n  - " << e;
    throw ConfigError(os.str());
}

std::string loss_record_json(const LossRecord& r) {
    std::ostringstream os;
    char buf[64];
    os << "{\"step\":" << r.step << ",\"phase\":\"" << r.phase << "\",\"per_derived\":[";
    for (size_t i = 0; i < r.per_derived.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", r.per_derived[i]);
        os << (i ? "," : "") << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", r.total);
    os << "],\"total\":" << buf << "}";
    return os.str();
}

void OptimizerState::init(OptimizerKind k, double rate, size_t nparams) {
    kind = k;
    lr = rate;
    t = 0;
    if (kind == OptimizerKind::adam) {
        m.assign(nparams, 0.0);
        v.assign(nparams, 0.0);
    } else {
        m.clear();
        v.clear();
    }
}

void OptimizerState::apply(std::span<double> params, std::span<const double> grad) {
    if (params.size() != grad.size()) throw ConfigError("optimizer: param/grad size mismatch");
    t += 1;
    if (kind == OptimizerKind::sgd) {
        double* p = params.data();
        const double* g = grad.data();
        const double rate = lr;
        par::for_n(static_cast<int64_t>(params.size()), [&](int64_t i) { p[i] -= rate * g[i]; });
        return;
    }
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    if (m.size() != params.size()) throw ConfigError("optimizer: state size mismatch");
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    double* p = params.data();
    const double* g = grad.data();
    double* md = m.data();
    double* vd = v.data();
    const double rate = lr;
    par::for_n(static_cast<int64_t>(params.size()), [&](int64_t i) {
        md[i] = beta1 * md[i] + (1.0 - beta1) * g[i];
        vd[i] = beta2 * vd[i] + (1.0 - beta2) * g[i] * g[i];
        double mhat = md[i] / bc1;
        double vhat = vd[i] / bc2;
        p[i] -= rate * mhat / (std::sqrt(vhat) + eps);
    });
}

Runner::Runner(arrange::IllusionSpec spec, std::vector<std::unique_ptr<parametric::ParametricImage>> primes,
               const guidance::GuidanceBackend& backend, ScheduleConfig schedule)
    : spec_(std::move(spec)),
      primes_(std::move(primes)),
      backend_(&backend),
      schedule_(std::move(schedule)),
      rng_sd_(RngStream::derive_seed(schedule_.seed, "score-distillation")),
      rng_img2img_(RngStream::derive_seed(schedule_.seed, "img2img-refresh")) {
    spec_.validate();
    schedule_.validate();
    if (static_cast<int>(primes_.size()) != spec_.n) {
        throw ConfigError("runner: expected " + std::to_string(spec_.n) + " prime images");
    }
    if (spec_.kind == arrange::IllusionKind::custom) arrange::validate_custom(spec_, schedule_.seed);
    opt_.init(schedule_.optimizer, schedule_.learning_rate, total_param_count());
}

size_t Runner::total_param_count() const {
    size_t n = 0;
    for (const auto& p : primes_) n += p->parameter_count();
    return n;
}

std::vector<Image> Runner::render_primes() const {
    std::vector<Image> renders;
    renders.reserve(primes_.size());
    for (const auto& p : primes_) renders.push_back(p->render());
    return renders;
}

std::vector<Image> Runner::derived() const {
    auto renders = render_primes();
    return arrange::derive_all(spec_, renders);
}

bool Runner::finished() const {
    return p1_done_ >= schedule_.phase1_steps && segment_ >= schedule_.phase2_strengths.size();
}

bool Runner::advance_one() {
    if (p1_done_ < schedule_.phase1_steps) {
        phase1_step();
        ++p1_done_;
        return true;
    }
    while (segment_ < schedule_.phase2_strengths.size()) {
        if (!segment_refreshed_) {
            auto renders = render_primes();
            auto ds = arrange::derive_all(spec_, renders);
            dream_ = targets::refresh_targets(std::move(dream_), *backend_, spec_, ds,
                                              schedule_.phase2_strengths[segment_], rng_img2img_,
                                              schedule_.img2img_steps);
            segment_refreshed_ = true;
        }
        if (segment_step_ < schedule_.steps_per_target) {
            phase2_step();
            ++segment_step_;
            return true;
        }
        ++segment_;
        segment_step_ = 0;
        segment_refreshed_ = false;
    }
    return false;
}

void Runner::run_phase1() {
    while (p1_done_ < schedule_.phase1_steps) advance_one();
}

void Runner::run_phase2() {
    p1_done_ = schedule_.phase1_steps;  // phase 2 only; fresh primes carry the documented caveat
    while (advance_one()) {
    }
}

void Runner::run_all() {
    while (advance_one()) {
    }
}

int Runner::run_steps(int n) {
    int taken = 0;
    while (taken < n && advance_one()) ++taken;
    return taken;
}

void Runner::phase1_step() {
    auto renders = render_primes();
    std::vector<Image> pixel_grads;
    for (const auto& r : renders) pixel_grads.emplace_back(r.height(), r.width());

    LossRecord record;
    record.step = global_step_ + 1;
    record.phase = "SD";
    record.per_derived.resize(spec_.m);

    for (int j = 1; j <= spec_.m; ++j) {
        Image d = arrange::derive(spec_, renders, j);
        const auto& target = spec_.targets[j - 1];
        const double wj = spec_.weights[j - 1];
        Image out_grad(d.height(), d.width());
        if (target.kind == arrange::TargetSpec::Kind::text) {
            auto sd = loss::score_distillation_grad(*backend_, target.prompt, d, rng_sd_,
                                                    schedule_.sd_weighting);
            record.per_derived[j - 1] = sd.loss;
            double* og = out_grad.data();
            const double* sg = sd.grad.data();
            par::for_n(static_cast<int64_t>(out_grad.sample_count()),
                       [&](int64_t i) { og[i] = wj * sg[i]; });
        } else {
            // loss -= w * image_similarity(d, t): same gradient as the dream
            // target loss since similarity = 1 - dream_target_loss
            record.per_derived[j - 1] = -loss::image_similarity(d, target.image);
            loss::dream_target_loss_backward(target.image, d, wj, out_grad);
        }
        arrange::derive_backward(spec_, renders, j, out_grad, pixel_grads);
    }
    record.total = loss::total_weighted_loss(record.per_derived, spec_.weights);
    apply_gradient(pixel_grads, std::move(record));
}

void Runner::phase2_step() {
    auto renders = render_primes();
    std::vector<Image> pixel_grads;
    for (const auto& r : renders) pixel_grads.emplace_back(r.height(), r.width());

    LossRecord record;
    record.step = global_step_ + 1;
    record.phase = "DT";
    record.per_derived.resize(spec_.m);

    for (int j = 1; j <= spec_.m; ++j) {
        Image d = arrange::derive(spec_, renders, j);
        const Image& z = dream_.current[j - 1];
        const double wj = spec_.weights[j - 1];
        record.per_derived[j - 1] = loss::dream_target_loss(z, d);
        Image out_grad(d.height(), d.width());
        loss::dream_target_loss_backward(z, d, wj, out_grad);
        arrange::derive_backward(spec_, renders, j, out_grad, pixel_grads);
    }
    record.total = loss::total_weighted_loss(record.per_derived, spec_.weights);
    apply_gradient(pixel_grads, std::move(record));
}

void Runner::apply_gradient(const std::vector<Image>& prime_pixel_grads, LossRecord record) {
    const size_t nparams = total_param_count();
    last_grad_.assign(nparams, 0.0);
    size_t off = 0;
    for (size_t i = 0; i < primes_.size(); ++i) {
        size_t cnt = primes_[i]->parameter_count();
        primes_[i]->accumulate_param_grad(prime_pixel_grads[i],
                                          std::span<double>(last_grad_.data() + off, cnt));
        off += cnt;
    }

    bool bad = !std::isfinite(record.total);
    for (double v : record.per_derived) bad = bad || !std::isfinite(v);
    if (!bad) {
        for (double v : last_grad_) {
            if (!std::isfinite(v)) {
                bad = true;
                break;
            }
        }
    }
    if (bad) {
        std::string where = "step " + std::to_string(record.step);
        if (!diag_path_.empty()) {
            save_checkpoint(diag_path_);
            where += " (diagnostic checkpoint: " + diag_path_ + ")";
        }
        throw NumericError("non-finite loss or gradient at " + where);
    }

    std::vector<double> params(nparams);
    off = 0;
    for (const auto& p : primes_) {
        p->get_parameters(std::span<double>(params.data() + off, p->parameter_count()));
        off += p->parameter_count();
    }
    opt_.apply(params, last_grad_);
    off = 0;
    for (auto& p : primes_) {
        p->set_parameters(std::span<const double>(params.data() + off, p->parameter_count()));
        off += p->parameter_count();
    }

    ++global_step_;
    history_.push_back(record);
    if (callback_) callback_(history_.back());
}

namespace {

void save_spec(BinaryWriter& w, const arrange::IllusionSpec& spec) {
    w.begin_section("spec");
    w.put_string(arrange::to_string(spec.kind));
    w.put_u32(static_cast<uint32_t>(spec.n));
    w.put_u32(static_cast<uint32_t>(spec.m));
    w.put_f64(spec.brightness_k);
    w.put_u32(spec.tanh_normalize ? 1 : 0);
    w.put_f64_array(spec.weights);
    for (const auto& t : spec.targets) {
        w.put_u32(t.kind == arrange::TargetSpec::Kind::text ? 0 : 1);
        w.put_string(t.prompt);
        w.put_string(t.image_path);
        w.put_u32(static_cast<uint32_t>(t.resample));
        w.put_u32(static_cast<uint32_t>(t.image.height()));
        w.put_u32(static_cast<uint32_t>(t.image.width()));
        w.put_f64_array(t.image.samples());
    }
    w.put_u32(static_cast<uint32_t>(spec.custom_ops.size()));
    for (const auto& op : spec.custom_ops) {
        w.put_u32(static_cast<uint32_t>(op.factors.size()));
        for (const auto& f : op.factors) {
            w.put_u32(static_cast<uint32_t>(f.prime));
            w.put_u32(static_cast<uint32_t>(f.quarter_turns));
        }
        w.put_f64(op.scale);
        w.put_u32(op.squash_tanh ? 1 : 0);
    }
}

arrange::IllusionSpec load_spec(BinaryReader& r) {
    r.open_section("spec");
    arrange::IllusionSpec spec;
    spec.kind = arrange::kind_from_string(r.get_string());
    spec.n = static_cast<int>(r.get_u32());
    spec.m = static_cast<int>(r.get_u32());
    spec.brightness_k = r.get_f64();
    spec.tanh_normalize = r.get_u32() != 0;
    spec.weights = r.get_f64_array();
    spec.targets.resize(spec.m);
    for (auto& t : spec.targets) {
        t.kind = r.get_u32() == 0 ? arrange::TargetSpec::Kind::text : arrange::TargetSpec::Kind::image;
        t.prompt = r.get_string();
        t.image_path = r.get_string();
        t.resample = static_cast<arrange::TargetSpec::Resample>(r.get_u32());
        int h = static_cast<int>(r.get_u32());
        int w = static_cast<int>(r.get_u32());
        auto vals = r.get_f64_array();
        if (h > 0 && w > 0) {
            Image img(h, w);
            if (vals.size() != img.sample_count()) throw IoError("corrupt target image in checkpoint");
            std::copy(vals.begin(), vals.end(), img.samples().begin());
            t.image = std::move(img);
        }
    }
    uint32_t nops = r.get_u32();
    spec.custom_ops.resize(nops);
    for (auto& op : spec.custom_ops) {
        uint32_t nf = r.get_u32();
        op.factors.resize(nf);
        for (auto& f : op.factors) {
            f.prime = static_cast<int>(r.get_u32());
            f.quarter_turns = static_cast<int>(r.get_u32());
        }
        op.scale = r.get_f64();
        op.squash_tanh = r.get_u32() != 0;
    }
    return spec;
}

void save_schedule(BinaryWriter& w, const ScheduleConfig& s) {
    w.begin_section("schedule");
    w.put_u32(static_cast<uint32_t>(s.phase1_steps));
    w.put_f64_array(s.phase2_strengths);
    w.put_u32(static_cast<uint32_t>(s.steps_per_target));
    w.put_f64(s.learning_rate);
    w.put_string(to_string(s.optimizer));
    w.put_string(loss::to_string(s.sd_weighting));
    w.put_u32(static_cast<uint32_t>(s.img2img_steps));
    w.put_u64(s.seed);
}

ScheduleConfig load_schedule(BinaryReader& r) {
    r.open_section("schedule");
    ScheduleConfig s;
    s.phase1_steps = static_cast<int>(r.get_u32());
    s.phase2_strengths = r.get_f64_array();
    s.steps_per_target = static_cast<int>(r.get_u32());
    s.learning_rate = r.get_f64();
    s.optimizer = optimizer_from_string(r.get_string());
    s.sd_weighting = loss::sd_weighting_from_string(r.get_string());
    s.img2img_steps = static_cast<int>(r.get_u32());
    s.seed = r.get_u64();
    return s;
}

}  // namespace

void Runner::save_checkpoint(const std::string& path) const {
    BinaryWriter w;
    save_spec(w, spec_);
    save_schedule(w, schedule_);

    w.begin_section("progress");
    w.put_i64(global_step_);
    w.put_u32(static_cast<uint32_t>(p1_done_));
    w.put_u64(segment_);
    w.put_u32(static_cast<uint32_t>(segment_step_));
    w.put_u32(segment_refreshed_ ? 1 : 0);

    w.begin_section("rng");
    std::ostringstream rs;
    rng_sd_.serialize(rs);
    rs << '\n';
    rng_img2img_.serialize(rs);
    w.put_string(rs.str());

    w.begin_section("optimizer");
    w.put_string(to_string(opt_.kind));
    w.put_f64(opt_.lr);
    w.put_i64(opt_.t);
    w.put_f64_array(opt_.m);
    w.put_f64_array(opt_.v);

    w.begin_section("dream");
    w.put_f64(dream_.strength);
    w.put_u32(static_cast<uint32_t>(dream_.refresh_count));
    w.put_u32(static_cast<uint32_t>(dream_.current.size()));
    for (const auto& z : dream_.current) {
        w.put_u32(static_cast<uint32_t>(z.height()));
        w.put_u32(static_cast<uint32_t>(z.width()));
        w.put_f64_array(z.samples());
    }

    w.begin_section("history");
    w.put_u64(history_.size());
    for (const auto& rec : history_) {
        w.put_i64(rec.step);
        w.put_string(rec.phase);
        w.put_f64_array(rec.per_derived);
        w.put_f64(rec.total);
    }

    w.begin_section("primes/count");
    w.put_u32(static_cast<uint32_t>(primes_.size()));
    for (size_t i = 0; i < primes_.size(); ++i) {
        primes_[i]->save(w, "primes/" + std::to_string(i) + "/");
    }

    w.save(path);
}

Runner Runner::resume_checkpoint(const std::string& path, const guidance::GuidanceBackend& backend) {
    BinaryReader r(path);
    arrange::IllusionSpec spec = load_spec(r);
    ScheduleConfig schedule = load_schedule(r);

    r.open_section("primes/count");
    uint32_t nprimes = r.get_u32();
    std::vector<std::unique_ptr<parametric::ParametricImage>> primes;
    for (uint32_t i = 0; i < nprimes; ++i) {
        primes.push_back(parametric::load_parametric(r, "primes/" + std::to_string(i) + "/"));
    }

    Runner runner(std::move(spec), std::move(primes), backend, schedule);

    r.open_section("progress");
    runner.global_step_ = r.get_i64();
    runner.p1_done_ = static_cast<int>(r.get_u32());
    runner.segment_ = r.get_u64();
    runner.segment_step_ = static_cast<int>(r.get_u32());
    runner.segment_refreshed_ = r.get_u32() != 0;

    r.open_section("rng");
    std::istringstream rs(r.get_string());
    runner.rng_sd_.deserialize(rs);
    runner.rng_img2img_.deserialize(rs);

    r.open_section("optimizer");
    runner.opt_.kind = optimizer_from_string(r.get_string());
    runner.opt_.lr = r.get_f64();
    runner.opt_.t = r.get_i64();
    runner.opt_.m = r.get_f64_array();
    runner.opt_.v = r.get_f64_array();
    if (runner.opt_.kind == OptimizerKind::adam &&
        (runner.opt_.m.size() != runner.total_param_count() ||
         runner.opt_.v.size() != runner.total_param_count())) {
        throw IoError("optimizer state size mismatch in checkpoint");
    }

    r.open_section("dream");
    runner.dream_.strength = r.get_f64();
    runner.dream_.refresh_count = static_cast<int>(r.get_u32());
    uint32_t nz = r.get_u32();
    runner.dream_.current.resize(nz);
    for (auto& z : runner.dream_.current) {
        int h = static_cast<int>(r.get_u32());
        int w = static_cast<int>(r.get_u32());
        auto vals = r.get_f64_array();
        Image img(h, w);
        if (vals.size() != img.sample_count()) throw IoError("corrupt dream target in checkpoint");
        std::copy(vals.begin(), vals.end(), img.samples().begin());
        z = std::move(img);
    }

    r.open_section("history");
    uint64_t nrec = r.get_u64();
    runner.history_.resize(nrec);
    for (auto& rec : runner.history_) {
        rec.step = r.get_i64();
        rec.phase = r.get_string();
        rec.per_derived = r.get_f64_array();
        rec.total = r.get_f64();
    }

    return runner;
}

}  // namespace illusion::opt
