#include "illusion/cli/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "illusion/core/errors.hpp"
#include "illusion/core/synthetic.hpp"
#include "illusion/guidance/external_backend.hpp"
#include "illusion/guidance/oracle_backend.hpp"
#include "illusion/parametric/ffn_image.hpp"
#include "illusion/parametric/raw_pixel_image.hpp"
#include "illusion/targets/targets.hpp"

namespace illusion::cli {

using nlohmann::json;

namespace {

// Key whitelist, one entry per object context. Array element contexts use
// the "[]" suffix.
const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s = {
        {"", {"seed", "threads", "output_dir", "progress_every", "illusion", "parametric", "guidance",
              "schedule", "evaluation"}},
        {"illusion",
         {"kind", "resolution", "m", "brightness_k", "tanh_normalize", "weights", "targets", "custom"}},
        {"illusion.targets[]", {"kind", "prompt", "path", "resample"}},
        {"illusion.custom", {"n", "ops"}},
        {"illusion.custom.ops[]", {"factors", "scale", "tanh"}},
        {"illusion.custom.ops[].factors[]", {"prime", "rot90"}},
        {"parametric", {"kind", "ffn", "pixels"}},
        {"parametric.ffn", {"num_features", "frequency_scale", "hidden_widths"}},
        {"parametric.pixels", {"init_std"}},
        {"guidance", {"backend", "timesteps", "beta_start", "beta_end", "oracle", "external"}},
        {"guidance.oracle", {"default_target", "targets"}},
        {"guidance.oracle.default_target", {"path", "synthetic", "seed"}},
        {"guidance.oracle.targets[]", {"prompt", "path", "synthetic", "seed"}},
        {"guidance.external", {"model", "device", "guidance_scale"}},
        {"schedule",
         {"phase1_steps", "steps_per_target", "strengths", "learning_rate", "optimizer", "sd_weighting",
          "img2img_steps"}},
        {"schedule.strengths", {"start", "stop", "step"}},
        {"evaluation", {"enabled", "temperature", "protocol"}},
        {"evaluation.protocol", {"styles", "subjects", "group_size", "groups_per_style", "seed"}},
    };
    return s;
}

void collect_unknown_keys(const json& node, const std::string& context, const std::string& display,
                          std::vector<Diagnostic>& out) {
    if (node.is_object()) {
        auto it = schema().find(context);
        for (const auto& [key, value] : node.items()) {
            std::string child_display = display.empty() ? key : display + "." + key;
            if (it != schema().end() && !it->second.count(key)) {
                out.push_back({child_display, "unknown key"});
                continue;
            }
            std::string child_context = context.empty() ? key : context + "." + key;
            collect_unknown_keys(value, child_context, child_display, out);
        }
    } else if (node.is_array()) {
        for (size_t i = 0; i < node.size(); ++i) {
            if (node[i].is_object() || node[i].is_array()) {
                collect_unknown_keys(node[i], context + "[]", display + "[" + std::to_string(i) + "]", out);
            }
        }
    }
}

template <class T>
T value_or(const json& j, const std::string& key, T fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

const json* maybe(const json& j, const std::string& key) {
    if (j.is_object() && j.contains(key)) return &j.at(key);
    return nullptr;
}

arrange::TargetSpec::Resample resample_from_string(const std::string& s) {
    if (s == "auto") return arrange::TargetSpec::Resample::automatic;
    if (s == "nearest") return arrange::TargetSpec::Resample::nearest;
    if (s == "bilinear") return arrange::TargetSpec::Resample::bilinear;
    throw ConfigError("unknown resample mode: " + s + " (expected auto|nearest|bilinear)");
}

}  // namespace

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config: " + path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    std::string dir = std::filesystem::path(path).parent_path().string();
    return from_json(std::move(j), dir.empty() ? "." : dir);
}

RunConfig RunConfig::from_json(json j, std::string base_dir) {
    if (!j.is_object()) throw ConfigError("config root must be an object");
    RunConfig c;
    c.json_ = std::move(j);
    c.base_dir_ = std::move(base_dir);
    return c;
}

void RunConfig::apply_override(const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("--set expects key.path=value, got: " + assignment);
    }
    std::string keypath = assignment.substr(0, eq);
    std::string raw = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::exception&) {
        value = raw;  // plain string
    }
    json* node = &json_;
    std::istringstream keys(keypath);
    std::string key, prev;
    std::vector<std::string> parts;
    while (std::getline(keys, key, '.')) parts.push_back(key);
    if (parts.empty()) throw ConfigError("--set: empty key path");
    for (size_t i = 0; i + 1 < parts.size(); ++i) {
        node = &(*node)[parts[i]];
        if (!node->is_object()) *node = json::object();
    }
    (*node)[parts.back()] = std::move(value);
}

std::string RunConfig::resolve_path(const std::string& p) const {
    std::filesystem::path fp(p);
    if (fp.is_absolute()) return p;
    return (std::filesystem::path(base_dir_) / fp).string();
}

uint64_t RunConfig::seed() const { return value_or<uint64_t>(json_, "seed", 0); }
int RunConfig::threads() const { return value_or<int>(json_, "threads", 0); }
std::string RunConfig::output_dir() const { return value_or<std::string>(json_, "output_dir", "out"); }
int RunConfig::progress_every() const { return value_or<int>(json_, "progress_every", 100); }

int RunConfig::resolution() const {
    if (const json* il = maybe(json_, "illusion")) return value_or<int>(*il, "resolution", 128);
    return 128;
}

arrange::IllusionSpec RunConfig::make_spec(bool load_target_images) const {
    const json* il = maybe(json_, "illusion");
    if (!il) throw ConfigError("config: missing 'illusion' section");
    auto kind = arrange::kind_from_string(value_or<std::string>(*il, "kind", "flip"));

    arrange::IllusionSpec spec;
    if (kind == arrange::IllusionKind::custom) {
        spec.kind = kind;
        const json* cust = maybe(*il, "custom");
        if (!cust) throw ConfigError("illusion.custom is required for kind=custom");
        spec.n = value_or<int>(*cust, "n", 1);
        const json* ops = maybe(*cust, "ops");
        if (!ops || !ops->is_array() || ops->empty()) {
            throw ConfigError("illusion.custom.ops must be a non-empty array");
        }
        for (const auto& opj : *ops) {
            arrange::ArrangementOp op;
            if (const json* factors = maybe(opj, "factors")) {
                for (const auto& fj : *factors) {
                    arrange::ArrangementFactor f;
                    f.prime = value_or<int>(fj, "prime", 0);
                    f.quarter_turns = value_or<int>(fj, "rot90", 0);
                    op.factors.push_back(f);
                }
            }
            op.scale = value_or<double>(opj, "scale", 1.0);
            op.squash_tanh = value_or<bool>(opj, "tanh", false);
            spec.custom_ops.push_back(std::move(op));
        }
        spec.m = static_cast<int>(spec.custom_ops.size());
        spec.weights.assign(spec.m, 1.0);
        spec.targets.resize(spec.m);
    } else {
        spec = arrange::IllusionSpec::make(kind, value_or<int>(*il, "m", -1));
    }

    if (il->contains("brightness_k")) spec.brightness_k = il->at("brightness_k").get<double>();
    spec.tanh_normalize = value_or<bool>(*il, "tanh_normalize", true);
    if (const json* wj = maybe(*il, "weights")) {
        spec.weights = wj->get<std::vector<double>>();
    }
    if (const json* tj = maybe(*il, "targets")) {
        if (!tj->is_array()) throw ConfigError("illusion.targets must be an array");
        spec.targets.clear();
        const int res = resolution();
        for (size_t i = 0; i < tj->size(); ++i) {
            const json& t = (*tj)[i];
            arrange::TargetSpec ts;
            std::string kind_s = value_or<std::string>(t, "kind", "text");
            if (kind_s == "text") {
                ts.kind = arrange::TargetSpec::Kind::text;
                ts.prompt = value_or<std::string>(t, "prompt", "");
                if (ts.prompt.empty()) {
                    throw ConfigError("illusion.targets[" + std::to_string(i) + "].prompt is required");
                }
            } else if (kind_s == "image") {
                ts.kind = arrange::TargetSpec::Kind::image;
                ts.image_path = value_or<std::string>(t, "path", "");
                if (ts.image_path.empty()) {
                    throw ConfigError("illusion.targets[" + std::to_string(i) + "].path is required");
                }
                ts.resample = resample_from_string(value_or<std::string>(t, "resample", "auto"));
                if (load_target_images) {
                    ts.image = targets::load_image_target(resolve_path(ts.image_path), res, res, ts.resample);
                }
            } else {
                throw ConfigError("illusion.targets[" + std::to_string(i) + "].kind must be text|image");
            }
            spec.targets.push_back(std::move(ts));
        }
    }
    return spec;
}

opt::ScheduleConfig RunConfig::make_schedule() const {
    opt::ScheduleConfig s;
    s.seed = seed();
    const json* sj = maybe(json_, "schedule");
    if (!sj) return s;
    s.phase1_steps = value_or<int>(*sj, "phase1_steps", s.phase1_steps);
    s.steps_per_target = value_or<int>(*sj, "steps_per_target", s.steps_per_target);
    s.learning_rate = value_or<double>(*sj, "learning_rate", s.learning_rate);
    s.optimizer = opt::optimizer_from_string(value_or<std::string>(*sj, "optimizer", "adam"));
    s.sd_weighting = loss::sd_weighting_from_string(value_or<std::string>(*sj, "sd_weighting", "constant"));
    s.img2img_steps = value_or<int>(*sj, "img2img_steps", s.img2img_steps);
    if (const json* st = maybe(*sj, "strengths")) {
        if (st->is_array()) {
            s.phase2_strengths = st->get<std::vector<double>>();
        } else if (st->is_object()) {
            double start = value_or<double>(*st, "start", 0.90);
            double stop = value_or<double>(*st, "stop", 0.01);
            double step = value_or<double>(*st, "step", 0.01);
            if (!(step > 0) || !(start >= stop)) {
                throw ConfigError("schedule.strengths: need step > 0 and start >= stop");
            }
            s.phase2_strengths.clear();
            for (double v = start; v > stop - step / 2; v -= step) s.phase2_strengths.push_back(v);
        } else {
            throw ConfigError("schedule.strengths must be an array or {start,stop,step}");
        }
    }
    return s;
}

std::unique_ptr<guidance::GuidanceBackend> RunConfig::make_backend(const arrange::IllusionSpec& spec) const {
    const json* gj = maybe(json_, "guidance");
    std::string backend = gj ? value_or<std::string>(*gj, "backend", "oracle") : "oracle";
    const int timesteps = gj ? value_or<int>(*gj, "timesteps", 1000) : 1000;
    const double beta_start = gj ? value_or<double>(*gj, "beta_start", 1e-4) : 1e-4;
    const double beta_end = gj ? value_or<double>(*gj, "beta_end", 0.02) : 0.02;

    if (backend == "external") {
        guidance::ExternalBackendConfig cfg;
        if (const json* ej = gj ? maybe(*gj, "external") : nullptr) {
            cfg.model_id = value_or<std::string>(*ej, "model", "");
            cfg.device = value_or<std::string>(*ej, "device", "cpu");
            cfg.guidance_scale = value_or<double>(*ej, "guidance_scale", 7.5);
        }
        if (const char* cache = std::getenv("ILLUSION_EXTERNAL_CACHE")) cfg.cache_dir = cache;
        return guidance::make_external_backend(cfg);
    }
    if (backend != "oracle") {
        throw ConfigError("guidance.backend must be oracle|external, got: " + backend);
    }

    const int res = resolution();
    auto sched = guidance::NoiseSchedule::linear_beta(timesteps, beta_start, beta_end);
    const json* oj = gj ? maybe(*gj, "oracle") : nullptr;

    auto load_source = [&](const json& src, uint64_t fallback_seed) -> Image {
        std::string path = value_or<std::string>(src, "path", "");
        if (!path.empty()) {
            return targets::load_image_target(resolve_path(path), res, res);
        }
        std::string synthetic = value_or<std::string>(src, "synthetic", "smooth");
        uint64_t sseed = value_or<uint64_t>(src, "seed", fallback_seed);
        if (synthetic == "smooth") return smooth_random_image(res, res, sseed);
        if (synthetic == "gradient") return gradient_image(res, res);
        throw ConfigError("unknown synthetic image kind: " + synthetic);
    };

    Image default_target = (oj && maybe(*oj, "default_target"))
                               ? load_source(*maybe(*oj, "default_target"), seed())
                               : smooth_random_image(res, res, seed());
    auto oracle = std::make_unique<guidance::AnalyticOracleBackend>(std::move(default_target),
                                                                    std::move(sched));
    if (oj) {
        if (const json* tj = maybe(*oj, "targets")) {
            for (size_t i = 0; i < tj->size(); ++i) {
                const json& t = (*tj)[i];
                std::string prompt = value_or<std::string>(t, "prompt", "");
                if (prompt.empty()) {
                    throw ConfigError("guidance.oracle.targets[" + std::to_string(i) + "].prompt required");
                }
                oracle->register_target(prompt, load_source(t, seed() + i + 1));
            }
        }
    } else {
        // without explicit oracle targets, register the default for each text prompt
        for (const auto& t : spec.targets) {
            if (t.kind == arrange::TargetSpec::Kind::text) {
                oracle->register_target(t.prompt, oracle->default_target());
            }
        }
    }
    return oracle;
}

std::vector<std::unique_ptr<parametric::ParametricImage>> RunConfig::make_primes(
    const arrange::IllusionSpec& spec) const {
    const json* pj = maybe(json_, "parametric");
    std::string kind = pj ? value_or<std::string>(*pj, "kind", "ffn") : "ffn";
    const int res = resolution();
    std::vector<std::unique_ptr<parametric::ParametricImage>> primes;
    for (int i = 0; i < spec.n; ++i) {
        uint64_t prime_seed = RngStream::derive_seed(seed(), "prime" + std::to_string(i));
        if (kind == "ffn") {
            parametric::FfnConfig cfg;
            if (const json* fj = pj ? maybe(*pj, "ffn") : nullptr) {
                cfg.num_features = value_or<int>(*fj, "num_features", cfg.num_features);
                cfg.frequency_scale = value_or<double>(*fj, "frequency_scale", cfg.frequency_scale);
                if (const json* hw = maybe(*fj, "hidden_widths")) {
                    cfg.hidden_widths = hw->get<std::vector<int>>();
                }
            }
            primes.push_back(parametric::create_ffn(res, res, prime_seed, cfg));
        } else if (kind == "pixels") {
            double init_std = 0.05;
            if (const json* xj = pj ? maybe(*pj, "pixels") : nullptr) {
                init_std = value_or<double>(*xj, "init_std", init_std);
            }
            primes.push_back(std::make_unique<parametric::RawPixelImage>(res, res, prime_seed, init_std));
        } else {
            throw ConfigError("parametric.kind must be ffn|pixels, got: " + kind);
        }
    }
    return primes;
}

bool RunConfig::evaluation_enabled() const {
    if (const json* ej = maybe(json_, "evaluation")) return value_or<bool>(*ej, "enabled", false);
    return false;
}

double RunConfig::evaluation_temperature() const {
    if (const json* ej = maybe(json_, "evaluation")) return value_or<double>(*ej, "temperature", 0.05);
    return 0.05;
}

eval::PromptProtocol RunConfig::make_protocol() const {
    eval::PromptProtocol p = eval::PromptProtocol::defaults();
    p.seed = seed();
    if (const json* ej = maybe(json_, "evaluation")) {
        if (const json* pj = maybe(*ej, "protocol")) {
            if (const json* st = maybe(*pj, "styles")) p.styles = st->get<std::vector<std::string>>();
            if (const json* su = maybe(*pj, "subjects")) p.subjects = su->get<std::vector<std::string>>();
            p.group_size = value_or<int>(*pj, "group_size", p.group_size);
            p.groups_per_style = value_or<int>(*pj, "groups_per_style", p.groups_per_style);
            p.seed = value_or<uint64_t>(*pj, "seed", p.seed);
        }
    }
    return p;
}

std::vector<Diagnostic> RunConfig::validate() const {
    std::vector<Diagnostic> diags;
    collect_unknown_keys(json_, "", "", diags);
    if (!diags.empty()) return diags;  // structural problems first

    try {
        if (resolution() < 8) diags.push_back({"illusion.resolution", "must be >= 8"});
        auto spec = make_spec(/*load_target_images=*/false);
        for (const auto& err : spec.check()) diags.push_back({"illusion", err});
        // image targets must exist (checked without loading pixel data)
        for (size_t i = 0; i < spec.targets.size(); ++i) {
            const auto& t = spec.targets[i];
            if (t.kind == arrange::TargetSpec::Kind::image && !t.image_path.empty()) {
                if (!std::filesystem::exists(resolve_path(t.image_path))) {
                    diags.push_back({"illusion.targets[" + std::to_string(i) + "].path",
                                     "file not found: " + t.image_path});
                }
            }
        }
    } catch (const Error& e) {
        diags.push_back({"illusion", e.what()});
    }
    try {
        auto sched = make_schedule();
        for (const auto& err : sched.check()) diags.push_back({"schedule", err});
    } catch (const Error& e) {
        diags.push_back({"schedule", e.what()});
    }
    if (const json* gj = maybe(json_, "guidance")) {
        std::string backend = value_or<std::string>(*gj, "backend", "oracle");
        if (backend != "oracle" && backend != "external") {
            diags.push_back({"guidance.backend", "must be oracle|external"});
        }
        int timesteps = value_or<int>(*gj, "timesteps", 1000);
        if (timesteps < 1) diags.push_back({"guidance.timesteps", "must be >= 1"});
        double b0 = value_or<double>(*gj, "beta_start", 1e-4);
        double b1 = value_or<double>(*gj, "beta_end", 0.02);
        if (!(b0 > 0 && b1 > b0 && b1 < 1)) {
            diags.push_back({"guidance.beta_start/beta_end", "need 0 < beta_start < beta_end < 1"});
        }
    }
    if (evaluation_enabled()) {
        try {
            auto protocol = make_protocol();
            if (protocol.group_size > static_cast<int>(protocol.subjects.size())) {
                diags.push_back({"evaluation.protocol.group_size", "exceeds subject pool"});
            }
        } catch (const Error& e) {
            diags.push_back({"evaluation", e.what()});
        }
    }
    if (threads() < 0) diags.push_back({"threads", "must be >= 0"});
    return diags;
}

void RunConfig::require_valid() const {
    auto diags = validate();
    if (diags.empty()) return;
    std::ostringstream os;
    os << "invalid config:";
    for (const auto& d : diags) os << "\n  " << d.path << ": " << d.message;
    throw ConfigError(os.str());
}

}  // namespace illusion::cli
