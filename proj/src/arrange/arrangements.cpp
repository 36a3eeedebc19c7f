#include "illusion/arrange/arrangements.hpp"

#include <cmath>
#include <sstream>

#include "illusion/core/errors.hpp"
#include "illusion/core/parallel.hpp"
#include "illusion/core/rng.hpp"

namespace illusion::arrange {

namespace {

// Source sample index for a counterclockwise rotation by q quarter turns:
// out(r, c) = in(src(r, c)).
inline int64_t rotated_source(int q, int r, int c, int h, int w) {
    switch (q & 3) {
        case 0: return static_cast<int64_t>(r) * w + c;
        case 1: return static_cast<int64_t>(c) * w + (w - 1 - r);
        case 2: return static_cast<int64_t>(h - 1 - r) * w + (w - 1 - c);
        default: return static_cast<int64_t>(h - 1 - c) * w + r;
    }
}

bool op_uses_quarter_rotation(const ArrangementOp& op) {
    for (const auto& f : op.factors) {
        if ((f.quarter_turns & 1) != 0) return true;
    }
    return false;
}

void check_primes(const IllusionSpec& spec, std::span<const Image> primes, const ArrangementOp& op) {
    if (static_cast<int>(primes.size()) != spec.n) {
        throw ConfigError("derive: expected " + std::to_string(spec.n) + " prime images, got " +
                          std::to_string(primes.size()));
    }
    for (const auto& p : primes) {
        if (!p.same_shape(primes[0])) throw ConfigError("derive: prime resolutions differ");
        if (p.empty()) throw ConfigError("derive: empty prime image");
    }
    if (op_uses_quarter_rotation(op) && primes[0].height() != primes[0].width()) {
        throw ConfigError("derive: quarter-turn rotations require square images");
    }
    for (const auto& f : op.factors) {
        if (f.prime < 0 || f.prime >= spec.n) {
            throw ConfigError("derive: factor references prime " + std::to_string(f.prime) +
                              " outside [0," + std::to_string(spec.n - 1) + "]");
        }
    }
}

Image eval_op(const ArrangementOp& op, std::span<const Image> primes) {
    const int h = primes[0].height(), w = primes[0].width();
    Image out(h, w);
    const int64_t npix = static_cast<int64_t>(h) * w;
    double* o = out.data();
    par::for_n(npix, [&](int64_t p) {
        const int r = static_cast<int>(p / w), c = static_cast<int>(p % w);
        for (int ch = 0; ch < 3; ++ch) {
            double v = op.scale;
            for (const auto& f : op.factors) {
                v *= primes[f.prime].data()[rotated_source(f.quarter_turns, r, c, h, w) * 3 + ch];
            }
            o[p * 3 + ch] = op.squash_tanh ? std::tanh(v) : v;
        }
    });
    return out;
}

}  // namespace

std::string to_string(IllusionKind kind) {
    switch (kind) {
        case IllusionKind::flip: return "flip";
        case IllusionKind::rotation_overlay: return "rotation_overlay";
        case IllusionKind::hidden_overlay: return "hidden_overlay";
        case IllusionKind::custom: return "custom";
    }
    return "?";
}

IllusionKind kind_from_string(const std::string& s) {
    if (s == "flip") return IllusionKind::flip;
    if (s == "rotation_overlay") return IllusionKind::rotation_overlay;
    if (s == "hidden_overlay") return IllusionKind::hidden_overlay;
    if (s == "custom") return IllusionKind::custom;
    throw ConfigError("unknown illusion kind: " + s);
}

double default_brightness(IllusionKind kind) {
    switch (kind) {
        case IllusionKind::rotation_overlay: return 2.0;
        case IllusionKind::hidden_overlay: return 3.0;
        default:
            throw ConfigError("brightness constant is not applicable to kind '" + to_string(kind) + "'");
    }
}

IllusionSpec IllusionSpec::make(IllusionKind kind, int m_override) {
    IllusionSpec s;
    s.kind = kind;
    switch (kind) {
        case IllusionKind::flip:
            s.n = 1;
            s.m = 2;
            break;
        case IllusionKind::rotation_overlay:
            s.n = 2;
            s.m = m_override > 0 ? m_override : 4;
            s.brightness_k = default_brightness(kind);
            break;
        case IllusionKind::hidden_overlay:
            s.n = 4;
            s.m = 5;
            s.brightness_k = default_brightness(kind);
            break;
        case IllusionKind::custom:
            s.n = 0;
            s.m = 0;
            break;
    }
    s.weights.assign(s.m, 1.0);
    if (kind == IllusionKind::hidden_overlay) s.weights[4] = 3.0;
    s.targets.resize(s.m);
    return s;
}

ArrangementOp IllusionSpec::op_for(int j) const {
    if (j < 1 || j > m) {
        throw ConfigError("arrangement index " + std::to_string(j) + " outside [1," + std::to_string(m) + "]");
    }
    ArrangementOp op;
    switch (kind) {
        case IllusionKind::flip:
            op.factors = {{0, j == 1 ? 0 : 2}};
            return op;
        case IllusionKind::rotation_overlay:
            op.factors = {{0, 0}, {1, j - 1}};
            op.scale = brightness_k;
            op.squash_tanh = tanh_normalize;
            return op;
        case IllusionKind::hidden_overlay:
            if (j <= 4) {
                op.factors = {{j - 1, 0}};
                return op;
            }
            op.factors = {{0, 0}, {1, 0}, {2, 0}, {3, 0}};
            op.scale = brightness_k;
            op.squash_tanh = tanh_normalize;
            return op;
        case IllusionKind::custom:
            return custom_ops[j - 1];
    }
    throw ConfigError("bad illusion kind");
}

std::vector<std::string> IllusionSpec::check() const {
    std::vector<std::string> errs;
    auto expect = [&](bool ok, const std::string& msg) {
        if (!ok) errs.push_back(msg);
    };
    switch (kind) {
        case IllusionKind::flip:
            expect(n == 1, "flip requires n=1");
            expect(m == 2, "flip requires m=2");
            break;
        case IllusionKind::rotation_overlay:
            expect(n == 2, "rotation_overlay requires n=2");
            expect(m >= 2 && m <= 4, "rotation_overlay requires 2 <= m <= 4");
            expect(brightness_k > 0, "rotation_overlay requires brightness_k > 0");
            break;
        case IllusionKind::hidden_overlay:
            expect(n == 4, "hidden_overlay requires n=4");
            expect(m == 5, "hidden_overlay requires m=5");
            expect(brightness_k > 0, "hidden_overlay requires brightness_k > 0");
            break;
        case IllusionKind::custom:
            expect(n >= 1, "custom requires n >= 1");
            expect(m >= 1 && m == static_cast<int>(custom_ops.size()),
                   "custom requires m == number of custom ops");
            for (size_t j = 0; j < custom_ops.size(); ++j) {
                if (custom_ops[j].factors.empty()) {
                    errs.push_back("custom op " + std::to_string(j + 1) + " has no factors");
                }
                for (const auto& f : custom_ops[j].factors) {
                    if (f.prime < 0 || f.prime >= n) {
                        errs.push_back("custom op " + std::to_string(j + 1) + " references prime " +
                                       std::to_string(f.prime) + " outside [0," + std::to_string(n - 1) + "]");
                    }
                }
            }
            break;
    }
    if (kind != IllusionKind::custom && !custom_ops.empty()) {
        errs.push_back("custom_ops are only allowed for kind=custom");
    }
    expect(static_cast<int>(weights.size()) == m,
           "weights must have exactly m=" + std::to_string(m) + " entries");
    for (size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] > 0)) {
            errs.push_back("weights[" + std::to_string(i) + "] must be > 0");
        }
    }
    expect(static_cast<int>(targets.size()) == m,
           "targets must have exactly m=" + std::to_string(m) + " entries");
    return errs;
}

void IllusionSpec::validate() const {
    auto errs = check();
    if (errs.empty()) return;
    std::ostringstream os;
    os << "invalid illusion spec:";
    for (const auto& e : errs) os << "\n  - " << e;
    throw ConfigError(os.str());
}

Image derive(const IllusionSpec& spec, std::span<const Image> primes, int j) {
    ArrangementOp op = spec.op_for(j);
    check_primes(spec, primes, op);
    return eval_op(op, primes);
}

Image derive_with_gain(const IllusionSpec& spec, std::span<const Image> primes, int j, double gain) {
    ArrangementOp op = spec.op_for(j);
    check_primes(spec, primes, op);
    if (op.scale != 1.0 || op.squash_tanh) op.scale = gain;  // overlays only; flip ignores gain
    return eval_op(op, primes);
}

std::vector<Image> derive_all(const IllusionSpec& spec, std::span<const Image> primes) {
    std::vector<Image> out;
    out.reserve(spec.m);
    for (int j = 1; j <= spec.m; ++j) out.push_back(derive(spec, primes, j));
    return out;
}

void derive_backward(const IllusionSpec& spec, std::span<const Image> primes, int j,
                     const Image& out_grad, std::span<Image> prime_grads) {
    ArrangementOp op = spec.op_for(j);
    check_primes(spec, primes, op);
    if (static_cast<int>(prime_grads.size()) != spec.n) {
        throw ConfigError("derive_backward: prime_grads size mismatch");
    }
    const int h = primes[0].height(), w = primes[0].width();
    if (out_grad.height() != h || out_grad.width() != w) {
        throw ConfigError("derive_backward: out_grad shape mismatch");
    }
    for (auto& g : prime_grads) {
        if (g.height() != h || g.width() != w) throw ConfigError("derive_backward: grad shape mismatch");
    }

    const int64_t npix = static_cast<int64_t>(h) * w;
    const int nf = static_cast<int>(op.factors.size());

    // d out / d u where out = squash(u), u = scale * prod
    Image du(h, w);
    par::for_n(npix, [&](int64_t p) {
        const int r = static_cast<int>(p / w), c = static_cast<int>(p % w);
        for (int ch = 0; ch < 3; ++ch) {
            double v = op.scale;
            for (const auto& f : op.factors) {
                v *= primes[f.prime].data()[rotated_source(f.quarter_turns, r, c, h, w) * 3 + ch];
            }
            double g = out_grad.data()[p * 3 + ch];
            if (op.squash_tanh) {
                double t = std::tanh(v);
                g *= 1.0 - t * t;
            }
            du.data()[p * 3 + ch] = g;
        }
    });

    // One pass per factor; the rotation is a bijection so writes never
    // collide within a pass.
    for (int fi = 0; fi < nf; ++fi) {
        const auto& f = op.factors[fi];
        double* gout = prime_grads[f.prime].data();
        par::for_n(npix, [&](int64_t p) {
            const int r = static_cast<int>(p / w), c = static_cast<int>(p % w);
            for (int ch = 0; ch < 3; ++ch) {
                double leave_one_out = op.scale;
                for (int fo = 0; fo < nf; ++fo) {
                    if (fo == fi) continue;
                    const auto& g = op.factors[fo];
                    leave_one_out *= primes[g.prime].data()[rotated_source(g.quarter_turns, r, c, h, w) * 3 + ch];
                }
                int64_t src = rotated_source(f.quarter_turns, r, c, h, w);
                gout[src * 3 + ch] += du.data()[p * 3 + ch] * leave_one_out;
            }
        });
    }
}

void validate_custom(const IllusionSpec& spec, uint64_t seed) {
    if (spec.kind != IllusionKind::custom) return;
    spec.validate();
    RngStream rng(RngStream::derive_seed(seed, "validate-custom"));
    const int h = 8, w = 8;
    std::vector<Image> primes;
    for (int i = 0; i < spec.n; ++i) {
        Image img(h, w);
        for (double& v : img.samples()) v = 0.1 + 0.8 * rng.uniform();
        primes.push_back(std::move(img));
    }
    for (int j = 1; j <= spec.m; ++j) {
        Image a = derive(spec, primes, j);
        Image b = derive(spec, primes, j);
        if (!(a == b)) throw ConfigError("custom op " + std::to_string(j) + " is not a fixed operation");

        for (double v : a.samples()) {
            if (v < -1e-12 || v > 1.0 + 1e-12) {
                throw ConfigError("custom op " + std::to_string(j) +
                                  " leaves [0,1] on [0,1] inputs; add a tanh squash or reduce scale");
            }
        }

        // finite-difference spot check against the analytic backward
        Image upstream(h, w);
        for (double& v : upstream.samples()) v = rng.uniform() - 0.5;
        std::vector<Image> grads(spec.n, Image(h, w));
        derive_backward(spec, primes, j, upstream, grads);
        const double fd_eps = 1e-6;
        for (int trial = 0; trial < 8; ++trial) {
            int pi = static_cast<int>(rng.uniform_int(0, spec.n - 1));
            int64_t si = rng.uniform_int(0, static_cast<int64_t>(h) * w * 3 - 1);
            double saved = primes[pi].samples()[si];
            auto scalar = [&]() {
                Image d = derive(spec, primes, j);
                double s = 0;
                for (size_t q = 0; q < d.sample_count(); ++q) s += d.samples()[q] * upstream.samples()[q];
                return s;
            };
            primes[pi].samples()[si] = saved + fd_eps;
            double up = scalar();
            primes[pi].samples()[si] = saved - fd_eps;
            double dn = scalar();
            primes[pi].samples()[si] = saved;
            double fd = (up - dn) / (2 * fd_eps);
            double an = grads[pi].samples()[si];
            double denom = std::max({std::abs(fd), std::abs(an), 1e-8});
            if (std::abs(fd - an) / denom > 1e-3) {
                throw ConfigError("custom op " + std::to_string(j) + " failed the gradient spot check");
            }
        }

        // monotonicity spot check: raising any input sample must not lower the output
        for (int trial = 0; trial < 8; ++trial) {
            int pi = static_cast<int>(rng.uniform_int(0, spec.n - 1));
            int64_t si = rng.uniform_int(0, static_cast<int64_t>(h) * w * 3 - 1);
            double saved = primes[pi].samples()[si];
            Image before = derive(spec, primes, j);
            primes[pi].samples()[si] = std::min(1.0, saved + 0.05);
            Image after = derive(spec, primes, j);
            primes[pi].samples()[si] = saved;
            for (size_t q = 0; q < before.sample_count(); ++q) {
                if (after.samples()[q] < before.samples()[q] - 1e-12) {
                    throw ConfigError("custom op " + std::to_string(j) +
                                      " is not monotone in its inputs (not realizable as light filtering)");
                }
            }
        }
    }
}

}  // namespace illusion::arrange
