#include "illusion/guidance/backend.hpp"

#include <algorithm>
#include <cmath>

#include "illusion/core/errors.hpp"
#include "illusion/core/parallel.hpp"

namespace illusion::guidance {

NoiseSchedule NoiseSchedule::linear_beta(int timesteps, double beta_start, double beta_end) {
    if (timesteps < 1) throw ConfigError("noise schedule needs at least one timestep");
    if (!(beta_start > 0) || !(beta_end > beta_start) || beta_end >= 1.0) {
        throw ConfigError("noise schedule requires 0 < beta_start < beta_end < 1");
    }
    NoiseSchedule s;
    s.timesteps = timesteps;
    s.alpha_bar.resize(timesteps + 1);
    s.alpha_bar[0] = 1.0;
    double prod = 1.0;
    for (int t = 1; t <= timesteps; ++t) {
        double beta = timesteps == 1 ? beta_start
                                     : beta_start + (beta_end - beta_start) * (t - 1) / (timesteps - 1);
        prod *= 1.0 - beta;
        s.alpha_bar[t] = prod;
    }
    return s;
}

double NoiseSchedule::sqrt_ab(int tau) const {
    if (tau < 0 || tau > timesteps) throw ConfigError("timestep out of range: " + std::to_string(tau));
    return std::sqrt(alpha_bar[tau]);
}

double NoiseSchedule::sqrt_one_minus_ab(int tau) const {
    if (tau < 0 || tau > timesteps) throw ConfigError("timestep out of range: " + std::to_string(tau));
    return std::sqrt(1.0 - alpha_bar[tau]);
}

Image add_noise(const NoiseSchedule& sched, const Image& x, int tau, const Image& eps) {
    if (tau < 1 || tau > sched.timesteps) {
        throw ConfigError("add_noise: timestep " + std::to_string(tau) + " outside [1," +
                          std::to_string(sched.timesteps) + "]");
    }
    if (!x.same_shape(eps)) throw ConfigError("add_noise: noise shape mismatch");
    const double a = sched.sqrt_ab(tau), b = sched.sqrt_one_minus_ab(tau);
    Image out(x.height(), x.width());
    const double* xd = x.data();
    const double* ed = eps.data();
    double* od = out.data();
    par::for_n(static_cast<int64_t>(x.sample_count()), [&](int64_t i) { od[i] = a * xd[i] + b * ed[i]; });
    return out;
}

Image img2img(const GuidanceBackend& backend, const std::string& prompt, const Image& image,
              double strength, RngStream& rng, int reverse_steps) {
    if (!(strength >= 0.0 && strength <= 1.0)) {
        throw ConfigError("img2img: strength must lie in [0,1]");
    }
    const NoiseSchedule& sched = backend.schedule();
    const int tau_start = static_cast<int>(strength * backend.max_timestep());
    if (tau_start == 0) return image;  // nothing is changed

    Image latent = backend.encode(image);
    Image eps(latent.height(), latent.width());
    for (double& v : eps.samples()) v = rng.normal();
    Image x = add_noise(sched, latent, tau_start, eps);

    const auto embedding = backend.embed_text(prompt);
    const int nsteps = std::max(1, std::min(reverse_steps, tau_start));

    // Deterministic (ODE-style) reverse steps over a descending tau grid that
    // ends at 0 where alpha_bar = 1.
    int tau_a = tau_start;
    for (int k = 1; k <= nsteps; ++k) {
        int tau_b = tau_start - static_cast<int>(std::llround(static_cast<double>(k) * tau_start / nsteps));
        if (tau_b >= tau_a) tau_b = tau_a - 1;
        if (tau_b < 0) tau_b = 0;
        const Image eps_hat = backend.predict_noise(x, tau_a, embedding);
        const double sa = sched.sqrt_ab(tau_a), sna = sched.sqrt_one_minus_ab(tau_a);
        const double sb = sched.sqrt_ab(tau_b), snb = sched.sqrt_one_minus_ab(tau_b);
        double* xd = x.data();
        const double* ehat = eps_hat.data();
        par::for_n(static_cast<int64_t>(x.sample_count()), [&](int64_t i) {
            double x0 = (xd[i] - sna * ehat[i]) / sa;
            xd[i] = sb * x0 + snb * ehat[i];
        });
        tau_a = tau_b;
        if (tau_a == 0) break;
    }
    return backend.decode(x);
}

}  // namespace illusion::guidance
