#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "illusion/core/image.hpp"

namespace illusion::arrange {

enum class IllusionKind { flip, rotation_overlay, hidden_overlay, custom };

std::string to_string(IllusionKind kind);
IllusionKind kind_from_string(const std::string& s);

struct TargetSpec {
    enum class Kind { text, image };
    enum class Resample { automatic, nearest, bilinear };

    Kind kind = Kind::text;
    std::string prompt;      // text targets
    std::string image_path;  // image targets
    Resample resample = Resample::automatic;
    Image image;             // loaded image target at working resolution
};

// One multiplicative factor of an arrangement: a prime, optionally rotated
// by quarter turns (counterclockwise).
struct ArrangementFactor {
    int prime = 0;
    int quarter_turns = 0;
};

// A derived image is squash(scale * product of factors); squash is tanh or
// identity. Identity selects, rotation permutes, multiplication models light
// filtering through stacked transparencies.
struct ArrangementOp {
    std::vector<ArrangementFactor> factors;
    double scale = 1.0;
    bool squash_tanh = false;
};

struct IllusionSpec {
    IllusionKind kind = IllusionKind::flip;
    int n = 1;
    int m = 2;
    double brightness_k = 0.0;   // overlay kinds
    bool tanh_normalize = true;  // false replicates bare k*prod (no squash)
    std::vector<double> weights;
    std::vector<TargetSpec> targets;
    std::vector<ArrangementOp> custom_ops;  // kind == custom only

    // Kind defaults: counts, brightness constant and weights. For
    // rotation_overlay, m may be 2..4.
    static IllusionSpec make(IllusionKind kind, int m_override = -1);

    // Collects every violated invariant; empty means valid.
    std::vector<std::string> check() const;
    // Throws ConfigError with all diagnostics joined.
    void validate() const;

    // The op realizing derived image j (1-based).
    ArrangementOp op_for(int j) const;
};

// k = 2 for rotation overlays, k = 3 for hidden overlays; other kinds have
// no brightness constant and throw.
double default_brightness(IllusionKind kind);

// d_j for j in [1, m].
Image derive(const IllusionSpec& spec, std::span<const Image> primes, int j);
std::vector<Image> derive_all(const IllusionSpec& spec, std::span<const Image> primes);

// Overlay evaluation with the brightness constant replaced by `gain`
// (flip and other scale-free ops are unaffected).
Image derive_with_gain(const IllusionSpec& spec, std::span<const Image> primes, int j, double gain);

// Accumulates dL/dprime_i into prime_grads given dL/dd_j.
void derive_backward(const IllusionSpec& spec, std::span<const Image> primes, int j,
                     const Image& out_grad, std::span<Image> prime_grads);

// Spot checks for custom ops: purity, finite-difference agreement,
// monotonicity and range closure on random inputs. Throws ConfigError.
void validate_custom(const IllusionSpec& spec, uint64_t seed = 0);

}  // namespace illusion::arrange
