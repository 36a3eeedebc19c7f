#pragma once

#include <optional>
#include <span>

#include "illusion/eval/embedder.hpp"

namespace illusion::eval {

struct Matrix {
    int rows = 0, cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}
    double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
};

double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations (ascending).
std::vector<double> symmetric_eigenvalues(Matrix a);

// Image-prompt cosine matrix K (rows: images, cols: prompts).
Matrix image_prompt_kernel(std::span<const Image> images, std::span<const std::string> prompts,
                           const Embedder& embedder);

// min over the diagonals of column-softmax(K/t) and row-softmax(K/t).
// Column softmax normalizes over images for a fixed prompt (dimension 0);
// row softmax over prompts for a fixed image (dimension 1).
double independence_from_kernel(const Matrix& kernel, double temperature = 0.05);
double independence_score(std::span<const Image> images, std::span<const std::string> prompts,
                          const Embedder& embedder, double temperature = 0.05);

// Effective diversity count: exp of the Shannon entropy of the eigenvalues
// of K/n, where K is the cosine kernel of the L2-normalized embeddings.
double vendi_score(std::span<const std::vector<double>> embeddings);
double vendi_score_of_images(std::span<const Image> images, const Embedder& embedder);

// cosine(v_i, e_i) per (image, prompt) pair.
std::vector<double> controllability(std::span<const Image> images, std::span<const std::string> prompts,
                                    const Embedder& embedder);

// Optional plug-in surface for aesthetics scorers (LAION-style predictors or
// VLM prompting). Scores are clamped to [0, 10].
class AestheticsPredictor {
public:
    virtual ~AestheticsPredictor() = default;
    virtual double score(const Image& img) const = 0;
    virtual std::string name() const = 0;
};

std::vector<double> aesthetics(std::span<const Image> images, const AestheticsPredictor* predictor);

// Instruction templates for VLM-based adapters ("<s>" is the subject token).
extern const char* const kVlmControllabilityInstruction;
extern const char* const kVlmAestheticsInstruction;

}  // namespace illusion::eval
