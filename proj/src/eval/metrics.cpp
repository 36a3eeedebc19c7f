#include "illusion/eval/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "illusion/core/errors.hpp"

namespace illusion::eval {

const char* const kVlmControllabilityInstruction =
    "Give a single score from 0 to 10 regarding how well the image looks like a <s>. A higher score "
    "means the image generally looks similar to a <s>. Only return the score.";
const char* const kVlmAestheticsInstruction =
    "Give a single score from 0 to 10 regarding how well this image looks. A higher score means the "
    "image generally looks more natural and has fewer artifacts. Only return the score.";

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ConfigError("cosine: dimension mismatch");
    double dot = 0, na = 0, nb = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw ConfigError("cosine: zero-norm embedding");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<double> symmetric_eigenvalues(Matrix a) {
    if (a.rows != a.cols) throw ConfigError("eigenvalues: matrix must be square");
    const int n = a.rows;
    if (n == 0) return {};
    // cyclic Jacobi sweeps
    for (int sweep = 0; sweep < 128; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a.at(p, q) * a.at(p, q);
        if (off < 1e-30) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double apq = a.at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                double app = a.at(p, p), aqq = a.at(q, q);
                double theta = (aqq - app) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a.at(k, p), akq = a.at(k, q);
                    a.at(k, p) = c * akp - s * akq;
                    a.at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a.at(p, k), aqk = a.at(q, k);
                    a.at(p, k) = c * apk - s * aqk;
                    a.at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (int i = 0; i < n; ++i) eig[i] = a.at(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

Matrix image_prompt_kernel(std::span<const Image> images, std::span<const std::string> prompts,
                           const Embedder& embedder) {
    if (images.size() != prompts.size()) throw ConfigError("kernel: image/prompt counts differ");
    const int m = static_cast<int>(images.size());
    std::vector<std::vector<double>> v(m), e(m);
    for (int i = 0; i < m; ++i) v[i] = embedder.embed_image(images[i]);
    for (int j = 0; j < m; ++j) e[j] = embedder.embed_text(prompts[j]);
    Matrix k(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) k.at(i, j) = cosine_similarity(v[i], e[j]);
    return k;
}

double independence_from_kernel(const Matrix& kernel, double temperature) {
    if (kernel.rows != kernel.cols) throw ConfigError("independence: kernel must be square");
    const int m = kernel.rows;
    if (m < 2) throw ConfigError("independence: needs at least two image/prompt pairs");
    if (!(temperature > 0)) throw ConfigError("independence: temperature must be > 0");

    double min_diag = std::numeric_limits<double>::infinity();
    // column softmax: over images i for a fixed prompt j (dimension 0)
    for (int j = 0; j < m; ++j) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) mx = std::max(mx, kernel.at(i, j) / temperature);
        double denom = 0.0;
        for (int i = 0; i < m; ++i) denom += std::exp(kernel.at(i, j) / temperature - mx);
        double diag = std::exp(kernel.at(j, j) / temperature - mx) / denom;
        min_diag = std::min(min_diag, diag);
    }
    // row softmax: over prompts j for a fixed image i (dimension 1)
    for (int i = 0; i < m; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < m; ++j) mx = std::max(mx, kernel.at(i, j) / temperature);
        double denom = 0.0;
        for (int j = 0; j < m; ++j) denom += std::exp(kernel.at(i, j) / temperature - mx);
        double diag = std::exp(kernel.at(i, i) / temperature - mx) / denom;
        min_diag = std::min(min_diag, diag);
    }
    return min_diag;
}

double independence_score(std::span<const Image> images, std::span<const std::string> prompts,
                          const Embedder& embedder, double temperature) {
    return independence_from_kernel(image_prompt_kernel(images, prompts, embedder), temperature);
}

double vendi_score(std::span<const std::vector<double>> embeddings) {
    const int n = static_cast<int>(embeddings.size());
    if (n < 1) throw ConfigError("vendi: needs at least one embedding");
    std::vector<std::vector<double>> unit(n);
    for (int i = 0; i < n; ++i) {
        double norm = 0;
        for (double x : embeddings[i]) norm += x * x;
        if (norm == 0.0) throw ConfigError("vendi: zero embedding");
        norm = std::sqrt(norm);
        unit[i].resize(embeddings[i].size());
        for (size_t d = 0; d < embeddings[i].size(); ++d) unit[i][d] = embeddings[i][d] / norm;
        if (unit[i].size() != unit[0].size()) throw ConfigError("vendi: dimension mismatch");
    }
    Matrix k(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double dot = 0;
            for (size_t d = 0; d < unit[i].size(); ++d) dot += unit[i][d] * unit[j][d];
            k.at(i, j) = dot / n;
            k.at(j, i) = dot / n;
        }
    }
    auto eig = symmetric_eigenvalues(std::move(k));
    double entropy = 0.0;
    for (double lambda : eig) {
        if (lambda > 0) entropy -= lambda * std::log(lambda);  // 0 ln 0 := 0
    }
    return std::exp(entropy);
}

double vendi_score_of_images(std::span<const Image> images, const Embedder& embedder) {
    std::vector<std::vector<double>> emb;
    emb.reserve(images.size());
    for (const auto& img : images) emb.push_back(embedder.embed_image(img));
    return vendi_score(emb);
}

std::vector<double> controllability(std::span<const Image> images, std::span<const std::string> prompts,
                                    const Embedder& embedder) {
    if (images.size() != prompts.size()) throw ConfigError("controllability: image/prompt counts differ");
    std::vector<double> out(images.size());
    for (size_t i = 0; i < images.size(); ++i) {
        out[i] = cosine_similarity(embedder.embed_image(images[i]), embedder.embed_text(prompts[i]));
    }
    return out;
}

std::vector<double> aesthetics(std::span<const Image> images, const AestheticsPredictor* predictor) {
    if (predictor == nullptr) {
        throw BackendError("aesthetics predictor unavailable: no plug-in configured");
    }
    std::vector<double> out(images.size());
    for (size_t i = 0; i < images.size(); ++i) {
        out[i] = std::clamp(predictor->score(images[i]), 0.0, 10.0);
    }
    return out;
}

}  // namespace illusion::eval
