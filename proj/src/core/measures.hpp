#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace degreescope::measures {

// Compensated (Kahan) accumulator. Probability vectors and log sums are
// accumulated through this to hold the 1e-12 tolerances on 225-term sums.
class KahanSum {
public:
    void add(double x) {
        const double y = x - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

// Additively smoothed categorical distribution:
//   p[k] = (n[k] + alpha) / (total + alpha*K)
// Strictly positive by construction. This is the only type the scalar
// measures accept, so nothing downstream can ever see a raw zero cell.
class SmoothedDistribution {
public:
    std::span<const double> probs() const { return probs_; }
    double alpha() const { return alpha_; }
    std::size_t support_size() const { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }

    friend SmoothedDistribution smooth(std::span<const uint64_t> counts,
                                       double alpha);

private:
    SmoothedDistribution(std::vector<double> probs, double alpha)
        : probs_(std::move(probs)), alpha_(alpha) {}

    std::vector<double> probs_;
    double alpha_;
};

// Throws config_error when alpha <= 0 or counts.size() < 2.
SmoothedDistribution smooth(std::span<const uint64_t> counts, double alpha);

// Shannon entropy in bits, -sum p log2 p.
double shannon_entropy(const SmoothedDistribution& p);

// KL divergence in bits, sum p log2(p/q). Throws config_error on support
// mismatch. Non-negative; exactly zero when p == q elementwise.
double kl_divergence(const SmoothedDistribution& p,
                     const SmoothedDistribution& q);

// Jensen-Shannon divergence in bits against the midpoint mixture.
// Symmetric, bounded in [0, 1].
double js_divergence(const SmoothedDistribution& p,
                     const SmoothedDistribution& q);

struct ZipfFit {
    double slope_alpha = 0.0;    // -slope of the log-log OLS fit
    double intercept_logc = 0.0; // natural-log intercept
    std::optional<double> r_squared; // nullopt when log-probs have no variance
    std::size_t n_points = 0;
};

// Rank-frequency power-law fit: probs sorted descending (ties broken by
// ascending cell index), y = ln(prob) regressed on x = ln(rank), ranks 1..K.
ZipfFit zipf_fit(const SmoothedDistribution& p);

// Same fit over an arbitrary positive probability vector. `cell_index`
// supplies the canonical tie-break index for each entry; pass an empty span
// to use positional order.
ZipfFit zipf_fit_points(std::span<const double> probs,
                        std::span<const std::size_t> cell_index = {});

// Raw-probability variant: zero-count cells excluded, remaining counts
// normalized. `exclude` marks cells to drop regardless of count.
ZipfFit zipf_fit_raw(std::span<const uint64_t> counts,
                     std::span<const bool> exclude = {});

// Spearman rank correlation with fractional (average) ranks for ties.
// nullopt when either side has zero rank variance. Throws config_error on
// length mismatch or n < 2.
std::optional<double> spearman_rho(std::span<const double> x,
                                   std::span<const double> y);

// Cosine similarity; nullopt for a zero vector. Throws config_error on
// length mismatch.
std::optional<double> cosine_similarity(std::span<const double> u,
                                        std::span<const double> v);

// Fractional ranks (1-based, ties averaged).
std::vector<double> fractional_ranks(std::span<const double> values);

// Pearson correlation; nullopt when either side has zero variance.
std::optional<double> pearson(std::span<const double> x,
                              std::span<const double> y);

// Two-sided p-value for a Spearman rho under the t-approximation
//   t = rho * sqrt((n-2) / (1 - rho^2)),  df = n - 2.
// Throws config_error when n < 3.
double spearman_p_value(double rho, std::size_t n);

// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

} // namespace degreescope::measures
