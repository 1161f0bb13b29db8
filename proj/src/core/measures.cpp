#include "core/measures.hpp"

#include "core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace degreescope::measures {

SmoothedDistribution smooth(std::span<const uint64_t> counts, double alpha) {
    if (!(alpha > 0.0))
        throw config_error("smoothing alpha must be > 0, got " +
                           std::to_string(alpha));
    if (counts.size() < 2)
        throw config_error("smoothing needs a support of at least 2 cells");

    KahanSum total;
    for (uint64_t c : counts) total.add(static_cast<double>(c));
    const double denom = total.value() + alpha * static_cast<double>(counts.size());

    std::vector<double> probs(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        probs[i] = (static_cast<double>(counts[i]) + alpha) / denom;
    return SmoothedDistribution(std::move(probs), alpha);
}

double shannon_entropy(const SmoothedDistribution& p) {
    KahanSum h;
    for (double v : p.probs()) h.add(-v * std::log2(v));
    return h.value();
}

static void require_same_support(const SmoothedDistribution& p,
                                 const SmoothedDistribution& q) {
    if (p.support_size() != q.support_size())
        throw config_error("distribution support mismatch: " +
                           std::to_string(p.support_size()) + " vs " +
                           std::to_string(q.support_size()));
}

double kl_divergence(const SmoothedDistribution& p,
                     const SmoothedDistribution& q) {
    require_same_support(p, q);
    KahanSum d;
    for (std::size_t i = 0; i < p.support_size(); ++i)
        d.add(p[i] * std::log2(p[i] / q[i]));
    return d.value();
}

double js_divergence(const SmoothedDistribution& p,
                     const SmoothedDistribution& q) {
    require_same_support(p, q);
    // KL terms against the midpoint, accumulated directly; the mixture is not
    // itself a count-smoothed distribution so it never leaves this function.
    // Each cell's two halves are combined before accumulation so that
    // swapping the arguments reproduces the identical addition sequence and
    // js(p,q) == js(q,p) holds exactly.
    KahanSum d;
    for (std::size_t i = 0; i < p.support_size(); ++i) {
        const double m = 0.5 * (p[i] + q[i]);
        d.add(0.5 * p[i] * std::log2(p[i] / m) +
              0.5 * q[i] * std::log2(q[i] / m));
    }
    return d.value();
}

ZipfFit zipf_fit_points(std::span<const double> probs,
                        std::span<const std::size_t> cell_index) {
    if (probs.size() < 3)
        throw config_error("zipf fit needs at least 3 points, got " +
                           std::to_string(probs.size()));

    const std::size_t k = probs.size();
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    auto canonical = [&](std::size_t i) {
        return cell_index.empty() ? i : cell_index[i];
    };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (probs[a] != probs[b]) return probs[a] > probs[b];
        return canonical(a) < canonical(b);
    });

    // OLS of y = ln(prob) on x = ln(rank). Natural log: the slope is
    // base-invariant and the intercept is reported in ln units.
    std::vector<double> xs(k), ys(k);
    KahanSum sx, sy;
    for (std::size_t r = 0; r < k; ++r) {
        xs[r] = std::log(static_cast<double>(r + 1));
        ys[r] = std::log(probs[order[r]]);
        sx.add(xs[r]);
        sy.add(ys[r]);
    }
    const double mx = sx.value() / static_cast<double>(k);
    const double my = sy.value() / static_cast<double>(k);

    KahanSum sxx, sxy, syy;
    for (std::size_t r = 0; r < k; ++r) {
        const double dx = xs[r] - mx;
        const double dy = ys[r] - my;
        sxx.add(dx * dx);
        sxy.add(dx * dy);
        syy.add(dy * dy);
    }

    ZipfFit fit;
    fit.n_points = k;
    if (syy.value() == 0.0) {
        // All probabilities equal: slope 0, R^2 is 0/0 and stays undefined.
        fit.slope_alpha = 0.0;
        fit.intercept_logc = my;
        fit.r_squared = std::nullopt;
        return fit;
    }
    const double slope = sxy.value() / sxx.value();
    fit.slope_alpha = -slope;
    fit.intercept_logc = my - slope * mx;

    KahanSum ssres;
    for (std::size_t r = 0; r < k; ++r) {
        const double resid = ys[r] - (fit.intercept_logc + slope * xs[r]);
        ssres.add(resid * resid);
    }
    fit.r_squared = std::clamp(1.0 - ssres.value() / syy.value(), 0.0, 1.0);
    return fit;
}

ZipfFit zipf_fit(const SmoothedDistribution& p) {
    return zipf_fit_points(p.probs());
}

ZipfFit zipf_fit_raw(std::span<const uint64_t> counts,
                     std::span<const bool> exclude) {
    std::vector<double> kept;
    std::vector<std::size_t> cells;
    uint64_t total = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (!exclude.empty() && exclude[i]) continue;
        if (counts[i] == 0) continue;
        total += counts[i];
        cells.push_back(i);
    }
    if (total == 0 || cells.size() < 3)
        throw input_error("raw zipf fit needs at least 3 nonzero cells");
    kept.reserve(cells.size());
    for (std::size_t i : cells)
        kept.push_back(static_cast<double>(counts[i]) / static_cast<double>(total));
    return zipf_fit_points(kept, cells);
}

std::vector<double> fractional_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double mean_rank = 0.5 * (static_cast<double>(i + 1) +
                                        static_cast<double>(j + 1));
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

std::optional<double> pearson(std::span<const double> x,
                              std::span<const double> y) {
    if (x.size() != y.size())
        throw config_error("pearson: length mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw config_error("pearson: need at least 2 points");

    KahanSum sx, sy;
    for (std::size_t i = 0; i < n; ++i) {
        sx.add(x[i]);
        sy.add(y[i]);
    }
    const double mx = sx.value() / static_cast<double>(n);
    const double my = sy.value() / static_cast<double>(n);

    KahanSum sxx, syy, sxy;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx.add(dx * dx);
        syy.add(dy * dy);
        sxy.add(dx * dy);
    }
    if (sxx.value() == 0.0 || syy.value() == 0.0) return std::nullopt;
    return sxy.value() / std::sqrt(sxx.value() * syy.value());
}

std::optional<double> spearman_rho(std::span<const double> x,
                                   std::span<const double> y) {
    if (x.size() != y.size())
        throw config_error("spearman: length mismatch");
    if (x.size() < 2) throw config_error("spearman: need at least 2 points");
    const auto rx = fractional_ranks(x);
    const auto ry = fractional_ranks(y);
    return pearson(rx, ry);
}

std::optional<double> cosine_similarity(std::span<const double> u,
                                        std::span<const double> v) {
    if (u.size() != v.size())
        throw config_error("cosine: length mismatch");
    KahanSum dot, nu, nv;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot.add(u[i] * v[i]);
        nu.add(u[i] * u[i]);
        nv.add(v[i] * v[i]);
    }
    if (nu.value() == 0.0 || nv.value() == 0.0) return std::nullopt;
    return dot.value() / std::sqrt(nu.value() * nv.value());
}

// Continued-fraction evaluation of the regularized incomplete beta function
// (modified Lentz), standard form with even/odd coefficient pairs.
static double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                            std::lgamma(b) + a * std::log(x) +
                            b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double spearman_p_value(double rho, std::size_t n) {
    if (n < 3)
        throw config_error("p-value needs at least 3 observations, got " +
                           std::to_string(n));
    const double df = static_cast<double>(n - 2);
    const double denom = 1.0 - rho * rho;
    if (denom <= 0.0) return 0.0; // |rho| = 1: t diverges
    const double t = rho * std::sqrt(df / denom);
    // Two-sided p = I_{df/(df+t^2)}(df/2, 1/2).
    return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

} // namespace degreescope::measures
