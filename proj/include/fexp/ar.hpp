#ifndef FEXP_AR_HPP
#define FEXP_AR_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "fexp/predictor.hpp"
#include "fexp/spectral.hpp"

namespace fexp {

/// Truncated-autoregression window: the support S[-p_L, p_U] is the box
/// {-p_L <= k <= p_U} intersected with the RowLex prediction half-plane
/// (so the leading-coordinate lower order p_L1 never contributes).
struct ARWindow {
    int pL1 = 0;
    int pU1 = 0;
    int pL2 = 0;
    int pU2 = 0;

    ARWindow() = default;
    ARWindow(int l1, int u1, int l2, int u2) : pL1(l1), pU1(u1), pL2(l2), pU2(u2) {
        if (pL1 < 0 || pU1 < 0 || pL2 < 0 || pU2 < 0)
            throw validation_error("ARWindow: orders must be nonnegative");
        if (pU1 == 0 && pU2 == 0)
            throw validation_error("ARWindow: support is empty (pU1 = pU2 = 0)");
    }

    int p1() const { return pL1 + pU1; }
    int p2() const { return pL2 + pU2; }

    /// Deterministic enumeration of S: the (0, k2) block then k1-major rows.
    std::vector<Index2> support() const {
        std::vector<Index2> s;
        for (int k2 = 1; k2 <= pU2; ++k2) s.push_back(Index2{0, k2});
        for (int k1 = 1; k1 <= pU1; ++k1)
            for (int k2 = -pL2; k2 <= pU2; ++k2) s.push_back(Index2{k1, k2});
        return s;
    }

    /// Cardinality of S by direct enumeration.
    std::int64_t cardinality() const { return static_cast<std::int64_t>(support().size()); }

    friend bool operator==(const ARWindow&, const ARWindow&) = default;
};

/// Least-squares fit of the truncated half-plane autoregression.
struct ARFit {
    ARWindow window;
    std::vector<double> coeffs;  ///< d-check_p(k), in window.support() order
    double sigma2 = 0.0;         ///< attained minimum of the LS objective
    std::int64_t n_p = 0;        ///< effective sample count of the estimation region
};

namespace detail {

/// Gaussian elimination with partial pivoting; throws on (near-)singular
/// systems. Small dense systems only (the window cardinality is tiny).
inline std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) throw numerical_error("ls_fit: singular normal equations (zero field)");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        if (std::abs(a[piv * n + col]) <= 1e-12 * scale)
            throw numerical_error("ls_fit: singular normal equations");
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
            std::swap(b[piv], b[col]);
        }
        const double inv = 1.0 / a[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] * inv;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t ri = n; ri-- > 0;) {
        double acc = b[ri];
        for (std::size_t c = ri + 1; c < n; ++c) acc -= a[ri * n + c] * x[c];
        x[ri] = acc / a[ri * n + ri];
    }
    return x;
}

struct Region {
    int r1, r2, c1, c2;
    std::int64_t count() const {
        return static_cast<std::int64_t>(r2 - r1 + 1) * (c2 - c1 + 1);
    }
};

/// All j such that x_j and every lag x_{j-k}, k in S, lie inside the lattice.
/// Its cardinality equals prod(n[l] - p_l) whenever pL1 = 0.
inline Region estimation_region(const GridDims& d, const ARWindow& w) {
    const Region reg{1 + w.pU1, d.n1, 1 + w.pU2, d.n2 - w.pL2};
    if (reg.r1 > reg.r2 || reg.c1 > reg.c2)
        throw validation_error("ls_fit: lattice too small for the window (need n[l] > p_l)");
    return reg;
}

}  // namespace detail

/// Least-squares autoregression over an explicit estimation region
/// (rows reg.r1..r2, cols reg.c1..c2 of predicted cells). Exposed so nested
/// windows can be compared on a common region.
inline ARFit ls_fit_region(const Lattice2D& x, const ARWindow& w, const detail::Region& reg) {
    const auto support = w.support();
    const std::size_t h = support.size();
    for (int j1 = reg.r1 - w.pU1; j1 <= reg.r2; ++j1)
        for (int j2 = reg.c1 - w.pU2; j2 <= reg.c2 + w.pL2; ++j2)
            if (!x.observed(j1, j2))
                throw validation_error("ls_fit: estimation region contains unobserved cells");
    std::vector<double> gram(h * h, 0.0);
    std::vector<double> rhs(h, 0.0);
    std::vector<double> lagvals(h);
    for (int j1 = reg.r1; j1 <= reg.r2; ++j1)
        for (int j2 = reg.c1; j2 <= reg.c2; ++j2) {
            for (std::size_t a = 0; a < h; ++a)
                lagvals[a] = x.at(j1 - support[a].i1, j2 - support[a].i2);
            const double xj = x.at(j1, j2);
            for (std::size_t a = 0; a < h; ++a) {
                rhs[a] += xj * lagvals[a];
                for (std::size_t b = a; b < h; ++b) gram[a * h + b] += lagvals[a] * lagvals[b];
            }
        }
    for (std::size_t a = 0; a < h; ++a)
        for (std::size_t b = 0; b < a; ++b) gram[a * h + b] = gram[b * h + a];
    ARFit fit;
    fit.window = w;
    fit.coeffs = detail::solve_dense(gram, rhs);
    fit.n_p = reg.count();
    double rss = 0.0;
    for (int j1 = reg.r1; j1 <= reg.r2; ++j1)
        for (int j2 = reg.c1; j2 <= reg.c2; ++j2) {
            double pred = 0.0;
            for (std::size_t a = 0; a < h; ++a)
                pred += fit.coeffs[a] * x.at(j1 - support[a].i1, j2 - support[a].i2);
            const double e = x.at(j1, j2) - pred;
            rss += e * e;
        }
    fit.sigma2 = rss / static_cast<double>(fit.n_p);
    return fit;
}

/// Least-squares fit over the maximal fully-lagged region of the lattice.
inline ARFit ls_fit(const Lattice2D& x, const ARWindow& w) {
    return ls_fit_region(x, w, detail::estimation_region(x.dims(), w));
}

/// Feasible one-step AR prediction x-check_s = sum_{k in S} d-check(k)
/// x-check_{s-k}, recursive/zero conventions shared with the flexible
/// exponential predictor.
inline PredictionResult ar_predict(const Lattice2D& x, const ARFit& fit, const Index2& s,
                                   const PredictionOptions& opts = {}) {
    const auto lags = fit.window.support();
    return detail::predict_rowframe(x, lags, fit.coeffs, s, fit.window.pU2, opts);
}

/// Autoregressive nonparametric spectrum estimate
/// f-check(lambda) = sigma2 / ((2 pi)^2 |1 - sum_k d(k) e^{i k.lambda}|^2).
inline double ar_spectrum(const ARFit& fit, const Freq2& lambda) {
    const auto support = fit.window.support();
    cplx transfer(1.0, 0.0);
    for (std::size_t a = 0; a < support.size(); ++a) {
        const double ang = support[a].i1 * lambda.l1 + support[a].i2 * lambda.l2;
        transfer -= fit.coeffs[a] * cplx(std::cos(ang), std::sin(ang));
    }
    const double denom = std::norm(transfer);
    if (!(denom > 1e-300))
        throw numerical_error("ar_spectrum: pole (non-invertible fit) at the requested frequency");
    return fit.sigma2 / (kFourPiSq * denom);
}

/// f-check evaluated on the coarse frequency grid, interchangeable with
/// smoothed_spectrum output for the cepstral pipeline.
inline SpectralGrid ar_spectrum_grid(const ARFit& fit, const SmoothingBandwidth& bw,
                                     double floor = 1e-12) {
    SpectralGrid g;
    g.bandwidth = bw;
    g.floor_used = floor;
    const int M1 = bw.M1(), M2 = bw.M2();
    g.values.assign(static_cast<std::size_t>(M1 + 1) * (2 * M2), 0.0);
    for (int k1 = 0; k1 <= M1; ++k1)
        for (int k2 = 1 - M2; k2 <= M2; ++k2)
            g.values[g.slot(k1, k2)] = std::max(ar_spectrum(fit, g.freq(k1, k2)), floor);
    return g;
}

// ---------------------------------------------------------------------------
// Order selection
// ---------------------------------------------------------------------------

enum class OrderCriterion { BIC, FPE };

inline OrderCriterion criterion_from_string(const std::string& s) {
    if (s == "bic") return OrderCriterion::BIC;
    if (s == "fpe") return OrderCriterion::FPE;
    throw validation_error("unknown criterion '" + s + "' (expected bic|fpe)");
}

struct OrderSelectRow {
    ARWindow window;
    std::int64_t h = 0;
    std::int64_t n_p = 0;
    double sigma2 = 0.0;
    double bic = 0.0;
    double fpe = 0.0;
};

struct OrderSelectResult {
    std::size_t chosen_index = 0;
    std::vector<OrderSelectRow> table;
};

/// Evaluates BIC = log sigma2 + h log(n_p)/n_p and FPE = sigma2 (n_p + h) /
/// (n_p - h) for each candidate, and picks the candidate immediately before
/// the first increase of the requested criterion (the last one when the
/// criterion never increases).
inline OrderSelectResult order_select(const Lattice2D& x, const std::vector<ARWindow>& candidates,
                                      OrderCriterion crit) {
    if (candidates.empty()) throw validation_error("order_select: empty candidate list");
    OrderSelectResult res;
    res.table.reserve(candidates.size());
    for (const ARWindow& w : candidates) {
        const ARFit fit = ls_fit(x, w);
        OrderSelectRow row;
        row.window = w;
        row.h = w.cardinality();
        row.n_p = fit.n_p;
        row.sigma2 = fit.sigma2;
        const double np = static_cast<double>(fit.n_p);
        row.bic = std::log(std::max(fit.sigma2, 1e-300)) + row.h * std::log(np) / np;
        row.fpe = fit.n_p > row.h ? fit.sigma2 * (np + row.h) / (np - row.h)
                                  : std::numeric_limits<double>::infinity();
        res.table.push_back(row);
    }
    auto value = [&](std::size_t i) {
        return crit == OrderCriterion::BIC ? res.table[i].bic : res.table[i].fpe;
    };
    res.chosen_index = res.table.size() - 1;
    for (std::size_t i = 1; i < res.table.size(); ++i)
        if (value(i) > value(i - 1)) {
            res.chosen_index = i - 1;
            break;
        }
    return res;
}

}  // namespace fexp

#endif  // FEXP_AR_HPP
