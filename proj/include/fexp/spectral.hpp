#ifndef FEXP_SPECTRAL_HPP
#define FEXP_SPECTRAL_HPP

#include <cmath>
#include <complex>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include "fexp/fft.hpp"
#include "fexp/lattice.hpp"

namespace fexp {

/// Frequency pair (lambda[1], lambda[2]).
struct Freq2 {
    double l1 = 0.0;
    double l2 = 0.0;
};

/// Fourier frequency lambda_j = 2 pi j / n for integer index j.
inline double fourier_freq(int j, int n) { return kTwoPi * j / n; }

// ---------------------------------------------------------------------------
// Cosine-bell (Hanning) taper
// ---------------------------------------------------------------------------

/// h_t = (1/4) h_{t[1]} h_{t[2]} with marginal h_t = 1 - cos(2 pi t / n),
/// t = 1..n. The weights vanish on the t[l] = n[l] edges, suppressing the
/// two-dimensional edge effect in the periodogram.
struct TaperWeights {
    GridDims dims;
    std::vector<double> weights;  ///< row-major, t = (1,1)..(n1,n2)
    double sumsq = 0.0;           ///< sum of h_t^2

    double at(int t1, int t2) const {
        return weights[static_cast<std::size_t>(t1 - 1) * dims.n2 + (t2 - 1)];
    }
};

inline double cosine_bell_marginal(int t, int n) { return 1.0 - std::cos(kTwoPi * t / n); }

inline TaperWeights cosine_bell_taper(const GridDims& dims) {
    if (dims.n1 < 2 || dims.n2 < 2) throw validation_error("cosine_bell_taper: need n1, n2 >= 2");
    TaperWeights tw;
    tw.dims = dims;
    std::vector<double> h1(dims.n1), h2(dims.n2);
    for (int t = 1; t <= dims.n1; ++t) h1[t - 1] = cosine_bell_marginal(t, dims.n1);
    for (int t = 1; t <= dims.n2; ++t) h2[t - 1] = cosine_bell_marginal(t, dims.n2);
    tw.weights.resize(static_cast<std::size_t>(dims.size()));
    double ssq = 0.0;
    for (int r = 0; r < dims.n1; ++r)
        for (int c = 0; c < dims.n2; ++c) {
            const double h = 0.25 * h1[r] * h2[c];
            tw.weights[static_cast<std::size_t>(r) * dims.n2 + c] = h;
            ssq += h * h;
        }
    tw.sumsq = ssq;
    return tw;
}

// ---------------------------------------------------------------------------
// Tapered DFT and periodogram
// ---------------------------------------------------------------------------

namespace detail {
inline void require_fully_observed(const Lattice2D& x, const char* who) {
    if (!x.fully_observed())
        throw validation_error(std::string(who) + ": lattice has unobserved cells");
}
}  // namespace detail

/// Tapered DFT w^T(lambda) = (sum h^2)^{-1/2} sum_t h_t x_t e^{i t.lambda},
/// evaluated by direct summation (single-frequency queries).
inline cplx tapered_dft(const Lattice2D& x, const TaperWeights& taper, const Freq2& lambda) {
    detail::require_fully_observed(x, "tapered_dft");
    if (!(x.dims() == taper.dims)) throw validation_error("tapered_dft: taper dims mismatch");
    cplx acc(0.0, 0.0);
    for (int t1 = 1; t1 <= x.dims().n1; ++t1)
        for (int t2 = 1; t2 <= x.dims().n2; ++t2) {
            const double h = taper.at(t1, t2);
            if (h == 0.0) continue;
            const double ang = t1 * lambda.l1 + t2 * lambda.l2;
            acc += h * x.at(t1, t2) * cplx(std::cos(ang), std::sin(ang));
        }
    return acc / std::sqrt(taper.sumsq);
}

/// I^T(lambda) = |w^T(lambda)|^2 / (2 pi)^2.
inline double tapered_periodogram(const Lattice2D& x, const TaperWeights& taper, const Freq2& lambda) {
    const cplx w = tapered_dft(x, taper, lambda);
    return std::norm(w) / kFourPiSq;
}

/// Plain unit-normalized DFT n^{-1/2} sum_t x_t e^{i t.lambda} (h == 1),
/// direct summation.
inline cplx plain_dft(const Lattice2D& x, const Freq2& lambda) {
    detail::require_fully_observed(x, "plain_dft");
    cplx acc(0.0, 0.0);
    for (int t1 = 1; t1 <= x.dims().n1; ++t1)
        for (int t2 = 1; t2 <= x.dims().n2; ++t2) {
            const double ang = t1 * lambda.l1 + t2 * lambda.l2;
            acc += x.at(t1, t2) * cplx(std::cos(ang), std::sin(ang));
        }
    return acc / std::sqrt(static_cast<double>(x.dims().size()));
}

/// Three-term identity for the cosine-bell taper: the tapered DFT at Fourier
/// index j equals (1/6) prod_l [-w(lambda_{j_l - 1}) + 2 w(lambda_{j_l})
/// - w(lambda_{j_l + 1})] built from plain DFT ordinates. Expanded over the
/// 3 x 3 neighbor stencil; serves as a cross-check of tapered_dft.
inline cplx taper_dft_identity(const Lattice2D& x, const Index2& j) {
    static constexpr double coef[3] = {-1.0, 2.0, -1.0};
    cplx acc(0.0, 0.0);
    for (int d1 = -1; d1 <= 1; ++d1)
        for (int d2 = -1; d2 <= 1; ++d2) {
            const Freq2 lam{fourier_freq(j.i1 + d1, x.dims().n1), fourier_freq(j.i2 + d2, x.dims().n2)};
            acc += coef[d1 + 1] * coef[d2 + 1] * plain_dft(x, lam);
        }
    return acc / 6.0;
}

// ---------------------------------------------------------------------------
// Smoothing bandwidth and the coarse frequency grid
// ---------------------------------------------------------------------------

/// Bandwidth m = (m1, m2) attached to (even) lattice dims, with the derived
/// coarse-grid extents M[l] = (n[l]/2) / m[l]. Requires m[l] to divide n[l]/2
/// so that n[l] = 2 M[l] m[l] exactly.
struct SmoothingBandwidth {
    GridDims dims;
    int m1 = 1;
    int m2 = 1;

    SmoothingBandwidth() : dims(2, 2) {}
    SmoothingBandwidth(GridDims d, int mm1, int mm2) : dims(d), m1(mm1), m2(mm2) {
        if (!dims.even())
            throw validation_error("SmoothingBandwidth: lattice dims must be even for spectral use");
        if (m1 < 1 || m2 < 1) throw validation_error("SmoothingBandwidth: m must be >= 1");
        if ((dims.n1 / 2) % m1 != 0 || (dims.n2 / 2) % m2 != 0)
            throw validation_error("SmoothingBandwidth: m[l] must divide n[l]/2");
    }

    int M1() const { return dims.n1 / 2 / m1; }
    int M2() const { return dims.n2 / 2 / m2; }

    /// Condition C4 guidance n^3/m^4 -> 0 suggests m[l] >= n[l]^{3/4};
    /// returns false when a coordinate is below that so callers can warn.
    bool c4_guidance_met() const {
        return m1 >= std::pow(static_cast<double>(dims.n1), 0.75) - 1e-9 &&
               m2 >= std::pow(static_cast<double>(dims.n2), 0.75) - 1e-9;
    }

    friend bool operator==(const SmoothingBandwidth&, const SmoothingBandwidth&) = default;
};

/// Smoothed spectral estimate f-hat on the coarse grid tilde-lambda_k,
/// k1 = 0..M1, k2 = 1-M2..M2; values are floored at a small positive
/// constant so logarithms stay finite downstream.
struct SpectralGrid {
    SmoothingBandwidth bandwidth;
    std::vector<double> values;  ///< row-major over (k1, k2), k2 fastest
    double floor_used = 1e-12;

    int M1() const { return bandwidth.M1(); }
    int M2() const { return bandwidth.M2(); }

    std::size_t slot(int k1, int k2) const {
        return static_cast<std::size_t>(k1) * (2 * M2()) + static_cast<std::size_t>(k2 + M2() - 1);
    }

    /// Value at coarse index k, any integers: wraps by the 2 pi periodicity
    /// (index mod 2M) and uses evenness f(-k) = f(k) for negative k1.
    double value(int k1, int k2) const {
        const int P1 = 2 * M1(), P2 = 2 * M2();
        auto wrap = [](int k, int p) {
            int r = k % p;
            if (r > p / 2) r -= p;
            if (r <= -p / 2) r += p;
            return r;  // in (-p/2, p/2]
        };
        k1 = wrap(k1, P1);
        k2 = wrap(k2, P2);
        if (k1 < 0) {
            k1 = -k1;
            k2 = wrap(-k2, P2);
        }
        return values[slot(k1, k2)];
    }

    Freq2 freq(int k1, int k2) const { return Freq2{kPi * k1 / M1(), kPi * k2 / M2()}; }
};

struct SpectralOptions {
    bool demean = true;       ///< subtract the plain sample mean before transforming
    double floor = 1e-12;     ///< positivity floor applied to f-hat
};

namespace detail {

/// |w^T|^2 / (2 pi)^2 at every Fourier index (j1, j2), j = 0..n-1, via FFT
/// of the tapered data. Deterministic row-column evaluation.
inline std::vector<double> tapered_periodogram_grid(const Lattice2D& x, const TaperWeights& taper,
                                                    bool demean) {
    require_fully_observed(x, "smoothed_spectrum");
    const int n1 = x.dims().n1, n2 = x.dims().n2;
    double mean = 0.0;
    if (demean) {
        for (double v : x.values()) mean += v;
        mean /= static_cast<double>(x.dims().size());
    }
    std::vector<cplx> g(static_cast<std::size_t>(x.dims().size()));
    for (int r = 0; r < n1; ++r)
        for (int c = 0; c < n2; ++c)
            g[static_cast<std::size_t>(r) * n2 + c] =
                taper.weights[static_cast<std::size_t>(r) * n2 + c] * (x.at(r + 1, c + 1) - mean);
    // sum_t g_t e^{+i t.lambda_j} = e^{i(lambda_j1 + lambda_j2)} * DFT^+[g]
    dft2(g, static_cast<std::size_t>(n1), static_cast<std::size_t>(n2), +1);
    std::vector<double> out(g.size());
    const double scale = 1.0 / (taper.sumsq * kFourPiSq);
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = std::norm(g[i]) * scale;
    return out;
}

}  // namespace detail

/// Average tapered periodogram: f-hat(tilde-lambda_k) = (1/(4 m1 m2)) sum
/// over the 2m1 x 2m2 offset box (-m < l <= m) of I^T(tilde-lambda_k +
/// lambda_l), with out-of-domain ordinates wrapped by periodicity. The
/// (0, k2 < 0) entries are mirrored from (0, -k2) so the stored grid is
/// exactly even, matching the symmetry the cepstral transform relies on.
inline SpectralGrid smoothed_spectrum(const Lattice2D& x, const SmoothingBandwidth& bw,
                                      const SpectralOptions& opts = {}) {
    if (!(x.dims() == bw.dims)) throw validation_error("smoothed_spectrum: bandwidth dims mismatch");
    const TaperWeights taper = cosine_bell_taper(x.dims());
    const std::vector<double> iper = detail::tapered_periodogram_grid(x, taper, opts.demean);
    const int n1 = x.dims().n1, n2 = x.dims().n2;
    const int M1 = bw.M1(), M2 = bw.M2();
    SpectralGrid grid;
    grid.bandwidth = bw;
    grid.floor_used = opts.floor;
    grid.values.assign(static_cast<std::size_t>(M1 + 1) * (2 * M2), 0.0);
    const double inv = 1.0 / (4.0 * bw.m1 * bw.m2);
    auto mod = [](int a, int n) {
        int r = a % n;
        return r < 0 ? r + n : r;
    };
    for (int k1 = 0; k1 <= M1; ++k1)
        for (int k2 = 1 - M2; k2 <= M2; ++k2) {
            double acc = 0.0;
            for (int l1 = 1 - bw.m1; l1 <= bw.m1; ++l1)
                for (int l2 = 1 - bw.m2; l2 <= bw.m2; ++l2) {
                    const int j1 = mod(bw.m1 * k1 + l1, n1);
                    const int j2 = mod(bw.m2 * k2 + l2, n2);
                    acc += iper[static_cast<std::size_t>(j1) * n2 + j2];
                }
            grid.values[grid.slot(k1, k2)] = std::max(acc * inv, opts.floor);
        }
    for (int k2 = 1 - M2; k2 <= -1; ++k2)
        grid.values[grid.slot(0, k2)] = grid.values[grid.slot(0, -k2)];
    return grid;
}

// ---------------------------------------------------------------------------
// SpectralGrid CSV: header "m1,m2,M1,M2", then rows "k1,k2,value".
// ---------------------------------------------------------------------------

inline void write_spectral_csv(std::ostream& os, const SpectralGrid& g) {
    os << g.bandwidth.m1 << "," << g.bandwidth.m2 << "," << g.M1() << "," << g.M2() << "\n";
    os.precision(17);
    for (int k1 = 0; k1 <= g.M1(); ++k1)
        for (int k2 = 1 - g.M2(); k2 <= g.M2(); ++k2)
            os << k1 << "," << k2 << "," << g.values[g.slot(k1, k2)] << "\n";
}

inline SpectralGrid read_spectral_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw validation_error("spectral CSV: missing header");
    int m1 = 0, m2 = 0, M1 = 0, M2 = 0;
    {
        std::istringstream hs(line);
        char c1 = 0, c2 = 0, c3 = 0;
        if (!(hs >> m1 >> c1 >> m2 >> c2 >> M1 >> c3 >> M2))
            throw validation_error("spectral CSV: header must be m1,m2,M1,M2");
    }
    SpectralGrid g;
    g.bandwidth = SmoothingBandwidth(GridDims(2 * M1 * m1, 2 * M2 * m2), m1, m2);
    g.values.assign(static_cast<std::size_t>(M1 + 1) * (2 * M2), 0.0);
    double minv = std::numeric_limits<double>::infinity();
    std::size_t nrows = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        int k1 = 0, k2 = 0;
        double v = 0.0;
        char c1 = 0, c2 = 0;
        if (!(ls >> k1 >> c1 >> k2 >> c2 >> v)) throw validation_error("spectral CSV: bad row");
        if (k1 < 0 || k1 > M1 || k2 < 1 - M2 || k2 > M2)
            throw validation_error("spectral CSV: index out of range");
        if (!std::isfinite(v) || v <= 0.0)
            throw validation_error("spectral CSV: values must be positive and finite");
        g.values[g.slot(k1, k2)] = v;
        minv = std::min(minv, v);
        ++nrows;
    }
    if (nrows != g.values.size()) throw validation_error("spectral CSV: wrong number of rows");
    g.floor_used = std::min(minv, 1e-12);
    return g;
}

}  // namespace fexp

#endif  // FEXP_SPECTRAL_HPP
