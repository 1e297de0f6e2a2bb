#ifndef FEXP_CEPSTRUM_HPP
#define FEXP_CEPSTRUM_HPP

#include <cmath>
#include <complex>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "fexp/fft.hpp"
#include "fexp/spectral.hpp"

namespace fexp {

/// Cepstral coefficients alpha-hat_j of log f-hat over the half-plane window,
/// plus alpha-hat_0.
struct CepstralField {
    HalfPlaneWindow window;
    double alpha0 = 0.0;
    std::vector<double> alphas;  ///< canonical half_plane_indices order
};

/// Canonical transfer function A-hat on the full box k1 = -M1+1..M1,
/// k2 = -M2+1..M2, Hermitian by construction.
struct TransferGrid {
    HalfPlaneWindow window;
    std::vector<cplx> values;  ///< torus storage, position (k1 mod 2M1, k2 mod 2M2)

    std::size_t slot(int k1, int k2) const {
        const int P1 = 2 * window.M1, P2 = 2 * window.M2;
        const int t1 = ((k1 % P1) + P1) % P1;
        const int t2 = ((k2 % P2) + P2) % P2;
        return static_cast<std::size_t>(t1) * P2 + t2;
    }
    cplx at(int k1, int k2) const { return values[slot(k1, k2)]; }
};

/// AR prediction coefficients a-hat_j over the window (a-hat_0 = 1 implicit).
struct ARField {
    HalfPlaneWindow window;
    std::vector<double> coeffs;  ///< canonical half_plane_indices order
};

/// Wold (MA) coefficients zeta-hat_j over the window (zeta-hat_0 = 1 implicit).
struct MAField {
    HalfPlaneWindow window;
    std::vector<double> coeffs;
};

/// Position of lag j in the canonical enumeration, or -1 if j is outside M.
inline std::ptrdiff_t window_position(const HalfPlaneWindow& w, Index2 j) {
    if (w.order == HalfPlaneOrder::ColLex) std::swap(j.i1, j.i2);
    if (j.i1 == 0) {
        if (j.i2 < 1 || j.i2 > w.M2) return -1;
        return j.i2 - 1;
    }
    if (j.i1 < 1 || j.i1 > w.M1 || j.i2 < 1 - w.M2 || j.i2 > w.M2) return -1;
    return w.M2 + static_cast<std::ptrdiff_t>(j.i1 - 1) * (2 * w.M2) + (j.i2 - (1 - w.M2));
}

namespace detail {

/// Natural torus grid for a window: P1 x P2 = (2 M1) x (2 M2).
struct Torus {
    int P1, P2;
    explicit Torus(const HalfPlaneWindow& w) : P1(2 * w.M1), P2(2 * w.M2) {}
    std::size_t size() const { return static_cast<std::size_t>(P1) * P2; }
    std::size_t pos(int k1, int k2) const {
        const int t1 = ((k1 % P1) + P1) % P1;
        const int t2 = ((k2 % P2) + P2) % P2;
        return static_cast<std::size_t>(t1) * P2 + t2;
    }
};

/// Sum over the half-plane window of alpha_j e^{-i j.lambda_k} for every k in
/// the box, via one forward DFT of the lag field placed on the torus.
inline std::vector<cplx> halfplane_exponential_sum(const CepstralField& c) {
    const Torus T(c.window);
    std::vector<cplx> a(T.size(), cplx(0.0, 0.0));
    const auto lags = half_plane_indices(HalfPlaneWindow(c.window.M1, c.window.M2));
    for (std::size_t i = 0; i < lags.size(); ++i) a[T.pos(lags[i].i1, lags[i].i2)] += c.alphas[i];
    dft2(a, static_cast<std::size_t>(T.P1), static_cast<std::size_t>(T.P2), -1);
    return a;
}

/// Enforce exact Hermitian symmetry G(-k) = conj(G(k)) on a torus grid.
inline void symmetrize_hermitian(std::vector<cplx>& g, const Torus& T) {
    for (int t1 = 0; t1 < T.P1; ++t1)
        for (int t2 = 0; t2 < T.P2; ++t2) {
            const int p1 = (T.P1 - t1) % T.P1;
            const int p2 = (T.P2 - t2) % T.P2;
            const std::size_t a = static_cast<std::size_t>(t1) * T.P2 + t2;
            const std::size_t b = static_cast<std::size_t>(p1) * T.P2 + p2;
            if (a < b)
                g[b] = std::conj(g[a]);
            else if (a == b)
                g[a] = cplx(g[a].real(), 0.0);
        }
}

}  // namespace detail

/// Cepstral coefficients as the discrete Fourier coefficients of log f-hat
/// over the full frequency box:
/// alpha-hat_j = (1/(4 M1 M2)) sum_{-M < k <= M} cos(j.tilde-lambda_k)
/// log f-hat_k, j in M and j = 0. The box cosines form an orthogonal family,
/// so a constant spectrum yields alpha-hat_0 = log c and exactly zero
/// elsewhere, and white noise f = sigma^2/(2 pi)^2 calibrates the innovation
/// variance exactly. (A one-sided half-plane sum is not orthogonal on this
/// grid: it leaks the log-scale constant into every (j1, 0) coefficient at
/// O(1/M1), which wrecks the estimator at practical window sizes.)
inline CepstralField cepstral_coeffs(const SpectralGrid& f, const HalfPlaneWindow& window) {
    if (window.M1 != f.M1() || window.M2 != f.M2())
        throw validation_error("cepstral_coeffs: window M does not match spectral grid M");
    const detail::Torus T(window);
    std::vector<cplx> v(T.size(), cplx(0.0, 0.0));
    for (int k1 = 1 - window.M1; k1 <= window.M1; ++k1)
        for (int k2 = 1 - window.M2; k2 <= window.M2; ++k2)
            v[T.pos(k1, k2)] = std::log(f.value(k1, k2));
    dft2(v, static_cast<std::size_t>(T.P1), static_cast<std::size_t>(T.P2), -1);
    const double norm = 1.0 / static_cast<double>(T.size());
    CepstralField c;
    c.window = window;
    c.alpha0 = norm * v[T.pos(0, 0)].real();
    const auto lags = half_plane_indices(HalfPlaneWindow(window.M1, window.M2));
    c.alphas.resize(lags.size());
    for (std::size_t i = 0; i < lags.size(); ++i)
        c.alphas[i] = norm * v[T.pos(lags[i].i1, lags[i].i2)].real();
    return c;
}

struct TransferOptions {
    double exponent_cap = 50.0;  ///< reject wildly non-invertible estimates
};

/// A-hat_k = exp{- sum^+_j alpha-hat_j e^{-i j.tilde-lambda_k}} on the box,
/// Hermitian symmetry enforced by construction.
inline TransferGrid transfer_grid(const CepstralField& c, const TransferOptions& opts = {}) {
    const detail::Torus T(c.window);
    std::vector<cplx> s = detail::halfplane_exponential_sum(c);
    for (const cplx& z : s)
        if (std::abs(z) > opts.exponent_cap)
            throw numerical_error("transfer_grid: cepstral exponent exceeds magnitude cap");
    TransferGrid A;
    A.window = c.window;
    A.values.resize(T.size());
    for (std::size_t i = 0; i < s.size(); ++i) A.values[i] = std::exp(-s[i]);
    detail::symmetrize_hermitian(A.values, T);
    return A;
}

namespace detail {

/// (1/(4 M1 M2)) sum_{-M < k <= M} G_k e^{+i j.tilde-lambda_k} for j in M;
/// checks and discards the imaginary residue.
inline std::vector<double> box_fourier_coeffs(const std::vector<cplx>& grid,
                                              const HalfPlaneWindow& window, const char* who,
                                              double imag_tol = 1e-9) {
    const Torus T(window);
    std::vector<cplx> g = grid;
    dft2(g, static_cast<std::size_t>(T.P1), static_cast<std::size_t>(T.P2), +1);
    const double norm = 1.0 / static_cast<double>(T.size());
    const auto lags = half_plane_indices(HalfPlaneWindow(window.M1, window.M2));
    std::vector<double> out(lags.size());
    for (std::size_t i = 0; i < lags.size(); ++i) {
        const cplx z = g[T.pos(lags[i].i1, lags[i].i2)] * norm;
        if (std::abs(z.imag()) > imag_tol)
            throw numerical_error(std::string(who) + ": imaginary residue exceeds tolerance (Hermitian symmetry violated)");
        out[i] = z.real();
    }
    return out;
}

}  // namespace detail

/// AR coefficients a-hat_j = Re (1/(4 M1 M2)) sum_{-M<k<=M} A-hat_k
/// e^{+i j.tilde-lambda_k}, j in M.
inline ARField ar_coeffs(const TransferGrid& A) {
    ARField f;
    f.window = A.window;
    f.coeffs = detail::box_fourier_coeffs(A.values, A.window, "ar_coeffs");
    return f;
}

/// MA (Wold) coefficients: same pipeline with B-hat_k = exp{+ sum^+ ...}.
inline MAField ma_coeffs(const CepstralField& c, const TransferOptions& opts = {}) {
    const detail::Torus T(c.window);
    std::vector<cplx> s = detail::halfplane_exponential_sum(c);
    for (const cplx& z : s)
        if (std::abs(z) > opts.exponent_cap)
            throw numerical_error("ma_coeffs: cepstral exponent exceeds magnitude cap");
    std::vector<cplx> B(T.size());
    for (std::size_t i = 0; i < s.size(); ++i) B[i] = std::exp(s[i]);
    detail::symmetrize_hermitian(B, T);
    MAField f;
    f.window = c.window;
    f.coeffs = detail::box_fourier_coeffs(B, c.window, "ma_coeffs");
    return f;
}

/// Innovation variance sigma-hat^2 = (2 pi)^2 exp(alpha-hat_0). The (2 pi)^2
/// constant matches the d = 2 normalization f = sigma^2 |Psi|^2 / (2 pi)^2:
/// a white-noise spectrum calibrates to sigma^2 exactly.
inline double innovation_variance(const CepstralField& c) {
    return kFourPiSq * std::exp(c.alpha0);
}

// ---------------------------------------------------------------------------
// Coefficient-field CSV: header "M1,M2,order"; for cepstral fields a
// "0,0,alpha0" row; then "j1,j2,value" rows in canonical enumeration order.
// ---------------------------------------------------------------------------

namespace detail {

inline void write_field_csv(std::ostream& os, const HalfPlaneWindow& w,
                            const std::vector<double>& coeffs, const double* alpha0) {
    os << w.M1 << "," << w.M2 << "," << to_string(w.order) << "\n";
    os.precision(17);
    if (alpha0) os << "0,0," << *alpha0 << "\n";
    const auto lags = half_plane_indices(w);
    for (std::size_t i = 0; i < lags.size(); ++i)
        os << lags[i].i1 << "," << lags[i].i2 << "," << coeffs[i] << "\n";
}

inline void read_field_csv(std::istream& is, HalfPlaneWindow& w, std::vector<double>& coeffs,
                           double* alpha0) {
    std::string line;
    if (!std::getline(is, line)) throw validation_error("coefficient CSV: missing header");
    int M1 = 0, M2 = 0;
    std::string ord;
    {
        std::istringstream hs(line);
        std::string tok;
        if (!std::getline(hs, tok, ',')) throw validation_error("coefficient CSV: bad header");
        M1 = std::stoi(tok);
        if (!std::getline(hs, tok, ',')) throw validation_error("coefficient CSV: bad header");
        M2 = std::stoi(tok);
        if (!std::getline(hs, ord, ',')) throw validation_error("coefficient CSV: bad header");
    }
    w = HalfPlaneWindow(M1, M2, order_from_string(ord));
    const auto lags = half_plane_indices(w);
    coeffs.assign(lags.size(), 0.0);
    std::size_t next = 0;
    bool have_alpha0 = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        int j1 = 0, j2 = 0;
        double v = 0.0;
        char c1 = 0, c2 = 0;
        if (!(ls >> j1 >> c1 >> j2 >> c2 >> v)) throw validation_error("coefficient CSV: bad row");
        if (j1 == 0 && j2 == 0) {
            if (!alpha0) throw validation_error("coefficient CSV: unexpected 0,0 row");
            *alpha0 = v;
            have_alpha0 = true;
            continue;
        }
        if (next >= lags.size() || !(lags[next] == Index2{j1, j2}))
            throw validation_error("coefficient CSV: rows must follow the canonical enumeration");
        coeffs[next++] = v;
    }
    if (next != lags.size()) throw validation_error("coefficient CSV: wrong number of rows");
    if (alpha0 && !have_alpha0) throw validation_error("coefficient CSV: missing 0,0 alpha0 row");
}

}  // namespace detail

inline void write_cepstral_csv(std::ostream& os, const CepstralField& c) {
    detail::write_field_csv(os, c.window, c.alphas, &c.alpha0);
}
inline CepstralField read_cepstral_csv(std::istream& is) {
    CepstralField c;
    detail::read_field_csv(is, c.window, c.alphas, &c.alpha0);
    return c;
}
inline void write_ar_csv(std::ostream& os, const ARField& f) {
    detail::write_field_csv(os, f.window, f.coeffs, nullptr);
}
inline ARField read_ar_csv(std::istream& is) {
    ARField f;
    detail::read_field_csv(is, f.window, f.coeffs, nullptr);
    return f;
}
inline void write_ma_csv(std::ostream& os, const MAField& f) {
    detail::write_field_csv(os, f.window, f.coeffs, nullptr);
}
inline MAField read_ma_csv(std::istream& is) {
    MAField f;
    detail::read_field_csv(is, f.window, f.coeffs, nullptr);
    return f;
}

}  // namespace fexp

#endif  // FEXP_CEPSTRUM_HPP
