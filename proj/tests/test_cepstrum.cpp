#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "fexp/cepstrum.hpp"
#include "fexp/mc.hpp"
#include "fexp/rng.hpp"

using namespace fexp;

namespace {

SpectralGrid constant_grid(GridDims dims, int m1, int m2, double value) {
    SpectralGrid g;
    g.bandwidth = SmoothingBandwidth(dims, m1, m2);
    g.floor_used = 1e-12;
    g.values.assign(static_cast<std::size_t>(g.M1() + 1) * (2 * g.M2()), value);
    return g;
}

// Direct-summation oracle of the full-box cosine transform.
double cepstral_oracle(const SpectralGrid& f, const Index2& j) {
    const int M1 = f.M1(), M2 = f.M2();
    double acc = 0.0;
    for (int k1 = 1 - M1; k1 <= M1; ++k1)
        for (int k2 = 1 - M2; k2 <= M2; ++k2)
            acc += std::cos(j.i1 * kPi * k1 / M1 + j.i2 * kPi * k2 / M2) * std::log(f.value(k1, k2));
    return acc / (4.0 * M1 * M2);
}

double coeff_at(const HalfPlaneWindow& w, const std::vector<double>& coeffs, Index2 j) {
    const auto pos = window_position(w, j);
    REQUIRE(pos >= 0);
    return coeffs[static_cast<std::size_t>(pos)];
}

}  // namespace

TEST_CASE("cepstral coefficients of a constant spectrum") {
    const double c = 3.7;
    const SpectralGrid f = constant_grid(GridDims(8, 8), 2, 2, c);
    const CepstralField cf = cepstral_coeffs(f, HalfPlaneWindow(2, 2));
    CHECK(cf.alpha0 == Catch::Approx(std::log(c)).margin(1e-12));
    for (double a : cf.alphas) CHECK(std::abs(a) < 1e-12);

    // f == 1: everything vanishes including alpha0
    const SpectralGrid one = constant_grid(GridDims(8, 8), 2, 2, 1.0);
    const CepstralField cf1 = cepstral_coeffs(one, HalfPlaneWindow(2, 2));
    CHECK(std::abs(cf1.alpha0) < 1e-14);
    for (double a : cf1.alphas) CHECK(std::abs(a) < 1e-14);

    CHECK_THROWS_AS(cepstral_coeffs(f, HalfPlaneWindow(3, 2)), validation_error);
}

TEST_CASE("cepstral coefficients equal the direct-summation oracle on a rough grid") {
    SpectralGrid f = constant_grid(GridDims(12, 8), 2, 2, 1.0);
    Xoshiro256pp rng(4);
    for (int k1 = 0; k1 <= f.M1(); ++k1)
        for (int k2 = 1 - f.M2(); k2 <= f.M2(); ++k2)
            f.values[f.slot(k1, k2)] = 0.2 + rng.uniform01();
    for (int k2 = 1; k2 < f.M2(); ++k2) f.values[f.slot(0, -k2)] = f.values[f.slot(0, k2)];

    const HalfPlaneWindow w(f.M1(), f.M2());
    const CepstralField cf = cepstral_coeffs(f, w);
    CHECK(cf.alpha0 == Catch::Approx(cepstral_oracle(f, Index2{0, 0})).margin(1e-12));
    const auto lags = half_plane_indices(w);
    for (std::size_t i = 0; i < lags.size(); ++i)
        CHECK(cf.alphas[i] == Catch::Approx(cepstral_oracle(f, lags[i])).margin(1e-12));
}

TEST_CASE("transfer grid basics") {
    // all alphas zero -> A == 1 everywhere
    CepstralField c;
    c.window = HalfPlaneWindow(2, 3);
    c.alpha0 = 0.4;
    c.alphas.assign(static_cast<std::size_t>(c.window.size()), 0.0);
    const TransferGrid A = transfer_grid(c);
    for (const cplx& v : A.values) CHECK(std::abs(v - cplx(1.0, 0.0)) < 1e-14);

    // single alpha_(0,1) = a: A_k = exp(-a e^{-i lambda_k2}); at k2 = 0, exp(-a)
    CepstralField c1 = c;
    const double a = 0.3;
    c1.alphas[window_position(c1.window, Index2{0, 1})] = a;
    const TransferGrid A1 = transfer_grid(c1);
    CHECK(std::abs(A1.at(1, 0) - std::exp(-a)) < 1e-14);
    for (int k1 = 1 - 2; k1 <= 2; ++k1)
        for (int k2 = 1 - 3; k2 <= 3; ++k2) {
            const double lam2 = kPi * k2 / 3.0;
            const cplx want = std::exp(-a * cplx(std::cos(lam2), -std::sin(lam2)));
            CHECK(std::abs(A1.at(k1, k2) - want) < 1e-13);
        }

    // Hermitian symmetry by construction
    for (int k1 = -1; k1 <= 2; ++k1)
        for (int k2 = -2; k2 <= 3; ++k2)
            CHECK(A1.at(-k1, -k2) == std::conj(A1.at(k1, k2)));

    // overflow cap
    CepstralField big = c;
    big.alphas[0] = 120.0;
    CHECK_THROWS_AS(transfer_grid(big), numerical_error);
}

TEST_CASE("separable AR(1)xAR(1) exact cepstrum reproduces the product transfer") {
    const double r1 = 0.5, r2 = 0.4;
    const int M = 12;
    CepstralField c;
    c.window = HalfPlaneWindow(M, M);
    c.alpha0 = -2.0 * std::log(kTwoPi);
    c.alphas.assign(static_cast<std::size_t>(c.window.size()), 0.0);
    for (int k = 1; k <= M; ++k) {
        c.alphas[window_position(c.window, Index2{k, 0})] = std::pow(r1, k) / k;
        c.alphas[window_position(c.window, Index2{0, k})] = std::pow(r2, k) / k;
    }
    const TransferGrid A = transfer_grid(c);
    const double tail = std::pow(r1, M + 1) + std::pow(r2, M + 1);
    double worst = 0.0;
    for (int k1 = 1 - M; k1 <= M; ++k1)
        for (int k2 = 1 - M; k2 <= M; ++k2) {
            const double l1 = kPi * k1 / M, l2 = kPi * k2 / M;
            const cplx want = (1.0 - r1 * cplx(std::cos(l1), -std::sin(l1))) *
                              (1.0 - r2 * cplx(std::cos(l2), -std::sin(l2)));
            worst = std::max(worst, std::abs(A.at(k1, k2) - want));
        }
    CHECK(worst <= tail);
}

TEST_CASE("ar_coeffs: identity transfer and exact separable product") {
    const HalfPlaneWindow w(4, 4);
    TransferGrid A;
    A.window = w;
    A.values.assign(static_cast<std::size_t>(4 * w.M1 * w.M2), cplx(1.0, 0.0));
    const ARField zero = ar_coeffs(A);
    for (double v : zero.coeffs) CHECK(std::abs(v) < 1e-14);

    const double r1 = 0.5, r2 = 0.4;
    for (int k1 = 1 - w.M1; k1 <= w.M1; ++k1)
        for (int k2 = 1 - w.M2; k2 <= w.M2; ++k2) {
            const double l1 = kPi * k1 / w.M1, l2 = kPi * k2 / w.M2;
            A.values[A.slot(k1, k2)] = (1.0 - r1 * cplx(std::cos(l1), -std::sin(l1))) *
                                       (1.0 - r2 * cplx(std::cos(l2), -std::sin(l2)));
        }
    const ARField a = ar_coeffs(A);
    const auto lags = half_plane_indices(w);
    for (std::size_t i = 0; i < lags.size(); ++i) {
        double want = 0.0;
        if (lags[i] == Index2{1, 0}) want = -r1;
        if (lags[i] == Index2{0, 1}) want = -r2;
        if (lags[i] == Index2{1, 1}) want = r1 * r2;
        CHECK(std::abs(a.coeffs[i] - want) <= 1e-12);
    }
}

TEST_CASE("ma_coeffs: zero cepstrum, geometric series, and AR/MA duality") {
    CepstralField c;
    c.window = HalfPlaneWindow(8, 8);
    c.alpha0 = 0.0;
    c.alphas.assign(static_cast<std::size_t>(c.window.size()), 0.0);
    const MAField z = ma_coeffs(c);
    for (double v : z.coeffs) CHECK(std::abs(v) < 1e-14);

    // AR(1)-in-rows cepstrum: zeta_(k,0) -> rho^k
    const double rho = 0.45;
    for (int k = 1; k <= 8; ++k)
        c.alphas[window_position(c.window, Index2{k, 0})] = std::pow(rho, k) / k;
    const MAField ma = ma_coeffs(c);
    for (int k = 1; k <= 8; ++k)
        CHECK(coeff_at(c.window, ma.coeffs, Index2{k, 0}) ==
              Catch::Approx(std::pow(rho, k)).margin(std::pow(rho, 9)));

    // duality: {1, a} * {1, zeta} = identity up to truncation tail
    Xoshiro256pp rng(12);
    CepstralField s;
    s.window = HalfPlaneWindow(6, 6);
    s.alpha0 = 0.2;
    s.alphas.assign(static_cast<std::size_t>(s.window.size()), 0.0);
    const auto lags = half_plane_indices(s.window);
    for (std::size_t i = 0; i < lags.size(); ++i) {
        const int dist = std::abs(lags[i].i1) + std::abs(lags[i].i2);
        s.alphas[i] = (rng.uniform01() - 0.5) * 0.4 * std::pow(0.3, dist - 1);
    }
    const ARField ar = ar_coeffs(transfer_grid(s));
    const MAField mm = ma_coeffs(s);
    auto get = [&](const std::vector<double>& v, Index2 j) -> double {
        if (j.i1 == 0 && j.i2 == 0) return 1.0;
        const auto pos = window_position(s.window, j);
        return pos < 0 ? 0.0 : v[static_cast<std::size_t>(pos)];
    };
    // (a * zeta)_u = sum_j a_j zeta_{u-j} should vanish for 0 < u well inside
    for (const Index2& u : half_plane_indices(HalfPlaneWindow(2, 2))) {
        double conv = 0.0;
        for (int j1 = 0; j1 <= u.i1; ++j1)
            for (int j2 = -6; j2 <= 6; ++j2) {
                const Index2 j{j1, j2};
                const Index2 rest{u.i1 - j1, u.i2 - j2};
                if (!(j == Index2{0, 0}) && window_position(s.window, j) < 0) continue;
                if (!(rest == Index2{0, 0}) && window_position(s.window, rest) < 0) continue;
                conv += get(ar.coeffs, j) * get(mm.coeffs, rest);
            }
        CHECK(std::abs(conv) < 1e-6);
    }
}

TEST_CASE("innovation variance: constants and white-noise calibration") {
    CepstralField c;
    c.window = HalfPlaneWindow(2, 2);
    c.alpha0 = 0.0;
    c.alphas.assign(static_cast<std::size_t>(c.window.size()), 0.0);
    CHECK(innovation_variance(c) == Catch::Approx(kFourPiSq));

    const double s2 = 2.5;
    const SpectralGrid f = constant_grid(GridDims(16, 16), 2, 2, s2 / kFourPiSq);
    CHECK(innovation_variance(cepstral_coeffs(f, HalfPlaneWindow(4, 4))) ==
          Catch::Approx(s2).epsilon(1e-12));
}

TEST_CASE("innovation variance on the simulated eight-neighbor model") {
    const GridDims d(128, 128);
    const Lattice2D x = simulate_field(0.10, d, NoiseDist::Normal01, 2718);
    const SmoothingBandwidth bw(d, 8, 8);
    const SpectralGrid f = smoothed_spectrum(x, bw, SpectralOptions{false, 1e-12});
    const double s2 = innovation_variance(cepstral_coeffs(f, HalfPlaneWindow(bw.M1(), bw.M2())));
    CHECK(s2 == Catch::Approx(1.0).margin(0.10));
}

TEST_CASE("scale equivariance of the cepstral pipeline") {
    const GridDims d(16, 16);
    Xoshiro256pp rng(6);
    NormalSampler nrm(rng);
    Lattice2D x{d};
    for (int r = 1; r <= d.n1; ++r)
        for (int c = 1; c <= d.n2; ++c) x.set(r, c, nrm());
    const SmoothingBandwidth bw(d, 2, 2);
    const HalfPlaneWindow w(bw.M1(), bw.M2());
    SpectralGrid f = smoothed_spectrum(x, bw, SpectralOptions{false, 1e-12});
    SpectralGrid g = f;
    for (double& v : g.values) v *= 2.0;  // power-of-two scaling

    const CepstralField cf = cepstral_coeffs(f, w);
    const CepstralField cg = cepstral_coeffs(g, w);
    CHECK(cg.alpha0 - cf.alpha0 == Catch::Approx(std::log(2.0)).margin(1e-12));
    for (std::size_t i = 0; i < cf.alphas.size(); ++i)
        CHECK(cg.alphas[i] == Catch::Approx(cf.alphas[i]).margin(1e-12));

    const ARField af = ar_coeffs(transfer_grid(cf));
    const ARField ag = ar_coeffs(transfer_grid(cg));
    const MAField mf = ma_coeffs(cf);
    const MAField mg = ma_coeffs(cg);
    for (std::size_t i = 0; i < af.coeffs.size(); ++i) {
        CHECK(ag.coeffs[i] == Catch::Approx(af.coeffs[i]).margin(1e-12));
        CHECK(mg.coeffs[i] == Catch::Approx(mf.coeffs[i]).margin(1e-12));
    }
    CHECK(innovation_variance(cg) == Catch::Approx(2.0 * innovation_variance(cf)).epsilon(1e-12));
}

TEST_CASE("round trip: spectrum synthesized from a cepstral field is recovered") {
    // cepstrum supported strictly inside the window, grid resolves it
    CepstralField c;
    c.window = HalfPlaneWindow(4, 4);
    c.alpha0 = -1.1;
    c.alphas.assign(static_cast<std::size_t>(c.window.size()), 0.0);
    c.alphas[window_position(c.window, Index2{0, 1})] = 0.3;
    c.alphas[window_position(c.window, Index2{1, 0})] = -0.2;
    c.alphas[window_position(c.window, Index2{1, 1})] = 0.1;
    c.alphas[window_position(c.window, Index2{1, -2})] = 0.05;

    SpectralGrid f;
    f.bandwidth = SmoothingBandwidth(GridDims(16, 16), 2, 2);
    f.floor_used = 1e-12;
    f.values.assign(static_cast<std::size_t>(f.M1() + 1) * (2 * f.M2()), 0.0);
    const auto lags = half_plane_indices(c.window);
    for (int k1 = 0; k1 <= f.M1(); ++k1)
        for (int k2 = 1 - f.M2(); k2 <= f.M2(); ++k2) {
            double logf = c.alpha0;
            for (std::size_t i = 0; i < lags.size(); ++i)
                logf += 2.0 * c.alphas[i] *
                        std::cos(kPi * (lags[i].i1 * static_cast<double>(k1) / f.M1() +
                                        lags[i].i2 * static_cast<double>(k2) / f.M2()));
            f.values[f.slot(k1, k2)] = std::exp(logf);
        }
    // symmetrize the (0, k2<0) row exactly as the estimator guarantees
    for (int k2 = 1; k2 < f.M2(); ++k2) f.values[f.slot(0, -k2)] = f.values[f.slot(0, k2)];

    const CepstralField back = cepstral_coeffs(f, c.window);
    CHECK(back.alpha0 == Catch::Approx(c.alpha0).margin(1e-10));
    // coefficients at self-paired Nyquist lags (j1 = M1 or j2 = M2) alias and
    // are not recoverable one-to-one; everything strictly inside is exact.
    for (std::size_t i = 0; i < lags.size(); ++i)
        if (std::abs(lags[i].i1) < c.window.M1 && std::abs(lags[i].i2) < c.window.M2)
            CHECK(back.alphas[i] == Catch::Approx(c.alphas[i]).margin(1e-10));
}

TEST_CASE("coefficient CSV round trips") {
    CepstralField c;
    c.window = HalfPlaneWindow(2, 3, HalfPlaneOrder::ColLex);
    c.alpha0 = -0.7;
    c.alphas.resize(static_cast<std::size_t>(c.window.size()));
    for (std::size_t i = 0; i < c.alphas.size(); ++i) c.alphas[i] = 0.01 * (i + 1);
    std::ostringstream os;
    write_cepstral_csv(os, c);
    std::istringstream is(os.str());
    const CepstralField d = read_cepstral_csv(is);
    CHECK(d.window == c.window);
    CHECK(d.alpha0 == c.alpha0);
    CHECK(d.alphas == c.alphas);

    ARField a{HalfPlaneWindow(1, 2), {0.1, -0.2, 0.3, 0.4, -0.5, 0.6}};
    std::ostringstream oa;
    write_ar_csv(oa, a);
    std::istringstream ia(oa.str());
    const ARField b = read_ar_csv(ia);
    CHECK(b.window == a.window);
    CHECK(b.coeffs == a.coeffs);

    std::istringstream bad("1,1,row\n0,1,0.5\n9,9,1.0\n1,1,2.0\n");
    CHECK_THROWS_AS(read_ar_csv(bad), validation_error);
}

TEST_CASE("ar_coeffs rejects a transfer grid that breaks Hermitian symmetry") {
    const HalfPlaneWindow w(2, 2);
    TransferGrid A;
    A.window = w;
    A.values.assign(static_cast<std::size_t>(4 * w.M1 * w.M2), cplx(1.0, 0.0));
    A.values[A.slot(1, 1)] = cplx(0.5, 0.4);  // partner (-1,-1) left at 1
    CHECK_THROWS_AS(ar_coeffs(A), numerical_error);
}
