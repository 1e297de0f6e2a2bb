#ifndef FEXP_MC_HPP
#define FEXP_MC_HPP

#include <atomic>
#include <cmath>
#include <cstring>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "fexp/ar.hpp"
#include "fexp/cepstrum.hpp"
#include "fexp/predictor.hpp"
#include "fexp/rng.hpp"
#include "fexp/spectral.hpp"

namespace fexp {

enum class NoiseDist { Normal01, UniformPm5, ChiSq9Centered };

inline const char* to_string(NoiseDist d) {
    switch (d) {
        case NoiseDist::Normal01: return "normal";
        case NoiseDist::UniformPm5: return "uniform";
        default: return "chisq9";
    }
}

inline NoiseDist dist_from_string(const std::string& s) {
    if (s == "normal") return NoiseDist::Normal01;
    if (s == "uniform") return NoiseDist::UniformPm5;
    if (s == "chisq9") return NoiseDist::ChiSq9Centered;
    throw validation_error("unknown distribution '" + s + "' (expected normal|uniform|chisq9)");
}

/// i.i.d. innovations on a (n1+2) x (n2+2) buffer: one ring around the
/// lattice so the eight-neighbor moving average is exact at the edges.
inline std::vector<double> draw_innovations(const GridDims& dims, NoiseDist dist,
                                            std::uint64_t seed) {
    const std::size_t count = static_cast<std::size_t>(dims.n1 + 2) * (dims.n2 + 2);
    std::vector<double> eps(count);
    Xoshiro256pp rng(seed);
    NormalSampler normal(rng);
    switch (dist) {
        case NoiseDist::Normal01:
            for (auto& e : eps) e = normal();
            break;
        case NoiseDist::UniformPm5:
            for (auto& e : eps) e = -5.0 + 10.0 * rng.uniform01();
            break;
        case NoiseDist::ChiSq9Centered:
            for (auto& e : eps) {
                double s = 0.0;
                for (int i = 0; i < 9; ++i) {
                    const double z = normal();
                    s += z * z;
                }
                e = s - 9.0;
            }
            break;
    }
    return eps;
}

/// x_t = eps_t + tau * sum over the eight unit-lag neighbors of eps, using
/// genuine innovations from the buffer ring (no wraparound).
inline Lattice2D field_from_innovations(double tau, const GridDims& dims,
                                        const std::vector<double>& eps) {
    if (!(std::abs(tau) < 0.125))
        throw validation_error("simulate_field: |tau| < 1/8 required for invertibility");
    if (eps.size() != static_cast<std::size_t>(dims.n1 + 2) * (dims.n2 + 2))
        throw validation_error("field_from_innovations: buffer size mismatch");
    const int stride = dims.n2 + 2;
    auto e = [&](int t1, int t2) { return eps[static_cast<std::size_t>(t1) * stride + t2]; };
    Lattice2D x{dims};
    for (int t1 = 1; t1 <= dims.n1; ++t1)
        for (int t2 = 1; t2 <= dims.n2; ++t2) {
            double nb = 0.0;
            for (int s1 = -1; s1 <= 1; ++s1)
                for (int s2 = -1; s2 <= 1; ++s2) {
                    if (s1 == 0 && s2 == 0) continue;
                    nb += e(t1 - s1, t2 - s2);
                }
            x.set(t1, t2, e(t1, t2) + tau * nb);
        }
    return x;
}

inline Lattice2D simulate_field(double tau, const GridDims& dims, NoiseDist dist,
                                std::uint64_t seed) {
    return field_from_innovations(tau, dims, draw_innovations(dims, dist, seed));
}

/// Reference spectrum display for the simulation model:
/// f(lambda) = (2 pi)^{-2} (1 + tau nu(lambda)),
/// nu(lambda) = prod_j (1 + 2 cos lambda_j) - 1.
inline double true_spectrum(double tau, const Freq2& lambda) {
    const double nu = (1.0 + 2.0 * std::cos(lambda.l1)) * (1.0 + 2.0 * std::cos(lambda.l2)) - 1.0;
    return (1.0 + tau * nu) / kFourPiSq;
}

// ---------------------------------------------------------------------------
// Experiment harness
// ---------------------------------------------------------------------------

struct MCConfig {
    std::vector<double> taus{0.05};
    int nstar = 5;                       ///< estimation dims (n*+1) x (2n*+1)
    NoiseDist dist = NoiseDist::Normal01;
    std::vector<std::pair<int, int>> bandwidths{{1, 1}};  ///< (m1, m2) per table row
    std::vector<int> ar_orders{1};                        ///< p* per table row (or one, broadcast)
    int reps = 1000;
    std::uint64_t master_seed = 7968ull;
    GridDims target_dims{40, 41};
    Index2 target_cell{20, 20};
    bool fixed_target = true;   ///< one target lattice across replications
    bool demean = false;        ///< known-zero-mean simulations skip demeaning
    int threads = 1;
};

struct RMSEEntry {
    std::string predictor;  ///< fexp_periodogram | fexp_ar | ar
    double tau = 0.0;
    int m1 = 0, m2 = 0, pstar = 0;
    double rmse = 0.0;
    int reps_used = 0;
    int failures = 0;
};

struct RMSEReport {
    MCConfig config;
    GridDims estimation_dims{2, 2};
    GridDims spectral_dims{2, 2};  ///< even sublattice used by the frequency pipelines
    std::vector<RMSEEntry> entries;
};

namespace detail {

/// RNG stream tags (arbitrary distinct constants fed to derive_seed).
inline constexpr std::uint64_t kTagTarget = 0x7461726765740001ull;
inline constexpr std::uint64_t kTagEstimation = 0x6573746C61740002ull;

inline GridDims even_trim(const GridDims& d) {
    const int n1 = d.n1 - d.n1 % 2;
    const int n2 = d.n2 - d.n2 % 2;
    if (n1 < 2 || n2 < 2) throw validation_error("lattice too small for spectral estimation");
    return GridDims(n1, n2);
}

struct RowPlan {
    SmoothingBandwidth bw;
    ARWindow ar_window;
    int m1, m2, pstar;
};

}  // namespace detail

/// Flexible-exponential coefficient field from a lattice: tapered smoothed
/// periodogram -> cepstral coefficients -> transfer function -> AR field.
inline ARField fexp_coefficients(const Lattice2D& x, const SmoothingBandwidth& bw,
                                 bool demean = true) {
    const SpectralGrid f = smoothed_spectrum(x, bw, SpectralOptions{demean, 1e-12});
    const CepstralField c = cepstral_coeffs(f, HalfPlaneWindow(bw.M1(), bw.M2()));
    return ar_coeffs(transfer_grid(c));
}

/// Same pipeline with the AR-fit nonparametric spectrum in place of the
/// smoothed periodogram.
inline ARField fexp_ar_coefficients(const ARFit& fit, const SmoothingBandwidth& bw) {
    const SpectralGrid f = ar_spectrum_grid(fit, bw);
    const CepstralField c = cepstral_coeffs(f, HalfPlaneWindow(bw.M1(), bw.M2()));
    return ar_coeffs(transfer_grid(c));
}

/// Runs the prediction experiment: per replication, a fresh estimation
/// lattice is drawn, all three predictors are fitted on it, and the target
/// cell of the target lattice is predicted as if unobserved. Deterministic
/// for a given master seed regardless of the thread count: per-purpose
/// streams come from derive_seed and the reduction runs in replication
/// order. Numerical failures exclude the replication for the affected
/// predictor and are counted.
inline RMSEReport run_experiment(const MCConfig& cfg) {
    if (cfg.reps < 1) throw validation_error("run_experiment: reps must be >= 1");
    if (cfg.nstar < 1) throw validation_error("run_experiment: nstar must be >= 1");
    if (cfg.taus.empty()) throw validation_error("run_experiment: no tau values");
    for (double t : cfg.taus)
        if (!(std::abs(t) < 0.125))
            throw validation_error("run_experiment: |tau| < 1/8 required");
    if (cfg.bandwidths.empty()) throw validation_error("run_experiment: no bandwidths");
    std::vector<int> orders = cfg.ar_orders;
    if (orders.size() == 1 && cfg.bandwidths.size() > 1)
        orders.assign(cfg.bandwidths.size(), orders[0]);
    if (orders.size() != cfg.bandwidths.size())
        throw validation_error("run_experiment: ar_orders must match bandwidths (or be a single value)");

    const GridDims est_dims(cfg.nstar + 1, 2 * cfg.nstar + 1);
    const GridDims spec_dims = detail::even_trim(est_dims);
    std::vector<detail::RowPlan> rows;
    for (std::size_t i = 0; i < cfg.bandwidths.size(); ++i) {
        const auto [m1, m2] = cfg.bandwidths[i];
        const int p = orders[i];
        if (p < 1) throw validation_error("run_experiment: p* must be >= 1");
        rows.push_back(detail::RowPlan{SmoothingBandwidth(spec_dims, m1, m2),
                                       ARWindow(0, p, 0, p), m1, m2, p});
    }
    if (!(cfg.target_cell.i1 >= 1 && cfg.target_cell.i1 <= cfg.target_dims.n1 &&
          cfg.target_cell.i2 >= 1 && cfg.target_cell.i2 <= cfg.target_dims.n2))
        throw validation_error("run_experiment: target cell outside the target lattice");

    const std::size_t n_tau = cfg.taus.size();
    const std::size_t n_rows = rows.size();
    const std::size_t cells = n_tau * n_rows * 3;  // predictors: 0 xhat, 1 xtilde, 2 xcheck
    // err2[rep * cells + cell]; NaN marks a failed (excluded) replication.
    std::vector<double> err2(static_cast<std::size_t>(cfg.reps) * cells,
                             std::numeric_limits<double>::quiet_NaN());

    // One target lattice per tau (generated once in fixed-target mode, fresh
    // per replication otherwise); lattices across tau use independent
    // innovation streams keyed by the tau bit pattern.
    auto target_seed = [&](double tau, std::uint64_t rep_index) {
        std::uint64_t tau_bits;
        static_assert(sizeof(tau_bits) == sizeof(tau));
        std::memcpy(&tau_bits, &tau, sizeof(tau));
        return derive_seed(cfg.master_seed, detail::kTagTarget ^ tau_bits, rep_index);
    };
    std::vector<std::vector<double>> fixed_target_eps;
    if (cfg.fixed_target)
        for (double tau : cfg.taus)
            fixed_target_eps.push_back(draw_innovations(cfg.target_dims, cfg.dist, target_seed(tau, 0)));

    const PredictionOptions pred_opts{true};

    auto run_rep = [&](int rep) {
        const std::vector<double> est_eps = draw_innovations(
            est_dims, cfg.dist, derive_seed(cfg.master_seed, detail::kTagEstimation, static_cast<std::uint64_t>(rep)));

        for (std::size_t ti = 0; ti < n_tau; ++ti) {
            const double tau = cfg.taus[ti];
            const Lattice2D x_est = field_from_innovations(tau, est_dims, est_eps);
            const Lattice2D x_spec = x_est.top_left(spec_dims.n1, spec_dims.n2);
            const std::vector<double> tgt_eps =
                cfg.fixed_target
                    ? fixed_target_eps[ti]
                    : draw_innovations(cfg.target_dims, cfg.dist,
                                       target_seed(tau, 1 + static_cast<std::uint64_t>(rep)));
            const Lattice2D x_tgt = field_from_innovations(tau, cfg.target_dims, tgt_eps);
            const double truth = x_tgt.at(cfg.target_cell);
            for (std::size_t ri = 0; ri < n_rows; ++ri) {
                const detail::RowPlan& plan = rows[ri];
                const std::size_t base = (static_cast<std::size_t>(rep) * n_tau + ti) * n_rows * 3 +
                                         ri * 3;
                try {
                    const ARField a = fexp_coefficients(x_spec, plan.bw, cfg.demean);
                    const double p = predict(x_tgt, a, cfg.target_cell, pred_opts).value;
                    err2[base + 0] = (p - truth) * (p - truth);
                } catch (const numerical_error&) {
                }
                std::optional<ARFit> fit;
                try {
                    fit = ls_fit(x_est, plan.ar_window);
                    const double p = ar_predict(x_tgt, *fit, cfg.target_cell, pred_opts).value;
                    err2[base + 2] = (p - truth) * (p - truth);
                } catch (const numerical_error&) {
                }
                if (fit) {
                    try {
                        const ARField a = fexp_ar_coefficients(*fit, plan.bw);
                        const double p = predict(x_tgt, a, cfg.target_cell, pred_opts).value;
                        err2[base + 1] = (p - truth) * (p - truth);
                    } catch (const numerical_error&) {
                    }
                }
            }
        }
    };

    const int n_threads = std::max(1, cfg.threads);
    if (n_threads == 1) {
        for (int rep = 0; rep < cfg.reps; ++rep) run_rep(rep);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back([&]() {
                for (int rep = next.fetch_add(1); rep < cfg.reps; rep = next.fetch_add(1)) run_rep(rep);
            });
        for (auto& th : pool) th.join();
    }

    RMSEReport report;
    report.config = cfg;
    report.estimation_dims = est_dims;
    report.spectral_dims = spec_dims;
    static const char* names[3] = {"fexp_periodogram", "fexp_ar", "ar"};
    for (std::size_t ti = 0; ti < n_tau; ++ti)
        for (std::size_t ri = 0; ri < n_rows; ++ri)
            for (int pi = 0; pi < 3; ++pi) {
                double acc = 0.0;
                int used = 0, failed = 0;
                for (int rep = 0; rep < cfg.reps; ++rep) {
                    const double e = err2[(static_cast<std::size_t>(rep) * n_tau + ti) * n_rows * 3 +
                                          ri * 3 + pi];
                    if (std::isnan(e)) {
                        ++failed;
                    } else {
                        acc += e;
                        ++used;
                    }
                }
                RMSEEntry ent;
                ent.predictor = names[pi];
                ent.tau = cfg.taus[ti];
                ent.m1 = rows[ri].m1;
                ent.m2 = rows[ri].m2;
                ent.pstar = rows[ri].pstar;
                ent.rmse = used > 0 ? std::sqrt(acc / used) : std::numeric_limits<double>::quiet_NaN();
                ent.reps_used = used;
                ent.failures = failed;
                report.entries.push_back(ent);
            }
    return report;
}

/// Wide CSV mirroring the experiment tables: one row per (m1, m2)/p*
/// configuration, one column per predictor x tau. Entries are laid out in
/// (tau, row, predictor) order by run_experiment.
inline void write_rmse_csv(std::ostream& os, const RMSEReport& r) {
    const std::size_t n_tau = r.config.taus.size();
    const std::size_t n_rows = r.config.bandwidths.size();
    auto entry = [&](std::size_t ti, std::size_t ri, int pi) -> const RMSEEntry& {
        return r.entries[(ti * n_rows + ri) * 3 + pi];
    };
    static const char* names[3] = {"fexp_periodogram", "fexp_ar", "ar"};
    os << "m1,m2,pstar";
    for (int pi = 0; pi < 3; ++pi)
        for (double t : r.config.taus) os << "," << names[pi] << "_tau" << t;
    os << "\n";
    os.precision(10);
    for (std::size_t ri = 0; ri < n_rows; ++ri) {
        const RMSEEntry& head = entry(0, ri, 0);
        os << head.m1 << "," << head.m2 << "," << head.pstar;
        for (int pi = 0; pi < 3; ++pi)
            for (std::size_t ti = 0; ti < n_tau; ++ti) os << "," << entry(ti, ri, pi).rmse;
        os << "\n";
    }
}

}  // namespace fexp

#endif  // FEXP_MC_HPP
