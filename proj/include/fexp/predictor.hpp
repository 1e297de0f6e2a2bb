#ifndef FEXP_PREDICTOR_HPP
#define FEXP_PREDICTOR_HPP

#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fexp/cepstrum.hpp"
#include "fexp/lattice.hpp"

namespace fexp {

struct PredictionResult {
    double value = 0.0;
    bool used_recursion = false;
    std::int64_t zero_filled_count = 0;  ///< distinct cells assigned 0 by convention
    HalfPlaneOrder order_used = HalfPlaneOrder::RowLex;
};

struct PredictionOptions {
    /// Predicting an observed cell is rejected unless set; the experiment
    /// harness sets it to treat an observed target as unobserved.
    bool allow_observed_target = false;
};

/// Ordering selection by target location: leading-coordinate extrapolation
/// picks the ordering whose half-plane looks back along that coordinate;
/// interior targets default to RowLex.
inline HalfPlaneOrder choose_ordering(const Index2& s, const GridDims& dims) {
    const bool r_in = s.i1 >= 1 && s.i1 <= dims.n1;
    const bool c_in = s.i2 >= 1 && s.i2 <= dims.n2;
    if (r_in && c_in) return HalfPlaneOrder::RowLex;
    if (s.i1 == dims.n1 + 1 && c_in) return HalfPlaneOrder::RowLex;
    if (s.i2 == dims.n2 + 1 && r_in) return HalfPlaneOrder::ColLex;
    throw validation_error("choose_ordering: target more than one step beyond the boundary");
}

/// Interior tie-break variant: prefers the ordering whose prediction support
/// contains fewer unobserved cells; ties (and everything else) go to RowLex.
inline HalfPlaneOrder choose_ordering(const Lattice2D& x, const Index2& s, int M1, int M2) {
    const GridDims& d = x.dims();
    const bool interior = s.i1 >= 1 && s.i1 <= d.n1 && s.i2 >= 1 && s.i2 <= d.n2;
    if (!interior) return choose_ordering(s, d);
    auto unobserved = [&](HalfPlaneOrder ord) {
        std::int64_t bad = 0;
        for (const Index2& k : half_plane_indices(HalfPlaneWindow(M1, M2, ord))) {
            const Index2 u{s.i1 - k.i1, s.i2 - k.i2};
            if (!x.in_bounds(u) || !x.observed(u)) ++bad;
        }
        return bad;
    };
    return unobserved(HalfPlaneOrder::ColLex) < unobserved(HalfPlaneOrder::RowLex)
               ? HalfPlaneOrder::ColLex
               : HalfPlaneOrder::RowLex;
}

namespace detail {

/// Recursive evaluator for the prediction equations in the RowLex frame.
/// A cell's value is: its observation when available; 0 in the convention's
/// zero regions (column < -r, or column < 1 on rows below n1 - r, or outside
/// the lattice above/right where no recursion can reach data); otherwise the
/// prediction equation applied recursively. Memoized; every recursive
/// reference strictly lex-precedes its user, so evaluation terminates and is
/// equivalent to a sweep in increasing lexicographic order.
class RecursivePredictor {
public:
    RecursivePredictor(const Lattice2D& x, const std::vector<Index2>& lags,
                       const std::vector<double>& weights, const Index2& target, int recursion_bound)
        : x_(x), lags_(lags), weights_(weights), target_(target), r_(recursion_bound) {}

    double evaluate_at(const Index2& u) {
        double acc = 0.0;
        for (std::size_t i = 0; i < lags_.size(); ++i)
            acc += weights_[i] * value(Index2{u.i1 - lags_[i].i1, u.i2 - lags_[i].i2});
        return acc;
    }

    bool used_recursion() const { return used_recursion_; }
    std::int64_t zero_filled() const { return static_cast<std::int64_t>(zeroed_.size()); }

private:
    double value(const Index2& u) {
        const bool is_target = u == target_;
        if (!is_target && x_.in_bounds(u) && x_.observed(u)) return x_.at(u);
        const int n1 = x_.dims().n1;
        if (u.i2 < -r_ || (u.i2 < 0 && u.i1 < n1 - r_) || u.i1 < 1 || u.i1 > n1 + 1 ||
            u.i2 > x_.dims().n2) {
            zeroed_.insert(key(u));
            return 0.0;
        }
        const auto it = memo_.find(key(u));
        if (it != memo_.end()) return it->second;
        used_recursion_ = true;
        const double v = evaluate_at(u);
        memo_.emplace(key(u), v);
        return v;
    }

    static std::int64_t key(const Index2& u) {
        return (static_cast<std::int64_t>(u.i1) << 32) ^ static_cast<std::uint32_t>(u.i2);
    }

    const Lattice2D& x_;
    const std::vector<Index2>& lags_;
    const std::vector<double>& weights_;
    Index2 target_;
    int r_;
    bool used_recursion_ = false;
    std::unordered_map<std::int64_t, double> memo_;
    std::unordered_set<std::int64_t> zeroed_;
};

/// Shared row-frame driver for both predictor families. `weights[i]` applies
/// to the cell at target - lags[i].
inline PredictionResult predict_rowframe(const Lattice2D& x, const std::vector<Index2>& lags,
                                         const std::vector<double>& weights, const Index2& s,
                                         int trailing_lag_bound, const PredictionOptions& opts) {
    const GridDims& d = x.dims();
    const bool interior = s.i1 >= 1 && s.i1 <= d.n1 && s.i2 >= 1 && s.i2 <= d.n2;
    const bool boundary = s.i1 == d.n1 + 1 && s.i2 >= 1 && s.i2 <= d.n2;
    if (!interior && !boundary)
        throw validation_error("predict: target must be interior or one step beyond the leading boundary");
    if (interior && x.observed(s) && !opts.allow_observed_target)
        throw validation_error("predict: target cell is observed (enable the validation override to predict it)");
    const int r = std::min(d.n2 / 8, trailing_lag_bound);
    RecursivePredictor rec(x, lags, weights, s, r);
    PredictionResult out;
    out.value = rec.evaluate_at(s);
    out.used_recursion = rec.used_recursion();
    out.zero_filled_count = rec.zero_filled();
    out.order_used = HalfPlaneOrder::RowLex;
    return out;
}

}  // namespace detail

/// One-step prediction x-hat_s = - sum_{k in M} a-hat_k x_{s-k} for an
/// interior or leading-boundary target. ColLex coefficient fields are
/// evaluated on the transposed lattice, which realizes the coordinate-role
/// swap exactly.
inline PredictionResult predict(const Lattice2D& x, const ARField& a, const Index2& s,
                                const PredictionOptions& opts = {}) {
    if (a.window.order == HalfPlaneOrder::ColLex) {
        ARField arow{HalfPlaneWindow(a.window.M1, a.window.M2), a.coeffs};
        PredictionResult res = predict(x.transposed(), arow, Index2{s.i2, s.i1}, opts);
        res.order_used = HalfPlaneOrder::ColLex;
        return res;
    }
    const auto lags = half_plane_indices(a.window);
    std::vector<double> weights(a.coeffs.size());
    for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = -a.coeffs[i];
    return detail::predict_rowframe(x, lags, weights, s, a.window.M2, opts);
}

/// Interior form of the prediction equation; rejects boundary targets.
inline PredictionResult predict_interior(const Lattice2D& x, const ARField& a, const Index2& s,
                                         const PredictionOptions& opts = {}) {
    const GridDims& d = x.dims();
    const bool interior = s.i1 >= 1 && s.i1 <= d.n1 && s.i2 >= 1 && s.i2 <= d.n2;
    if (!interior) throw validation_error("predict_interior: target must lie inside the lattice");
    return predict(x, a, s, opts);
}

/// Extrapolation one step beyond the boundary in the ordering's leading
/// coordinate, with the recursive fill of unobserved required cells.
inline PredictionResult predict_boundary(const Lattice2D& x, const ARField& a, const Index2& s,
                                         const PredictionOptions& opts = {}) {
    const GridDims& d = x.dims();
    const bool ok = a.window.order == HalfPlaneOrder::RowLex
                        ? (s.i1 == d.n1 + 1 && s.i2 >= 1 && s.i2 <= d.n2)
                        : (s.i2 == d.n2 + 1 && s.i1 >= 1 && s.i1 <= d.n1);
    if (!ok)
        throw validation_error("predict_boundary: target must be one step beyond the leading boundary");
    return predict(x, a, s, opts);
}

}  // namespace fexp

#endif  // FEXP_PREDICTOR_HPP
