#ifndef FEXP_INGEST_HPP
#define FEXP_INGEST_HPP

#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <variant>
#include <vector>

#include "fexp/ar.hpp"
#include "fexp/mc.hpp"
#include "fexp/predictor.hpp"

namespace fexp {

/// One georeferenced observation (e.g. a census block's median house price).
struct PointRecord {
    double lat = 0.0;
    double lon = 0.0;
    double value = 0.0;
};

/// Bounding box plus cell counts. Row index increases with latitude, column
/// index with the longitude coordinate as given; for west-hemisphere data
/// supply westward magnitudes (positive-west degrees) so columns advance
/// westward. The orientation is recorded in the CSV header comment written
/// by the CLI so a transposed grid is detectable.
struct GridSpec {
    double lat_min = 0.0, lat_max = 0.0;
    double lon_min = 0.0, lon_max = 0.0;
    int rows = 0, cols = 0;

    GridSpec() = default;
    GridSpec(double la0, double la1, double lo0, double lo1, int r, int c)
        : lat_min(la0), lat_max(la1), lon_min(lo0), lon_max(lo1), rows(r), cols(c) {
        if (!(lat_min < lat_max) || !(lon_min < lon_max))
            throw validation_error("GridSpec: need lat_min < lat_max and lon_min < lon_max");
        if (rows < 1 || cols < 1) throw validation_error("GridSpec: rows, cols must be >= 1");
    }
};

/// Point-to-grid aggregation: each cell's value is the arithmetic mean of
/// the points falling in it (half-open cells, the max edge closed); empty
/// cells are masked. Points outside the bounding box are ignored.
inline Lattice2D grid_points(const std::vector<PointRecord>& points, const GridSpec& spec) {
    Lattice2D out{GridDims(spec.rows, spec.cols), 0.0, false};
    std::vector<double> sum(static_cast<std::size_t>(spec.rows) * spec.cols, 0.0);
    std::vector<std::int64_t> cnt(sum.size(), 0);
    const double dlat = (spec.lat_max - spec.lat_min) / spec.rows;
    const double dlon = (spec.lon_max - spec.lon_min) / spec.cols;
    for (const PointRecord& p : points) {
        if (p.lat < spec.lat_min || p.lat > spec.lat_max || p.lon < spec.lon_min ||
            p.lon > spec.lon_max)
            continue;
        int r = static_cast<int>((p.lat - spec.lat_min) / dlat);
        int c = static_cast<int>((p.lon - spec.lon_min) / dlon);
        if (r == spec.rows) r = spec.rows - 1;  // max edge closed
        if (c == spec.cols) c = spec.cols - 1;
        sum[static_cast<std::size_t>(r) * spec.cols + c] += p.value;
        cnt[static_cast<std::size_t>(r) * spec.cols + c] += 1;
    }
    for (int r = 1; r <= spec.rows; ++r)
        for (int c = 1; c <= spec.cols; ++c) {
            const std::size_t i = static_cast<std::size_t>(r - 1) * spec.cols + (c - 1);
            if (cnt[i] > 0) out.set(r, c, sum[i] / cnt[i], true);
        }
    return out;
}

/// Subtracts the sample mean over observed cells; masked cells are left
/// untouched (and still masked). Returns the removed mean for later
/// re-addition to predictions.
inline std::pair<Lattice2D, double> demean(const Lattice2D& x) {
    double acc = 0.0;
    std::int64_t n = 0;
    for (int r = 1; r <= x.dims().n1; ++r)
        for (int c = 1; c <= x.dims().n2; ++c)
            if (x.observed(r, c)) {
                acc += x.at(r, c);
                ++n;
            }
    if (n == 0) throw validation_error("demean: lattice has no observed cells");
    const double mean = acc / static_cast<double>(n);
    Lattice2D y = x;
    for (int r = 1; r <= x.dims().n1; ++r)
        for (int c = 1; c <= x.dims().n2; ++c)
            if (y.observed(r, c)) y.set(r, c, y.at(r, c) - mean);
    return {std::move(y), mean};
}

// ---------------------------------------------------------------------------
// Sequential missing-cell prediction
// ---------------------------------------------------------------------------

/// Flexible-exponential fit source: bandwidth applied to the (even-trimmed)
/// fitting sublattice.
struct FexpSource {
    int m1 = 1;
    int m2 = 1;
};

/// Truncated-autoregression fit source.
struct ArSource {
    ARWindow window;
};

using FitSource = std::variant<FexpSource, ArSource>;

struct SequentialOptions {
    int fit_rows = 0;  ///< fitting sublattice = first fit_rows rows (0 = all)
    int fit_cols = 0;  ///< and first fit_cols columns (0 = all)
};

struct SequentialPrediction {
    Index2 cell;
    double value = 0.0;  ///< on the original scale (mean re-added)
    HalfPlaneOrder order_used = HalfPlaneOrder::RowLex;
};

namespace detail {

/// Per-ordering coefficient provider; fits lazily so an empty cell list
/// performs no fitting at all.
struct SequentialFitter {
    const Lattice2D& sub;  ///< demeaned, fully observed fitting sublattice
    const FitSource& source;

    std::optional<ARField> fexp_row{}, fexp_col{};
    std::optional<ARFit> ar_row{}, ar_col{};

    /// Window extents used for support-based ordering choice, without fitting.
    std::pair<int, int> support_extent(HalfPlaneOrder ord) const {
        if (std::holds_alternative<FexpSource>(source)) {
            const auto& fs = std::get<FexpSource>(source);
            const GridDims d = ord == HalfPlaneOrder::RowLex
                                   ? even_trim(sub.dims())
                                   : even_trim(GridDims(sub.dims().n2, sub.dims().n1));
            const int mm1 = ord == HalfPlaneOrder::RowLex ? fs.m1 : fs.m2;
            const int mm2 = ord == HalfPlaneOrder::RowLex ? fs.m2 : fs.m1;
            const SmoothingBandwidth bw(d, mm1, mm2);
            return {bw.M1(), bw.M2()};
        }
        const ARWindow& w = std::get<ArSource>(source).window;
        return {std::max(w.pU1, 1), std::max(w.pU2, 1)};
    }

    PredictionResult predict_cell(const Lattice2D& scratch, const Index2& s, HalfPlaneOrder ord) {
        const PredictionOptions opts{true};
        if (std::holds_alternative<FexpSource>(source)) {
            const auto& fs = std::get<FexpSource>(source);
            if (ord == HalfPlaneOrder::RowLex) {
                if (!fexp_row) {
                    const GridDims d = even_trim(sub.dims());
                    fexp_row = fexp_coefficients(sub.top_left(d.n1, d.n2),
                                                 SmoothingBandwidth(d, fs.m1, fs.m2),
                                                 /*demean=*/false);
                }
                return predict(scratch, *fexp_row, s, opts);
            }
            if (!fexp_col) {
                const Lattice2D subT = sub.transposed();
                const GridDims d = even_trim(subT.dims());
                const ARField rowfield = fexp_coefficients(subT.top_left(d.n1, d.n2),
                                                           SmoothingBandwidth(d, fs.m2, fs.m1),
                                                           /*demean=*/false);
                fexp_col = ARField{HalfPlaneWindow(rowfield.window.M1, rowfield.window.M2,
                                                   HalfPlaneOrder::ColLex),
                                   rowfield.coeffs};
            }
            return predict(scratch, *fexp_col, s, opts);
        }
        const ARWindow& w = std::get<ArSource>(source).window;
        if (ord == HalfPlaneOrder::RowLex) {
            if (!ar_row) ar_row = ls_fit(sub, w);
            return ar_predict(scratch, *ar_row, s, opts);
        }
        if (!ar_col) ar_col = ls_fit(sub.transposed(), w);
        PredictionResult res =
            ar_predict(scratch.transposed(), *ar_col, Index2{s.i2, s.i1}, opts);
        res.order_used = HalfPlaneOrder::ColLex;
        return res;
    }
};

}  // namespace detail

/// The step-by-step workflow: demean, fit once per needed ordering on the
/// configured sublattice, then predict the listed cells in order, feeding
/// each prediction back as an observed value for the following ones.
/// Reported values are on the original scale.
inline std::vector<SequentialPrediction> sequential_predict(const Lattice2D& x,
                                                            const FitSource& source,
                                                            const std::vector<Index2>& cells,
                                                            const SequentialOptions& opts = {}) {
    auto [work, mean] = demean(x);
    const int fr = opts.fit_rows > 0 ? opts.fit_rows : x.dims().n1;
    const int fc = opts.fit_cols > 0 ? opts.fit_cols : x.dims().n2;
    const Lattice2D sub = work.top_left(fr, fc);
    if (!cells.empty() && !sub.fully_observed())
        throw validation_error("sequential_predict: fitting sublattice contains unobserved cells");
    detail::SequentialFitter fitter{sub, source};
    std::vector<SequentialPrediction> out;
    out.reserve(cells.size());
    for (const Index2& s : cells) {
        HalfPlaneOrder ord;
        if (work.in_bounds(s)) {
            const auto [r1, r2] = fitter.support_extent(HalfPlaneOrder::RowLex);
            ord = choose_ordering(work, s, r1, r2);
        } else {
            ord = choose_ordering(s, work.dims());
        }
        const PredictionResult res = fitter.predict_cell(work, s, ord);
        if (work.in_bounds(s)) work.set(s.i1, s.i2, res.value, true);
        out.push_back(SequentialPrediction{s, res.value + mean, ord});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Points CSV: header "lat,lon,value", one record per line.
// ---------------------------------------------------------------------------

inline std::vector<PointRecord> read_points_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw validation_error("points CSV: missing header");
    if (line.rfind("lat", 0) != 0) throw validation_error("points CSV: header must be lat,lon,value");
    std::vector<PointRecord> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        PointRecord p;
        char c1 = 0, c2 = 0;
        if (!(ls >> p.lat >> c1 >> p.lon >> c2 >> p.value))
            throw validation_error("points CSV: bad record '" + line + "'");
        if (!std::isfinite(p.lat) || !std::isfinite(p.lon))
            throw validation_error("points CSV: non-finite coordinates");
        out.push_back(p);
    }
    return out;
}

inline void write_points_csv(std::ostream& os, const std::vector<PointRecord>& pts) {
    os << "lat,lon,value\n";
    os.precision(17);
    for (const auto& p : pts) os << p.lat << "," << p.lon << "," << p.value << "\n";
}

}  // namespace fexp

#endif  // FEXP_INGEST_HPP
