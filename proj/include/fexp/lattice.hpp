#ifndef FEXP_LATTICE_HPP
#define FEXP_LATTICE_HPP

#include <cmath>
#include <compare>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fexp/errors.hpp"

namespace fexp {

/// Grid index or lag pair (i[1], i[2]) = (row, column). 1-based when used as
/// a lattice location, unrestricted when used as a lag.
struct Index2 {
    int i1 = 0;
    int i2 = 0;
    friend bool operator==(const Index2&, const Index2&) = default;
};

struct GridDims {
    int n1 = 0;  ///< rows
    int n2 = 0;  ///< columns

    GridDims() = default;
    GridDims(int rows, int cols) : n1(rows), n2(cols) {
        if (n1 < 1 || n2 < 1) throw validation_error("GridDims: dimensions must be >= 1");
    }
    std::int64_t size() const { return static_cast<std::int64_t>(n1) * n2; }
    bool even() const { return n1 % 2 == 0 && n2 % 2 == 0; }
    friend bool operator==(const GridDims&, const GridDims&) = default;
};

/// The two lexicographic half-plane orderings. RowLex compares the row
/// coordinate first; ColLex swaps the coordinate roles.
enum class HalfPlaneOrder { RowLex, ColLex };

inline const char* to_string(HalfPlaneOrder o) {
    return o == HalfPlaneOrder::RowLex ? "row" : "col";
}

inline HalfPlaneOrder order_from_string(const std::string& s) {
    if (s == "row") return HalfPlaneOrder::RowLex;
    if (s == "col") return HalfPlaneOrder::ColLex;
    throw validation_error("unknown ordering '" + s + "' (expected row|col)");
}

/// Lexicographic comparison of index pairs under the given ordering.
inline std::strong_ordering lex_compare(const Index2& j, const Index2& k, HalfPlaneOrder order) {
    const int ja = order == HalfPlaneOrder::RowLex ? j.i1 : j.i2;
    const int jb = order == HalfPlaneOrder::RowLex ? j.i2 : j.i1;
    const int ka = order == HalfPlaneOrder::RowLex ? k.i1 : k.i2;
    const int kb = order == HalfPlaneOrder::RowLex ? k.i2 : k.i1;
    if (ja != ka) return ja <=> ka;
    return jb <=> kb;
}

/// True when 0 strictly precedes j, i.e. j lies in the prediction half-plane.
inline bool zero_precedes(const Index2& j, HalfPlaneOrder order) {
    return lex_compare(Index2{0, 0}, j, order) == std::strong_ordering::less;
}

/// Truncation window for the half-plane coefficient set M. M1 bounds the
/// leading-coordinate lag, M2 the trailing one; under ColLex the member set
/// consists of the RowLex pairs with coordinates swapped.
struct HalfPlaneWindow {
    int M1 = 1;
    int M2 = 1;
    HalfPlaneOrder order = HalfPlaneOrder::RowLex;

    HalfPlaneWindow() = default;
    HalfPlaneWindow(int m1, int m2, HalfPlaneOrder ord = HalfPlaneOrder::RowLex)
        : M1(m1), M2(m2), order(ord) {
        if (M1 < 1 || M2 < 1) throw validation_error("HalfPlaneWindow: M1, M2 must be >= 1");
    }
    /// |M| = M2 (1 + 2 M1) irrespective of the ordering.
    std::int64_t size() const { return static_cast<std::int64_t>(M2) * (1 + 2 * static_cast<std::int64_t>(M1)); }
    friend bool operator==(const HalfPlaneWindow&, const HalfPlaneWindow&) = default;
};

/// Deterministic enumeration of the index set M: first the (0, k2) block with
/// k2 = 1..M2, then k1-major blocks with k2 = 1-M2..M2. Under ColLex every
/// pair has its coordinates swapped; the position of a lag in this list is
/// the canonical storage slot for coefficient fields.
inline std::vector<Index2> half_plane_indices(const HalfPlaneWindow& w) {
    std::vector<Index2> out;
    out.reserve(static_cast<std::size_t>(w.size()));
    const bool swap = w.order == HalfPlaneOrder::ColLex;
    auto push = [&](int a, int b) { out.push_back(swap ? Index2{b, a} : Index2{a, b}); };
    for (int k2 = 1; k2 <= w.M2; ++k2) push(0, k2);
    for (int k1 = 1; k1 <= w.M1; ++k1)
        for (int k2 = 1 - w.M2; k2 <= w.M2; ++k2) push(k1, k2);
    return out;
}

/// Rectangular lattice of real observations with an observation mask.
/// Row-major storage, 1-based accessors matching (t1, t2) index notation.
/// Masked-off values are carried but ignored by every estimator.
class Lattice2D {
public:
    Lattice2D() = default;
    explicit Lattice2D(GridDims d, double fill = 0.0, bool observed = true)
        : dims_(d),
          values_(static_cast<std::size_t>(d.size()), fill),
          mask_(static_cast<std::size_t>(d.size()), observed ? 1 : 0) {}

    Lattice2D(GridDims d, std::vector<double> values, std::vector<std::uint8_t> mask)
        : dims_(d), values_(std::move(values)), mask_(std::move(mask)) {
        if (values_.size() != static_cast<std::size_t>(dims_.size()) || mask_.size() != values_.size())
            throw validation_error("Lattice2D: values/mask length must equal n1*n2");
    }

    const GridDims& dims() const { return dims_; }
    bool in_bounds(int t1, int t2) const { return t1 >= 1 && t1 <= dims_.n1 && t2 >= 1 && t2 <= dims_.n2; }
    bool in_bounds(const Index2& t) const { return in_bounds(t.i1, t.i2); }

    double at(int t1, int t2) const { return values_[idx(t1, t2)]; }
    double at(const Index2& t) const { return at(t.i1, t.i2); }
    double& at(int t1, int t2) { return values_[idx(t1, t2)]; }

    bool observed(int t1, int t2) const { return mask_[idx(t1, t2)] != 0; }
    bool observed(const Index2& t) const { return observed(t.i1, t.i2); }
    void set(int t1, int t2, double v, bool obs = true) {
        values_[idx(t1, t2)] = v;
        mask_[idx(t1, t2)] = obs ? 1 : 0;
    }
    void set_mask(int t1, int t2, bool obs) { mask_[idx(t1, t2)] = obs ? 1 : 0; }

    const std::vector<double>& values() const { return values_; }
    const std::vector<std::uint8_t>& mask() const { return mask_; }

    bool fully_observed() const {
        for (auto m : mask_)
            if (!m) return false;
        return true;
    }

    std::int64_t observed_count() const {
        std::int64_t c = 0;
        for (auto m : mask_) c += m ? 1 : 0;
        return c;
    }

    Lattice2D transposed() const {
        Lattice2D t(GridDims(dims_.n2, dims_.n1));
        for (int r = 1; r <= dims_.n1; ++r)
            for (int c = 1; c <= dims_.n2; ++c) t.set(c, r, at(r, c), observed(r, c));
        return t;
    }

    /// Top-left sublattice rows 1..r, columns 1..c.
    Lattice2D top_left(int r, int c) const {
        if (r < 1 || r > dims_.n1 || c < 1 || c > dims_.n2)
            throw validation_error("top_left: sublattice exceeds lattice bounds");
        Lattice2D s(GridDims(r, c));
        for (int i = 1; i <= r; ++i)
            for (int j = 1; j <= c; ++j) s.set(i, j, at(i, j), observed(i, j));
        return s;
    }

private:
    std::size_t idx(int t1, int t2) const {
        if (!in_bounds(t1, t2)) throw validation_error("Lattice2D: index out of bounds");
        return static_cast<std::size_t>(t1 - 1) * dims_.n2 + (t2 - 1);
    }

    GridDims dims_{1, 1};
    std::vector<double> values_{0.0};
    std::vector<std::uint8_t> mask_{1};
};

// ---------------------------------------------------------------------------
// Lattice CSV: first line "rows,cols", then `rows` lines of comma-separated
// values; the token NA marks an unobserved cell.
// ---------------------------------------------------------------------------

inline void write_lattice_csv(std::ostream& os, const Lattice2D& x) {
    os << x.dims().n1 << "," << x.dims().n2 << "\n";
    os.precision(17);
    for (int r = 1; r <= x.dims().n1; ++r) {
        for (int c = 1; c <= x.dims().n2; ++c) {
            if (c > 1) os << ",";
            if (x.observed(r, c))
                os << x.at(r, c);
            else
                os << "NA";
        }
        os << "\n";
    }
}

inline Lattice2D read_lattice_csv(std::istream& is) {
    std::string line;
    // leading '#' lines carry annotations (e.g. grid orientation)
    do {
        if (!std::getline(is, line)) throw validation_error("lattice CSV: missing header");
    } while (!line.empty() && line[0] == '#');
    int n1 = 0, n2 = 0;
    {
        std::istringstream hs(line);
        char comma = 0;
        if (!(hs >> n1 >> comma >> n2) || comma != ',')
            throw validation_error("lattice CSV: header must be rows,cols");
    }
    Lattice2D x{GridDims(n1, n2)};
    for (int r = 1; r <= n1; ++r) {
        if (!std::getline(is, line)) throw validation_error("lattice CSV: unexpected end of file");
        std::istringstream ls(line);
        std::string tok;
        for (int c = 1; c <= n2; ++c) {
            if (!std::getline(ls, tok, ',')) throw validation_error("lattice CSV: short row");
            if (tok == "NA" || tok == "na") {
                x.set(r, c, 0.0, false);
            } else {
                double v = 0.0;
                try {
                    v = std::stod(tok);
                } catch (const std::exception&) {
                    throw validation_error("lattice CSV: bad value '" + tok + "'");
                }
                if (!std::isfinite(v)) throw validation_error("lattice CSV: non-finite value");
                x.set(r, c, v, true);
            }
        }
    }
    return x;
}

}  // namespace fexp

#endif  // FEXP_LATTICE_HPP
