#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

#include "fexp/ingest.hpp"
#include "test_util.hpp"

using namespace fexp;
using testutil::separable_field;

TEST_CASE("grid_points: means, mask, half-open cells with closed max edge") {
    const GridSpec spec(0.0, 2.0, 0.0, 3.0, 2, 3);
    std::vector<PointRecord> pts = {
        {0.5, 0.5, 1.0},   // cell (1,1)
        {0.5, 1.5, 2.0},   // cell (1,2)
        {1.5, 2.5, 7.0},   // cell (2,3)
        {1.5, 2.5, 9.0},   // cell (2,3): mean 8
        {2.0, 3.0, 4.0},   // max corner maps to the last cell (2,3)
        {9.0, 9.0, 100.0}  // outside: ignored
    };
    const Lattice2D g = grid_points(pts, spec);
    CHECK(g.at(1, 1) == 1.0);
    CHECK(g.at(1, 2) == 2.0);
    CHECK(g.at(2, 3) == Catch::Approx((7.0 + 9.0 + 4.0) / 3.0));
    CHECK_FALSE(g.observed(1, 3));
    CHECK_FALSE(g.observed(2, 1));
    CHECK_FALSE(g.observed(2, 2));

    // permutation invariance
    std::vector<PointRecord> shuffled = {pts[4], pts[1], pts[5], pts[3], pts[0], pts[2]};
    const Lattice2D g2 = grid_points(shuffled, spec);
    for (int r = 1; r <= 2; ++r)
        for (int c = 1; c <= 3; ++c) {
            CHECK(g2.observed(r, c) == g.observed(r, c));
            if (g.observed(r, c)) CHECK(g2.at(r, c) == Catch::Approx(g.at(r, c)));
        }

    // empty input yields an all-masked lattice
    CHECK(grid_points({}, spec).observed_count() == 0);
}

TEST_CASE("grid_points fixture mirroring the workflow counts") {
    // 5259 points over a 14 x 23 grid with 8 designated empty cells
    const GridSpec spec(33.75, 34.17, 117.75, 118.44, 14, 23);
    const std::vector<Index2> holes = {{8, 20}, {8, 21}, {8, 22}, {4, 21},
                                       {7, 22}, {9, 23}, {6, 23}, {1, 23}};
    Xoshiro256pp rng(20);
    std::vector<PointRecord> pts;
    const double dlat = (spec.lat_max - spec.lat_min) / spec.rows;
    const double dlon = (spec.lon_max - spec.lon_min) / spec.cols;
    while (pts.size() < 5259) {
        const int r = 1 + static_cast<int>(rng.next() % spec.rows);
        const int c = 1 + static_cast<int>(rng.next() % spec.cols);
        if (std::find(holes.begin(), holes.end(), Index2{r, c}) != holes.end()) continue;
        pts.push_back(PointRecord{spec.lat_min + (r - 1 + 0.5) * dlat,
                                  spec.lon_min + (c - 1 + 0.5) * dlon, rng.uniform01()});
    }
    const Lattice2D g = grid_points(pts, spec);
    CHECK(g.dims().size() == 322);
    CHECK(g.observed_count() == 322 - 8);
    for (const Index2& h : holes) CHECK_FALSE(g.observed(h));
}

TEST_CASE("demean: constant field, idempotence, mask handling") {
    Lattice2D x{GridDims(3, 3), 4.2};
    x.set(2, 2, -123.0, false);  // masked value must be ignored and preserved
    auto [y, mean] = demean(x);
    CHECK(mean == Catch::Approx(4.2));
    for (int r = 1; r <= 3; ++r)
        for (int c = 1; c <= 3; ++c)
            if (y.observed(r, c)) CHECK(y.at(r, c) == Catch::Approx(0.0).margin(1e-14));
    CHECK_FALSE(y.observed(2, 2));
    CHECK(y.at(2, 2) == -123.0);

    auto [z, mean2] = demean(y);
    CHECK(mean2 == Catch::Approx(0.0).margin(1e-14));

    Lattice2D allmasked{GridDims(2, 2), 0.0, false};
    CHECK_THROWS_AS(demean(allmasked), validation_error);
}

TEST_CASE("sequential_predict: constant field predicts the stored mean") {
    // A constant observed field demeans to zero; the fitted spectrum is flat,
    // all coefficients vanish, and every prediction returns the mean.
    Lattice2D x{GridDims(8, 10), 5.5};
    for (const Index2 hole : {Index2{3, 9}, Index2{6, 10}}) x.set(hole.i1, hole.i2, 0.0, false);
    SequentialOptions opts;
    opts.fit_cols = 8;
    const auto out = sequential_predict(x, FexpSource{1, 2}, {{3, 9}, {6, 10}}, opts);
    REQUIRE(out.size() == 2);
    for (const auto& p : out) CHECK(p.value == Catch::Approx(5.5).margin(1e-9));

    // the AR route on a constant field fits all zeros: singular normal
    // equations surface as a numerical error
    CHECK_THROWS_AS(sequential_predict(x, FitSource{ArSource{ARWindow(0, 1, 0, 1)}},
                                       std::vector<Index2>{{3, 9}}, opts),
                    numerical_error);
}

TEST_CASE("sequential_predict: empty cell list does no fitting work") {
    Lattice2D x{GridDims(4, 4), 0.0, false};  // nothing observed at all
    x.set(1, 1, 1.0, true);
    const auto out = sequential_predict(x, FexpSource{1, 1}, {});
    CHECK(out.empty());
}

TEST_CASE("sequential_predict: shift equivariance and mask-value invariance") {
    const GridDims d(10, 14);
    Lattice2D x = separable_field(0.5, 0.4, d, 606);
    const std::vector<Index2> holes = {{4, 12}, {7, 13}, {2, 14}};
    for (const Index2& h : holes) x.set_mask(h.i1, h.i2, false);
    SequentialOptions opts;
    opts.fit_cols = 10;

    const auto base = sequential_predict(x, FexpSource{1, 1}, holes, opts);

    Lattice2D shifted = x;
    for (int r = 1; r <= d.n1; ++r)
        for (int c = 1; c <= d.n2; ++c) shifted.set(r, c, x.at(r, c) + 10.0, x.observed(r, c));
    const auto moved = sequential_predict(shifted, FexpSource{1, 1}, holes, opts);
    REQUIRE(moved.size() == base.size());
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(moved[i].value == Catch::Approx(base[i].value + 10.0).margin(1e-9));

    Lattice2D garbage = x;
    for (const Index2& h : holes) garbage.set(h.i1, h.i2, 1e6, false);
    const auto same = sequential_predict(garbage, FexpSource{1, 1}, holes, opts);
    for (std::size_t i = 0; i < base.size(); ++i) CHECK(same[i].value == base[i].value);

    // AR source runs the same workflow
    const auto ar = sequential_predict(x, FitSource{ArSource{ARWindow(0, 1, 0, 1)}}, holes, opts);
    CHECK(ar.size() == holes.size());
}

TEST_CASE("sequential_predict rejects an unfittable sublattice") {
    Lattice2D x{GridDims(6, 8), 1.0};
    x.set_mask(2, 2, false);
    CHECK_THROWS_AS(sequential_predict(x, FexpSource{1, 1}, {{2, 2}}, SequentialOptions{0, 4}),
                    validation_error);
}

TEST_CASE("sequential_predict recovers missing cells of a separable field") {
    // single missing cell: prediction within 2 innovation standard deviations
    // of the truth in at least 95% of replications
    const GridDims d(20, 24);
    int within = 0;
    const int reps = 200;
    for (int r = 0; r < reps; ++r) {
        Lattice2D x = separable_field(0.5, 0.4, d, derive_seed(55, 2, r));
        const Index2 hole{14, 22};
        const double truth = x.at(hole.i1, hole.i2);
        x.set_mask(hole.i1, hole.i2, false);
        SequentialOptions opts;
        opts.fit_cols = 20;
        const auto out = sequential_predict(x, FitSource{ArSource{ARWindow(0, 1, 0, 1)}}, {hole}, opts);
        REQUIRE(out.size() == 1);
        if (std::abs(out[0].value - truth) <= 2.0) ++within;
    }
    CHECK(within >= static_cast<int>(0.95 * reps));
}

TEST_CASE("points CSV round trip") {
    std::vector<PointRecord> pts = {{33.9, 118.1, 2.5}, {34.0, 118.0, -1.0}};
    std::ostringstream os;
    write_points_csv(os, pts);
    std::istringstream is(os.str());
    const auto back = read_points_csv(is);
    REQUIRE(back.size() == 2);
    CHECK(back[0].lat == pts[0].lat);
    CHECK(back[1].value == pts[1].value);
    std::istringstream bad("lat,lon,value\n1,2,nan_or_so\n");
    CHECK_THROWS_AS(read_points_csv(bad), validation_error);
    std::istringstream noheader("1,2,3\n");
    CHECK_THROWS_AS(read_points_csv(noheader), validation_error);
}
