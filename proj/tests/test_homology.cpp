#include <doctest.h>

#include "obcalc/homology.hpp"
#include "obcalc/moves.hpp"

using namespace obcalc;
using i64v = std::vector<std::int64_t>;

namespace {

IntegerMatrix m1(int v) {
    IntegerMatrix m(1, 1);
    m.at(0, 0) = v;
    return m;
}

GradedPiece free_rank(std::int64_t r) { return GradedPiece{r, {}}; }

}  // namespace

TEST_CASE("chain complex shapes and validation") {
    const ChainComplex c = make_complex({1, 2, 1}, {IntegerMatrix(1, 2), IntegerMatrix(2, 1)});
    CHECK(c.top_degree() == 2);
    CHECK(c.boundary(0).rows() == 0);
    CHECK(c.boundary(0).cols() == 1);
    CHECK(c.boundary(1).rows() == 1);
    CHECK(c.boundary(1).cols() == 2);
    CHECK(c.boundary(3).rows() == 1);
    CHECK(c.boundary(3).cols() == 0);
    CHECK(validate_complex(c).empty());

    CHECK_THROWS_AS(make_complex({1, 2}, {IntegerMatrix(2, 2)}), CalculusError);
    // A nonzero composite is rejected on construction...
    CHECK_THROWS_AS(make_complex({1, 1, 1}, {m1(1), m1(1)}), CalculusError);

    // ...and reported by validation when assembled by hand.
    ChainComplex bad;
    bad.ranks = {1, 1, 1};
    bad.boundaries = {IntegerMatrix(0, 1), m1(1), m1(1)};
    CHECK_FALSE(validate_complex(bad).empty());
}

TEST_CASE("chain complex of a natural page has zero boundaries") {
    const ChainComplex c = chain_complex_of(natural_page(5, {1, 2, 0}));
    CHECK(c.ranks == i64v{1, 1, 2, 0, 0});
    for (int k = 1; k <= c.top_degree(); ++k) CHECK(c.boundary(k).is_zero());
    CHECK(validate_complex(c).empty());
}

TEST_CASE("chain complex reads incidence into the boundary maps") {
    HandleDecomposition h = natural_page(4, {2, 1});
    h.dependencies.insert({"h2_0", "h1_0"});
    h.dependencies.insert({"h2_0", "h1_1"});
    h.incidence[{"h2_0", "h1_0"}] = 3;
    h.incidence[{"h2_0", "h1_1"}] = -1;

    const ChainComplex c = chain_complex_of(h);
    REQUIRE(c.ranks == i64v{1, 2, 1, 0});
    const IntegerMatrix d2 = c.boundary(2);
    REQUIRE(d2.rows() == 2);
    REQUIRE(d2.cols() == 1);
    CHECK(d2.at(0, 0) == 3);   // row order follows attachment order
    CHECK(d2.at(1, 0) == -1);
    CHECK(validate_complex(c).empty());
}

TEST_CASE("graded piece formatting") {
    CHECK(free_rank(0).to_string() == "0");
    CHECK(free_rank(1).to_string() == "Z");
    CHECK(free_rank(2).to_string() == "Z^2");
    CHECK(GradedPiece{1, {2}}.to_string() == "Z + Z/2");
    CHECK(GradedPiece{0, {2, 4}}.to_string() == "Z/2 + Z/4");
    CHECK(GradedPiece{0, {3}}.trivial() == false);
    CHECK(free_rank(0).trivial());
}

TEST_CASE("homology of explicit small complexes") {
    SUBCASE("circle") {
        const GradedAbelianGroup g = homology_of_complex(make_complex({1, 1}, {m1(0)}));
        CHECK(g.piece(0) == free_rank(1));
        CHECK(g.piece(1) == free_rank(1));
    }
    SUBCASE("torsion from a degree-2 map") {
        const GradedAbelianGroup g = homology_of_complex(make_complex({1, 1}, {m1(2)}));
        CHECK(g.piece(0) == GradedPiece{0, {2}});
        CHECK(g.piece(1).trivial());
    }
    SUBCASE("sphere from a canceling pair") {
        const GradedAbelianGroup g =
            homology_of_complex(make_complex({1, 1, 1, 1}, {m1(0), m1(1), m1(0)}));
        CHECK(g.piece(0) == free_rank(1));
        CHECK(g.piece(1).trivial());
        CHECK(g.piece(2).trivial());
        CHECK(g.piece(3) == free_rank(1));
        CHECK(g.to_string() == "H_0 = Z, H_3 = Z");
    }
    SUBCASE("mixed torsion orders combine through the divisor chain") {
        // d: Z^2 -> Z^2 with diagonal (2, 12): invariant factors 2 | 12.
        IntegerMatrix d(2, 2);
        d.at(0, 0) = 2;
        d.at(1, 1) = 12;
        const GradedAbelianGroup g = homology_of_complex(make_complex({2, 2}, {d}));
        CHECK(g.piece(0) == GradedPiece{0, {2, 12}});
        CHECK(g.piece(1).trivial());
    }
    SUBCASE("rejects an inconsistent complex") {
        ChainComplex bad;
        bad.ranks = {1, 1, 1};
        bad.boundaries = {IntegerMatrix(0, 1), m1(1), m1(1)};
        CHECK_THROWS_AS(homology_of_complex(bad), CalculusError);
    }
}

TEST_CASE("page homology closed form") {
    const GradedAbelianGroup g = page_homology(Profile{5, {0, 1, 0}});
    CHECK(g.piece(0) == free_rank(1));
    CHECK(g.piece(1).trivial());
    CHECK(g.piece(2) == free_rank(1));
    CHECK(g.piece(3).trivial());

    const GradedAbelianGroup big = page_homology(Profile{6, {2, 0, 3, 1}});
    CHECK(big.piece(1) == free_rank(2));
    CHECK(big.piece(3) == free_rank(3));
    CHECK(big.piece(4) == free_rank(1));
}

TEST_CASE("closed forms agree with the chain complex route") {
    for (int n = 3; n <= 7; ++n) {
        i64v counts(static_cast<std::size_t>(n) - 2);
        for (std::size_t i = 0; i < counts.size(); ++i)
            counts[i] = static_cast<std::int64_t>((2 * i + n) % 4);
        const Profile p{n, counts};
        CHECK(page_homology(p) == homology_of_complex(chain_complex_of(natural_page(n, counts))));
    }
}

TEST_CASE("double homology of a natural page") {
    // Page (1, 0, 1) at n = 5 has counts (1, 1, 0, 1, 0); the double mirrors
    // every slot, giving (1, 2, 0, 2, 1).
    const GradedAbelianGroup g = double_homology_natural(Profile{5, {1, 0, 1}});
    CHECK(g.piece(0) == free_rank(1));
    CHECK(g.piece(1) == free_rank(2));
    CHECK(g.piece(2).trivial());
    CHECK(g.piece(3) == free_rank(2));
    CHECK(g.piece(4) == free_rank(1));
}

TEST_CASE("total space homology with trivial monodromy") {
    // Annulus page at n = 3: S^1 x S^2 has one Z in every degree.
    const GradedAbelianGroup g = open_book_homology_trivial(Profile{3, {1}});
    for (int d = 0; d <= 3; ++d) CHECK(g.piece(d) == free_rank(1));

    // Disk pages give spheres: only the poles survive.
    for (int n = 3; n <= 6; ++n) {
        const GradedAbelianGroup s =
            open_book_homology_trivial(Profile{n, i64v(static_cast<std::size_t>(n) - 2, 0)});
        CHECK(s.piece(0) == free_rank(1));
        CHECK(s.piece(n) == free_rank(1));
        for (int d = 1; d < n; ++d) CHECK(s.piece(d).trivial());
    }
}

TEST_CASE("tau basis names two classes per displayed degree") {
    const DoubleBasis low = tau_basis(5, 2, 1);
    CHECK(low.degree == 1);
    CHECK(low.labels[0] != low.labels[1]);
    const DoubleBasis high = tau_basis(5, 2, 3);
    CHECK(high.degree == 3);

    CHECK_THROWS_AS(tau_basis(5, 2, 2), CalculusError);  // degree not displayed
    CHECK_THROWS_AS(tau_basis(5, 7, 1), CalculusError);  // k out of range
    CHECK_THROWS_AS(tau_basis(5, 3, 2), CalculusError);  // k-1 == n-k degenerates
}

TEST_CASE("tau action matrices") {
    IntegerMatrix low(2, 2);
    low.at(0, 0) = 1;
    low.at(0, 1) = 1;
    low.at(1, 1) = 1;
    CHECK(tau_action_on_double(5, 2, 1, +1) == low);
    CHECK(tau_action_on_double(5, 2, 3, +1).is_identity());

    IntegerMatrix neg(2, 2);
    neg.at(0, 0) = 1;
    neg.at(0, 1) = 1;
    neg.at(1, 1) = -1;
    CHECK(tau_action_on_double(5, 2, 1, -1) == neg);

    CHECK(tau_action_on_double(6, 2, 1, +1) == low);
    CHECK(tau_action_on_double(6, 2, 4, +1).is_identity());

    CHECK_THROWS_AS(tau_action_on_double(5, 2, 2, +1), CalculusError);
    CHECK_THROWS_AS(tau_action_on_double(5, 2, 1, 0), CalculusError);

    // The action is unimodular, as any monodromy action must be.
    const Int det = tau_action_on_double(7, 3, 2, -1).determinant();
    CHECK((det == 1 || det == -1));
}

TEST_CASE("twin twists are distinguished by where they act trivially") {
    const DistinguishResult dr = distinguish_monodromies(5, 2);
    CHECK(dr.distinguished);
    CHECK(dr.witness_degree == 1);
    REQUIRE(dr.rows.size() == 2);
    CHECK(dr.rows[0].degree == 1);
    CHECK_FALSE(dr.rows[0].first.is_identity());
    CHECK(dr.rows[0].second.is_identity());
    CHECK(dr.rows[1].degree == 3);
    CHECK(dr.rows[1].first.is_identity());
    CHECK_FALSE(dr.rows[1].second.is_identity());

    for (int n = 4; n <= 12; ++n)
        for (int k = 2; 2 * k <= n; ++k)
            for (int sign : {+1, -1}) {
                const DistinguishResult r = distinguish_monodromies(n, k, sign);
                CHECK(r.distinguished);
                CHECK(r.witness_degree == k - 1);
            }

    CHECK_THROWS_AS(distinguish_monodromies(3, 2), CalculusError);
    CHECK_THROWS_AS(distinguish_monodromies(6, 4), CalculusError);  // 2k > n
    CHECK_THROWS_AS(distinguish_monodromies(5, 1), CalculusError);
}

TEST_CASE("graded group parked values") {
    GradedAbelianGroup g;
    CHECK(g.piece(3).trivial());
    g.set(2, GradedPiece{1, {3}});
    g.set(4, free_rank(0));  // storing a trivial piece keeps the map clean
    CHECK(g.piece(2) == GradedPiece{1, {3}});
    CHECK(g.pieces.count(4) == 0);
    CHECK(g.to_string() == "H_2 = Z + Z/3");
}
