#pragma once

#include "obcalc/core.hpp"
#include "obcalc/intmat.hpp"

#include <array>

namespace obcalc {

// Finitely generated chain complex of free abelian groups.
// boundaries[k] maps C_k -> C_{k-1} and has shape ranks[k-1] x ranks[k];
// boundaries[0] has shape 0 x ranks[0].
struct ChainComplex {
    std::vector<std::int64_t> ranks;
    std::vector<IntegerMatrix> boundaries;

    int top_degree() const { return static_cast<int>(ranks.size()) - 1; }
    // Zero-shaped matrices outside [0, top]; boundary(top+1) is 0 columns.
    IntegerMatrix boundary(int k) const;
};

ChainComplex make_complex(std::vector<std::int64_t> ranks,
                          std::vector<IntegerMatrix> boundaries);

// Shape mismatches and failures of boundary(k) * boundary(k+1) == 0.
std::vector<std::string> validate_complex(const ChainComplex& c);

// Chain complex of a handle decomposition: C_k is free on the index-k
// handles in attachment order, boundaries read off the incidence data.
ChainComplex chain_complex_of(const HandleDecomposition& h);

struct GradedPiece {
    std::int64_t free_rank = 0;
    std::vector<Int> torsion;  // d1 | d2 | ..., every entry >= 2

    bool trivial() const { return free_rank == 0 && torsion.empty(); }
    bool operator==(const GradedPiece&) const = default;
    std::string to_string() const;  // "Z^2 + Z/2 + Z/4", "0"
};

// Graded abelian group; only nontrivial degrees are stored, so structural
// equality is equality of graded pieces in every degree.
struct GradedAbelianGroup {
    std::map<int, GradedPiece> pieces;

    GradedPiece piece(int degree) const;
    void set(int degree, GradedPiece p);

    bool operator==(const GradedAbelianGroup&) const = default;
    std::string to_string() const;  // "H_0 = Z, H_1 = Z/2"
};

// Homology over Z via Smith normal form of the boundary maps.
GradedAbelianGroup homology_of_complex(const ChainComplex& c);

// Closed forms for the handle decompositions the calculus produces.  All
// agree with homology_of_complex on the corresponding complexes.

// Natural page: free of rank mu_i in degree i (rank 1 in degree 0).
GradedAbelianGroup page_homology(const Profile& p);

// Double of a natural page: counts doubled, boundaries still zero.
GradedAbelianGroup double_homology_natural(const Profile& p);

// Total space of the open book with trivial monodromy on a natural page:
// the double of the half open book.
GradedAbelianGroup open_book_homology_trivial(const Profile& p);

// Basis labels in the two displayed degrees of the double of the
// k-stabilization page.  Degree k-1 is spanned by the sphere factor of the
// first summand and the double of its cocore; degree n-k by the double of
// the second summand's cocore and its sphere factor.
struct DoubleBasis {
    int degree = 0;
    std::array<std::string, 2> labels;
};

DoubleBasis tau_basis(int n, int k, int degree);

// Action of the built-in twist on H_degree of the double:
// degree k-1 -> [[1, 1], [0, sign]], degree n-k -> identity.
IntegerMatrix tau_action_on_double(int n, int k, int degree, int sign);

struct DistinguishResult {
    bool distinguished = false;
    int witness_degree = -1;
    // Matrices of both twists at both compared degrees, for reporting:
    // entries are {degree, action of tau_k, action of tau_{n-k+1}}.
    struct Row {
        int degree;
        IntegerMatrix first, second;
    };
    std::vector<Row> rows;
};

// tau_k and tau_{n-k+1} act on the homology of the same double; they are
// told apart by where the action is the identity.  2 <= k <= n/2, n >= 4.
DistinguishResult distinguish_monodromies(int n, int k, int sign = +1);

}  // namespace obcalc
