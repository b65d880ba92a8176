#include "obcalc/homology.hpp"

#include <algorithm>
#include <map>

namespace obcalc {

IntegerMatrix ChainComplex::boundary(int k) const {
    const int top = top_degree();
    if (k >= 1 && k <= top) return boundaries[static_cast<std::size_t>(k)];
    if (k == 0 && top >= 0) return IntegerMatrix(0, static_cast<std::size_t>(ranks[0]));
    if (k == top + 1 && top >= 0)
        return IntegerMatrix(static_cast<std::size_t>(ranks[static_cast<std::size_t>(top)]), 0);
    return IntegerMatrix(0, 0);
}

ChainComplex make_complex(std::vector<std::int64_t> ranks,
                          std::vector<IntegerMatrix> boundaries) {
    ChainComplex c;
    c.ranks = std::move(ranks);
    for (std::int64_t r : c.ranks)
        if (r < 0) throw CalculusError("bad-complex", "negative chain rank");

    // Accept maps for degrees 1..top or 0..top; degree 0 is always the
    // empty map.
    if (boundaries.size() + 1 == c.ranks.size()) {
        c.boundaries.emplace_back(0, c.ranks.empty() ? 0 : static_cast<std::size_t>(c.ranks[0]));
        for (IntegerMatrix& b : boundaries) c.boundaries.push_back(std::move(b));
    } else if (boundaries.size() == c.ranks.size()) {
        c.boundaries = std::move(boundaries);
    } else {
        throw CalculusError("bad-complex", "boundary map count does not match rank count");
    }

    auto problems = validate_complex(c);
    if (!problems.empty()) throw CalculusError("bad-complex", problems.front());
    return c;
}

std::vector<std::string> validate_complex(const ChainComplex& c) {
    std::vector<std::string> out;
    const int top = c.top_degree();
    if (c.boundaries.size() != c.ranks.size()) {
        out.push_back("boundary map count does not match rank count");
        return out;
    }
    for (int k = 0; k <= top; ++k) {
        const IntegerMatrix& b = c.boundaries[static_cast<std::size_t>(k)];
        const std::size_t want_rows =
            k == 0 ? 0 : static_cast<std::size_t>(c.ranks[static_cast<std::size_t>(k) - 1]);
        const std::size_t want_cols = static_cast<std::size_t>(c.ranks[static_cast<std::size_t>(k)]);
        if (b.rows() != want_rows || b.cols() != want_cols)
            out.push_back("boundary " + std::to_string(k) + " has shape " +
                          std::to_string(b.rows()) + "x" + std::to_string(b.cols()) +
                          ", expected " + std::to_string(want_rows) + "x" +
                          std::to_string(want_cols));
    }
    if (!out.empty()) return out;
    for (int k = 1; k < top; ++k)
        if (!(c.boundary(k) * c.boundary(k + 1)).is_zero())
            out.push_back("boundary composite at degree " + std::to_string(k + 1) +
                          " is nonzero");
    return out;
}

ChainComplex chain_complex_of(const HandleDecomposition& h) {
    const std::vector<std::int64_t> ranks = full_counts(h);

    // Column/row order of each chain group is the attachment order of the
    // handles of that index.
    std::map<std::string, std::pair<int, std::size_t>> slot;  // id -> (index, position)
    {
        std::map<int, std::size_t> next;
        for (const Handle& hd : h.handles) slot[hd.id] = {hd.index, next[hd.index]++};
    }

    ChainComplex c;
    c.ranks = ranks;
    c.boundaries.emplace_back(0, ranks.empty() ? 0 : static_cast<std::size_t>(ranks[0]));
    for (std::size_t k = 1; k < ranks.size(); ++k)
        c.boundaries.emplace_back(static_cast<std::size_t>(ranks[k - 1]),
                                  static_cast<std::size_t>(ranks[k]));

    for (const auto& [pair, coeff] : h.incidence) {
        auto from = slot.find(pair.first);
        auto to = slot.find(pair.second);
        if (from == slot.end() || to == slot.end())
            throw CalculusError("unknown-handle", "incidence names a handle that does not exist");
        const int k = from->second.first;
        if (k != to->second.first + 1)
            throw CalculusError("incidence-index-step",
                                "incidence requires index(from) == index(to) + 1");
        c.boundaries[static_cast<std::size_t>(k)].at(to->second.second, from->second.second) =
            coeff;
    }
    return c;
}

std::string GradedPiece::to_string() const {
    if (trivial()) return "0";
    std::string out;
    if (free_rank > 0) {
        out = "Z";
        if (free_rank > 1) out += "^" + std::to_string(free_rank);
    }
    for (const Int& d : torsion) {
        if (!out.empty()) out += " + ";
        out += "Z/" + d.str();
    }
    return out;
}

GradedPiece GradedAbelianGroup::piece(int degree) const {
    auto it = pieces.find(degree);
    return it == pieces.end() ? GradedPiece{} : it->second;
}

void GradedAbelianGroup::set(int degree, GradedPiece p) {
    if (p.trivial())
        pieces.erase(degree);
    else
        pieces[degree] = std::move(p);
}

std::string GradedAbelianGroup::to_string() const {
    if (pieces.empty()) return "0";
    std::string out;
    for (const auto& [deg, p] : pieces) {
        if (!out.empty()) out += ", ";
        out += "H_" + std::to_string(deg) + " = " + p.to_string();
    }
    return out;
}

GradedAbelianGroup homology_of_complex(const ChainComplex& c) {
    auto problems = validate_complex(c);
    if (!problems.empty())
        throw CalculusError("invalid-complex", problems.front());

    GradedAbelianGroup out;
    const int top = c.top_degree();
    for (int k = 0; k <= top; ++k) {
        const std::vector<Int> below = invariant_factors(c.boundary(k));
        const std::vector<Int> above = invariant_factors(c.boundary(k + 1));
        GradedPiece p;
        p.free_rank = c.ranks[static_cast<std::size_t>(k)] -
                      static_cast<std::int64_t>(below.size()) -
                      static_cast<std::int64_t>(above.size());
        if (p.free_rank < 0)
            throw InternalError("negative free rank in homology computation");
        for (const Int& d : above)
            if (d > 1) p.torsion.push_back(d);
        out.set(k, std::move(p));
    }
    return out;
}

GradedAbelianGroup page_homology(const Profile& p) {
    GradedAbelianGroup out;
    const std::vector<std::int64_t> counts = page_counts(p);
    for (std::size_t k = 0; k < counts.size(); ++k)
        out.set(static_cast<int>(k), GradedPiece{counts[k], {}});
    return out;
}

GradedAbelianGroup double_homology_natural(const Profile& p) {
    GradedAbelianGroup out;
    const std::vector<std::int64_t> counts = double_counts(page_counts(p));
    for (std::size_t k = 0; k < counts.size(); ++k)
        out.set(static_cast<int>(k), GradedPiece{counts[k], {}});
    return out;
}

GradedAbelianGroup open_book_homology_trivial(const Profile& p) {
    // Double of the half open book: the page counts pushed up one dimension
    // (two empty top slots), then doubled.
    std::vector<std::int64_t> hob = page_counts(p);
    hob.push_back(0);
    const std::vector<std::int64_t> counts = double_counts(hob);
    GradedAbelianGroup out;
    for (std::size_t k = 0; k < counts.size(); ++k)
        out.set(static_cast<int>(k), GradedPiece{counts[k], {}});
    return out;
}

namespace {

void check_tau_args(int n, int k) {
    if (n < 3)
        throw CalculusError("bad-dimension", "open book dimension must be at least 3");
    if (k < 2 || k > n - 1)
        throw CalculusError("k-out-of-range",
                            "twist index " + std::to_string(k) + " outside [2, " +
                                std::to_string(n - 1) + "]");
    if (k - 1 == n - k)
        throw CalculusError("degenerate-degrees",
                            "degrees k-1 and n-k coincide for n = " + std::to_string(n) +
                                ", k = " + std::to_string(k));
}

}  // namespace

DoubleBasis tau_basis(int n, int k, int degree) {
    check_tau_args(n, k);
    if (degree == k - 1)
        return DoubleBasis{degree, {"lambda", "mu"}};
    if (degree == n - k)
        return DoubleBasis{degree, {"alpha", "beta"}};
    throw CalculusError("degree-out-of-range",
                        "twist acts in degrees " + std::to_string(k - 1) + " and " +
                            std::to_string(n - k) + ", not " + std::to_string(degree));
}

IntegerMatrix tau_action_on_double(int n, int k, int degree, int sign) {
    check_tau_args(n, k);
    if (sign != 1 && sign != -1)
        throw CalculusError("bad-sign", "framing sign must be +1 or -1");
    if (degree == k - 1) {
        // lambda -> lambda, mu -> lambda + sign * mu.
        IntegerMatrix m(2, 2);
        m.at(0, 0) = 1;
        m.at(0, 1) = 1;
        m.at(1, 0) = 0;
        m.at(1, 1) = sign;
        return m;
    }
    if (degree == n - k) return IntegerMatrix::identity(2);
    throw CalculusError("degree-out-of-range",
                        "twist acts in degrees " + std::to_string(k - 1) + " and " +
                            std::to_string(n - k) + ", not " + std::to_string(degree));
}

DistinguishResult distinguish_monodromies(int n, int k, int sign) {
    if (n < 4)
        throw CalculusError("k-out-of-range", "distinguishing needs n >= 4");
    if (k < 2 || 2 * k > n)
        throw CalculusError("k-out-of-range",
                            "twist index " + std::to_string(k) + " outside [2, " +
                                std::to_string(n / 2) + "]");
    const int other = n - k + 1;  // the twist whose double is the same manifold

    DistinguishResult out;
    for (int degree : {k - 1, n - k}) {
        DistinguishResult::Row row;
        row.degree = degree;
        row.first = tau_action_on_double(n, k, degree, sign);
        row.second = tau_action_on_double(n, other, degree, sign);
        if (row.first.is_identity() != row.second.is_identity() && !out.distinguished) {
            out.distinguished = true;
            out.witness_degree = degree;
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

}  // namespace obcalc
