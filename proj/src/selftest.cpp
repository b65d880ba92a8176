#include "obcalc/selftest.hpp"

#include "obcalc/document.hpp"
#include "obcalc/homology.hpp"
#include "obcalc/moves.hpp"

#include <json.hpp>

#include <algorithm>
#include <functional>
#include <random>

namespace obcalc::selftest {

namespace {

// Rolling assertion counter for one suite; keeps the first failure for the
// report so a red suite says what actually broke.
struct Tally {
    int total = 0;
    int failures = 0;
    std::string first;

    void check(bool ok, const std::string& what) {
        ++total;
        if (!ok && failures++ == 0) first = what;
    }
};

int rint(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

Profile random_profile(std::mt19937_64& rng, int lo_n, int hi_n, int hi_count = 9) {
    Profile p;
    p.n = rint(rng, lo_n, hi_n);
    p.counts.resize(static_cast<std::size_t>(p.n) - 2);
    for (auto& c : p.counts) c = rint(rng, 0, hi_count);
    return p;
}

std::vector<std::int64_t> tail_reversed(std::vector<std::int64_t> v) {
    if (v.size() > 2) std::reverse(v.begin() + 1, v.end());
    return v;
}

std::string counts_str(const std::vector<std::int64_t>& v) {
    std::string out = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(v[i]);
    }
    return out + ")";
}

std::int64_t sign_pow(int e) { return e % 2 == 0 ? 1 : -1; }

bool throws_code(const std::string& code, const std::function<void()>& f) {
    try {
        f();
    } catch (const CalculusError& e) {
        return e.code() == code;
    } catch (...) {
        return false;
    }
    return false;
}

// ---- suites -----------------------------------------------------------------

void suite_validate(Tally& t, std::mt19937_64& rng, bool) {
    for (int it = 0; it < 40; ++it) {
        const Profile p = random_profile(rng, 3, 9);
        t.check(validate_decomposition(natural_page(p.n, p.counts)).empty(),
                "natural page flagged invalid at n=" + std::to_string(p.n));
        t.check(validate_open_book(natural_book(p.n, p.counts)).empty(),
                "natural book flagged invalid at n=" + std::to_string(p.n));
    }

    auto has_code = [](const std::vector<Violation>& vs, const std::string& code) {
        for (const Violation& v : vs)
            if (v.invariant == code) return true;
        return false;
    };

    {
        HandleDecomposition h = natural_page(4, {1, 0});
        h.handles.push_back(h.handles.back());
        t.check(has_code(validate_decomposition(h), "duplicate-id"), "duplicate id missed");
    }
    {
        HandleDecomposition h = natural_page(4, {1, 1});
        std::swap(h.handles[1], h.handles[2]);
        t.check(has_code(validate_decomposition(h), "order-nondecreasing"),
                "index order violation missed");
    }
    {
        HandleDecomposition h = natural_page(4, {1, 1});
        h.incidence[{"h2_0", "h1_0"}] = 1;  // support not inside dependencies
        t.check(has_code(validate_decomposition(h), "incidence-outside-dependencies"),
                "incidence without dependency missed");
    }
    {
        HandleDecomposition h = natural_page(4, {2, 0});
        h.dependencies.insert({"h1_0", "h1_1"});  // attached earlier, not after
        t.check(has_code(validate_decomposition(h), "dependency-order"),
                "dependency against attachment order missed");
    }
    {
        HandleDecomposition h = natural_page(5, {1, 1, 0});
        h.dependencies.insert({"h2_0", "h1_0"});
        h.incidence[{"h2_0", "h1_0"}] = 0;
        t.check(has_code(validate_decomposition(h), "incidence-zero"),
                "zero incidence coefficient missed");
    }
    {
        HandleDecomposition h = natural_page(3, {1});
        h.handles.push_back({"top", 2, true, ""});
        t.check(has_code(validate_decomposition(h), "top-handle-forbidden"),
                "top handle on a bounded page missed");
    }
    {
        HandleDecomposition h = natural_page(4, {1, 0});
        h.handles.erase(h.handles.begin());
        t.check(has_code(validate_decomposition(h), "zero-handle-count"),
                "missing 0-handle missed");
    }
    {
        // d(d(x)) != 0: one unit path from the 2-handle down to the 0-handle.
        HandleDecomposition h;
        h.dimension = 3;
        h.handles = {{"z", 0, true, ""}, {"a", 1, true, ""}, {"b", 2, true, ""}};
        h.dependencies = {{"a", "z"}, {"b", "a"}};
        h.incidence = {{{"a", "z"}, 1}, {{"b", "a"}, 1}};
        t.check(has_code(validate_decomposition(h), "boundary-squared"),
                "non-vanishing composite boundary missed");
    }

    {
        OpenBookDoc ob = natural_book(5, {1, 1, 1});
        t.check(check_selection(ob.page, Selection{{"ghost"}}, 5).reason == "unknown-handle",
                "unknown selection id missed");
        t.check(check_selection(ob.page, Selection{{"h1_0"}}, 5).reason == "index-out-of-range",
                "low selection index missed");
        HandleDecomposition page = ob.page;
        page.dependencies.insert({"h3_0", "h2_0"});
        t.check(check_selection(page, Selection{{"h2_0"}}, 5).reason == "not-upward-closed",
                "upward closure breach missed");
        t.check(upward_closure(page, {"h2_0"}).ids.count("h3_0") == 1,
                "upward closure does not pull in the dependent handle");
        t.check(is_valid_selection(page, upward_closure(page, {"h2_0"}), 5),
                "upward closure is not a valid selection");
    }
    {
        OpenBookDoc ob = natural_book(4, {1, 1});
        ob.monodromy.kind = MonodromyKind::identity;
        ob.page.handles[1].monodromy_trivial = false;
        bool found = false;
        for (const Violation& v : validate_open_book(ob))
            found = found || v.invariant == "identity-kind-flag";
        t.check(found, "identity kind with a non-trivial flag missed");
    }
}

void suite_profile_law(Tally& t, std::mt19937_64& rng, bool mutated) {
    for (int it = 0; it < 60; ++it) {
        const Profile p = random_profile(rng, 3, 10);
        const OpenBookDoc ob = natural_book(p.n, p.counts);
        const InducedOpenBook io = induce_open_book(ob);

        // Independent route: push the page up one dimension and double it.
        std::vector<std::int64_t> law = double_counts(full_counts(induce_hob(ob.page)));
        if (mutated) law[1] += 1;

        t.check(io.counts.counts == law,
                "closed counts " + counts_str(io.counts.counts) + " != doubled half " +
                    counts_str(law) + " at n=" + std::to_string(p.n));
        t.check(io.counts.counts.size() == static_cast<std::size_t>(p.n) + 1,
                "closed profile has the wrong length");
        t.check(io.counts.counts.front() == 1 && io.counts.counts.back() == 1,
                "closed profile must start and end with a single handle");
        bool palindrome = true;
        for (std::size_t i = 0; i < io.counts.counts.size(); ++i)
            palindrome = palindrome &&
                         io.counts.counts[i] == io.counts.counts[io.counts.counts.size() - 1 - i];
        t.check(palindrome, "closed profile is not palindromic");
        t.check(io.duals.size() == ob.page.handles.size(),
                "one dual description per page handle");
    }
}

void suite_euler_law(Tally& t, std::mt19937_64& rng, bool mutated) {
    for (int it = 0; it < 60; ++it) {
        const Profile p = random_profile(rng, 3, 10);
        const OpenBookDoc ob = natural_book(p.n, p.counts);
        const std::int64_t lhs = alternating_sum(induce_open_book(ob).counts.counts);
        std::int64_t rhs = open_book_euler(p);
        if (mutated) rhs += 2;
        t.check(lhs == rhs, "chi of closed counts " + std::to_string(lhs) + " != " +
                                std::to_string(rhs) + " at n=" + std::to_string(p.n));
        const std::int64_t expect = p.n % 2 == 0 ? 2 * euler_characteristic(p) : 0;
        t.check(open_book_euler(p) == expect, "total-space chi law broken");
    }
}

void suite_duality(Tally& t, std::mt19937_64& rng, bool) {
    for (int it = 0; it < 40; ++it) {
        const Profile p = random_profile(rng, 3, 10);
        const HandleDecomposition page = natural_page(p.n, p.counts);
        const std::vector<std::int64_t> hob = full_counts(induce_hob(page));

        std::vector<std::int64_t> rev = hob;
        std::reverse(rev.begin(), rev.end());
        t.check(dual_counts(hob) == rev, "dual counts are not the reversed vector");
        t.check(dual_counts(dual_counts(hob)) == hob, "duality is not an involution");

        const std::vector<std::int64_t> dbl = double_counts(hob);
        t.check(dual_counts(dbl) == dbl, "the double is not self-dual");
        t.check(alternating_sum(hob) == euler_characteristic(p),
                "half open book chi differs from the page chi");
    }

    OpenBookDoc ob = natural_book(5, {1, 2, 0});
    const DualAttachingDescription d = dual_attaching_description(ob, "h2_1");
    t.check(d.dual_index == 3, "dual of a 2-handle at n=5 must have index 3");
    t.check(d.front_identity && d.front_cover == d.back_cover,
            "trivial monodromy must glue the cocore to itself");

    ob.monodromy.kind = MonodromyKind::annotated;
    ob.page.handles[2].monodromy_trivial = false;  // h2_0
    const DualAttachingDescription d2 = dual_attaching_description(ob, "h2_0");
    t.check(!d2.front_identity && d2.front_cover != d2.back_cover,
            "non-trivial monodromy must show up on the front cover");
}

void suite_exchange_commutation(Tally& t, std::mt19937_64& rng, bool mutated) {
    for (int it = 0; it < 50; ++it) {
        const Profile p = random_profile(rng, 4, 9, 4);
        const OpenBookDoc ob = natural_book(p.n, p.counts);

        Selection sel;
        for (const Handle& h : ob.page.handles)
            if (h.index >= 2 && h.index <= p.n - 1 && rint(rng, 0, 1) == 1) sel.ids.insert(h.id);

        const MoveResult mr = exchange_page(ob, sel);
        const Profile after = profile_of(mr.doc.page, p.n);

        std::vector<std::int64_t> law = p.counts;
        for (const std::string& id : sel.ids) {
            const int k = ob.page.find(id)->index;
            law[k - 1] -= 1;
            law[p.n - k - 1] += 1;
        }
        if (mutated) law[0] += 1;

        t.check(after.counts == law, "exchanged profile " + counts_str(after.counts) +
                                         " != " + counts_str(law));
        t.check(replay_log(mr.log, p.n, p.counts) == after.counts,
                "exchange record does not replay");

        const CommutationCheck cc = verify_exchange_commutation(ob, sel);
        t.check(cc.equal && cc.direct.counts == cc.exchanged.counts,
                "closed counts change under exchange at n=" + std::to_string(p.n));
    }

    // Fixed case: the only 3-handle of (0,0,1) at n=5 trades for a 2-handle.
    const MoveResult mr = exchange_page(natural_book(5, {0, 0, 1}), Selection{{"h3_0"}});
    t.check(profile_of(mr.doc.page, 5).counts == std::vector<std::int64_t>{0, 1, 0},
            "(0,0,1) with its 3-handle exchanged must be (0,1,0)");
    t.check(is_natural(mr.doc.page) && mr.doc.monodromy.kind == MonodromyKind::identity,
            "exchanging a natural identity book must stay natural");
}

void suite_stabilization(Tally& t, std::mt19937_64& rng, bool mutated) {
    for (int n = 3; n <= 8; ++n) {
        const Profile p = random_profile(rng, n, n, 3);
        for (int k = 2; k <= n - 1; ++k) {
            const MoveResult mr = stabilize_k(natural_book(n, p.counts), k);
            const MoveRecord& r = mr.log.records.front();

            const std::int64_t delta = (mutated ? sign_pow(k) : sign_pow(k - 1)) + sign_pow(n - k);
            t.check(r.chi_after - r.chi_before == delta,
                    "chi delta of a " + std::to_string(k) + "-stabilization at n=" +
                        std::to_string(n) + " is " + std::to_string(r.chi_after - r.chi_before) +
                        ", expected " + std::to_string(delta));

            std::vector<std::int64_t> want = p.counts;
            want[k - 2] += 1;
            want[n - k - 1] += 1;
            t.check(r.after == want, "stabilization must add one (k-1)- and one (n-k)-handle");
            t.check(replay_log(mr.log, n, p.counts) == r.after, "stabilization record replay");
            t.check(mr.doc.page.handles.size() == natural_page(n, p.counts).handles.size() + 2,
                    "stabilization appends exactly two handles");
            bool flags_nontrivial = true;
            for (const Handle& h : mr.doc.page.handles)
                if (h.id.rfind("stab", 0) == 0) flags_nontrivial &= !h.monodromy_trivial;
            t.check(flags_nontrivial, "stabilization handles carry the twist");
        }
    }

    for (int n = 3; n <= 9; n += 2) {
        const Profile p = random_profile(rng, n, n, 3);
        const MoveResult mr = stabilize_middle(natural_book(n, p.counts));
        const MoveRecord& r = mr.log.records.front();
        t.check(r.chi_after - r.chi_before == sign_pow((n - 1) / 2),
                "middle stabilization chi delta at n=" + std::to_string(n));
        std::vector<std::int64_t> want = p.counts;
        want[(n - 1) / 2 - 1] += 1;
        t.check(r.after == want, "middle stabilization adds one middle handle");
    }

    {
        // Disk input: the result is the model twist itself.
        const MoveResult mr = stabilize_k(natural_book(5, {0, 0, 0}), 3);
        t.check(mr.doc.monodromy.kind == MonodromyKind::tau && mr.doc.monodromy.tau_k == 3,
                "stabilizing a disk must yield the built-in twist");
        const MoveResult mr2 = stabilize_k(natural_book(5, {1, 0, 0}), 3);
        t.check(mr2.doc.monodromy.kind == MonodromyKind::annotated,
                "stabilizing a non-disk page must yield an annotated monodromy");
    }
    t.check(throws_code("k-out-of-range", [] { stabilize_k(natural_book(4, {0, 0}), 1); }),
            "k below range must be rejected");
    t.check(throws_code("k-out-of-range", [] { stabilize_k(natural_book(4, {0, 0}), 4); }),
            "k above range must be rejected");
    t.check(throws_code("odd-dimensional-page", [] { stabilize_middle(natural_book(4, {0, 0})); }),
            "middle stabilization needs an even-dimensional page");
}

void suite_normal_form(Tally& t, std::mt19937_64& rng, bool mutated) {
    auto expect_counts = [&](const std::vector<std::int64_t>& counts) {
        std::vector<std::int64_t> want = counts;
        if (mutated)
            std::reverse(want.begin(), want.end());
        else
            want = tail_reversed(want);
        return want;
    };

    std::vector<Profile> cases;
    cases.push_back(Profile{6, {1, 2, 0, 0}});
    cases.push_back(Profile{5, {3, 1, 2}});
    for (int it = 0; it < 30; ++it) cases.push_back(random_profile(rng, 4, 10, 4));

    for (const Profile& p : cases) {
        const MoveResult mr = normal_form(natural_book(p.n, p.counts));
        const Profile after = profile_of(mr.doc.page, p.n);
        t.check(after.counts == expect_counts(p.counts),
                "normal form of " + counts_str(p.counts) + " is " + counts_str(after.counts));
        t.check(is_natural(mr.doc.page) && mr.doc.monodromy.kind == MonodromyKind::identity,
                "normal form of a natural identity book must stay natural");
        // Page chi may move for odd n; the induced closed counts may not.
        t.check(induce_open_book(mr.doc).counts == induce_open_book(natural_book(p.n, p.counts)).counts,
                "normal form must preserve the induced closed profile");
        if (p.n % 2 == 0)
            t.check(euler_characteristic(after) == euler_characteristic(p),
                    "normal form must preserve chi for even n");
        t.check(mr.log.records.size() == 1 &&
                    mr.log.records.front().kind == MoveKind::normal_form,
                "normal form is recorded as one move");
        t.check(replay_log(mr.log, p.n, p.counts) == after.counts, "normal form record replay");
    }

    const OpenBookDoc small = natural_book(3, {2});
    const MoveResult mr3 = normal_form(small);
    t.check(mr3.doc == small && mr3.log.empty(), "n=3 normal form is a no-op with an empty log");

    OpenBookDoc twisted = natural_book(5, {1, 1, 0});
    twisted.monodromy.kind = MonodromyKind::annotated;
    twisted.page.handles[1].monodromy_trivial = false;
    t.check(throws_code("non-identity-monodromy", [&] { normal_form(twisted); }),
            "normal form needs identity monodromy");
}

void suite_hopf_relation(Tally& t, std::mt19937_64&, bool mutated) {
    const OpenBookDoc disk = natural_book(3, {0});

    const MoveResult once = stabilize_k(disk, 2);
    const MoveResult mid1 = stabilize_middle(disk);
    const MoveResult mid2 = stabilize_middle(mid1.doc);

    const Profile pa = profile_of(once.doc.page, 3);
    const Profile pb = profile_of((mutated ? mid1 : mid2).doc.page, 3);

    t.check(pa.counts == std::vector<std::int64_t>{2},
            "one 2-stabilization of the disk must have profile (2)");
    t.check(pa.counts == pb.counts, "one 2-stabilization must equal two middle stabilizations");
    t.check(euler_characteristic(pa) == -1, "the doubly stabilized disk page has chi -1");

    MoveLog both = mid1.log;
    both.extend(mid2.log);
    t.check(replay_log(both, 3, {0}) == replay_log(once.log, 3, {0}),
            "the two routes must replay to the same profile");
}

void suite_equalize(Tally& t, std::mt19937_64& rng, bool mutated) {
    for (int it = 0; it < 40; ++it) {
        const int n = rint(rng, 3, 8);
        const Profile a = random_profile(rng, n, n, 5);
        Profile b = a;
        for (int tries = 0; tries < 300; ++tries) {
            Profile cand = random_profile(rng, n, n, 5);
            if (euler_characteristic(cand) == euler_characteristic(a)) {
                b = cand;
                break;
            }
        }

        EqualizeResult eq = equalize_handle_counts(a, b);
        if (mutated) eq.left.counts[0] += 1;

        t.check(eq.left == eq.right, "equalized profiles differ: " + counts_str(eq.left.counts) +
                                         " vs " + counts_str(eq.right.counts));
        t.check(replay_log(eq.left_log, n, a.counts) == eq.left.counts,
                "left pad log does not replay to the common profile");
        t.check(replay_log(eq.right_log, n, b.counts) == eq.right.counts,
                "right pad log does not replay to the common profile");
        bool grows = eq.left.counts.size() == a.counts.size();
        for (std::size_t i = 0; i < a.counts.size() && grows; ++i)
            grows = eq.left.counts[i] >= a.counts[i] && eq.left.counts[i] >= b.counts[i];
        t.check(grows, "padding can only add handles");
        for (const MoveRecord& r : eq.left_log.records)
            t.check(r.kind == MoveKind::pad, "equalization uses pads only");
    }

    t.check(throws_code("dimension-mismatch",
                        [] {
                            equalize_handle_counts(Profile{4, {1, 0}}, Profile{5, {1, 0, 0}});
                        }),
            "equalize must reject different dimensions");
    t.check(throws_code("chi-mismatch",
                        [] { equalize_handle_counts(Profile{4, {1, 0}}, Profile{4, {0, 0}}); }),
            "equalize must reject unequal Euler characteristics");
}

void suite_common_page(Tally& t, std::mt19937_64& rng, bool mutated) {
    for (int it = 0; it < 30; ++it) {
        const int n = rint(rng, 3, 8);
        const Profile a = random_profile(rng, n, n, 4);
        Profile b = a;
        for (int tries = 0; tries < 300; ++tries) {
            Profile cand = random_profile(rng, n, n, 4);
            const std::int64_t gap =
                euler_characteristic(cand) - euler_characteristic(a);
            if (n % 2 == 0 ? gap == 0 : gap % 2 == 0) {
                b = cand;
                break;
            }
        }

        CommonPageResult cp = common_page(natural_book(n, a.counts), natural_book(n, b.counts));
        if (mutated) cp.common.counts[0] += 1;

        t.check(replay_log(cp.left_log, n, a.counts) == cp.common.counts,
                "left log does not land on the common profile at n=" + std::to_string(n));
        t.check(replay_log(cp.right_log, n, b.counts) == cp.common.counts,
                "right log does not land on the common profile at n=" + std::to_string(n));
        t.check(cp.common.n == n, "common page keeps the dimension");
    }

    t.check(throws_code("chi-mismatch",
                        [] {
                            common_page(natural_book(4, {1, 0}), natural_book(4, {0, 0}));
                        }),
            "even total dimension must reject unequal chi");
    t.check(throws_code("parity-mismatch",
                        [] {
                            common_page(natural_book(5, {0, 0, 0}), natural_book(5, {0, 1, 0}));
                        }),
            "odd total dimension must reject chi of different parity");
    t.check(throws_code("dimension-mismatch",
                        [] {
                            common_page(natural_book(4, {0, 0}), natural_book(5, {0, 0, 0}));
                        }),
            "different dimensions have no common page");
    {
        OpenBookDoc twisted = natural_book(4, {1, 0});
        twisted.monodromy.kind = MonodromyKind::annotated;
        t.check(throws_code("non-identity-monodromy",
                            [&] { common_page(twisted, natural_book(4, {1, 0})); }),
                "common page needs identity monodromies");
    }
}

void suite_snf(Tally& t, std::mt19937_64& rng, bool mutated) {
    for (int it = 0; it < 60; ++it) {
        const std::size_t r = static_cast<std::size_t>(rint(rng, 1, 5));
        const std::size_t c = static_cast<std::size_t>(rint(rng, 1, 5));
        IntegerMatrix a(r, c);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) a.at(i, j) = rint(rng, -9, 9);

        const SmithResult s = smith_normal_form(a);
        IntegerMatrix d = s.d;
        if (mutated) d.at(0, 0) += 1;

        t.check(s.u * a * s.v == d, "u*a*v != d for " + a.to_string());
        t.check(d.rows() == r && d.cols() == c, "smith form must keep the shape");

        bool diagonal = true, nonneg = true, chain = true;
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j)
                if (i != j && d.at(i, j) != 0) diagonal = false;
        const std::size_t m = std::min(r, c);
        for (std::size_t i = 0; i < m; ++i) nonneg = nonneg && d.at(i, i) >= 0;
        for (std::size_t i = 0; i + 1 < m; ++i) {
            const Int &x = d.at(i, i), &y = d.at(i + 1, i + 1);
            if (x == 0 ? y != 0 : y % x != 0) chain = false;
        }
        t.check(diagonal, "smith form must be diagonal");
        t.check(nonneg, "smith diagonal must be non-negative");
        t.check(chain, "smith diagonal must be a divisor chain");

        const Int du = s.u.determinant(), dv = s.v.determinant();
        t.check((du == 1 || du == -1) && (dv == 1 || dv == -1),
                "transforms must be unimodular");

        const std::vector<Int> f = invariant_factors(a);
        t.check(matrix_rank(a) == f.size(), "rank must count the invariant factors");
        bool match = true;
        for (std::size_t i = 0; i < m; ++i) {
            const Int want = i < f.size() ? f[i] : Int(0);
            match = match && s.d.at(i, i) == want;
        }
        t.check(match, "invariant factors must read off the smith diagonal");
    }

    {
        const SmithResult s = smith_normal_form(IntegerMatrix(0, 3));
        t.check(s.d.rows() == 0 && s.d.cols() == 3 && s.v.is_identity(),
                "empty-row matrices have an empty smith diagonal");
    }
}

void suite_homology(Tally& t, std::mt19937_64& rng, bool) {
    for (int it = 0; it < 30; ++it) {
        const Profile p = random_profile(rng, 3, 9, 4);
        const GradedAbelianGroup closed = page_homology(p);
        const GradedAbelianGroup computed =
            homology_of_complex(chain_complex_of(natural_page(p.n, p.counts)));
        t.check(closed == computed,
                "page homology closed form disagrees with the chain complex at n=" +
                    std::to_string(p.n));

        std::vector<std::int64_t> ranks = double_counts(page_counts(p));
        std::vector<IntegerMatrix> zeros;
        for (std::size_t k = 1; k < ranks.size(); ++k)
            zeros.emplace_back(static_cast<std::size_t>(ranks[k - 1]),
                               static_cast<std::size_t>(ranks[k]));
        t.check(double_homology_natural(p) == homology_of_complex(make_complex(ranks, zeros)),
                "double homology closed form disagrees with the zero-boundary complex");

        const GradedAbelianGroup total = open_book_homology_trivial(p);
        bool palindrome = true;
        for (int d = 0; d <= p.n; ++d)
            palindrome = palindrome && total.piece(d) == total.piece(p.n - d);
        t.check(palindrome, "total-space homology with trivial monodromy must be symmetric");
        t.check(total.piece(0).free_rank == 1 && total.piece(0).torsion.empty(),
                "connected total space");
    }

    {
        IntegerMatrix d1(1, 1);
        d1.at(0, 0) = 2;
        const GradedAbelianGroup g = homology_of_complex(make_complex({1, 1}, {d1}));
        t.check(g.piece(0).free_rank == 0 && g.piece(0).torsion == std::vector<Int>{2},
                "a degree-2 attaching map must leave Z/2");
        t.check(g.piece(1).trivial(), "the injective boundary kills degree 1");
    }
    {
        IntegerMatrix z(1, 1), one(1, 1);
        one.at(0, 0) = 1;
        const GradedAbelianGroup g = homology_of_complex(make_complex({1, 1, 1, 1}, {z, one, z}));
        t.check(g.piece(0).free_rank == 1 && g.piece(1).trivial() && g.piece(2).trivial() &&
                    g.piece(3).free_rank == 1,
                "a canceling middle pair leaves the two poles");
    }
    {
        // Open book on the annulus page: S^1 x S^2 has a Z in every degree.
        const GradedAbelianGroup g = open_book_homology_trivial(Profile{3, {1}});
        bool all = true;
        for (int d = 0; d <= 3; ++d)
            all = all && g.piece(d).free_rank == 1 && g.piece(d).torsion.empty();
        t.check(all, "the annulus open book must have one Z per degree");
    }
    {
        HandleDecomposition h = natural_page(4, {1, 1});
        h.dependencies.insert({"h2_0", "h1_0"});
        h.incidence[{"h2_0", "h1_0"}] = 2;
        const GradedAbelianGroup g = homology_of_complex(chain_complex_of(h));
        t.check(g.piece(1).torsion == std::vector<Int>{2} && g.piece(1).free_rank == 0,
                "a doubled attaching map must show up as torsion");
    }
}

void suite_distinguish(Tally& t, std::mt19937_64&, bool mutated) {
    for (int n = 4; n <= 10; ++n) {
        for (int k = 2; 2 * k <= n; ++k) {
            for (int sign : {+1, -1}) {
                IntegerMatrix low(2, 2), high = IntegerMatrix::identity(2);
                low.at(0, 0) = 1;
                low.at(0, 1) = 1;
                low.at(1, 1) = sign;
                if (mutated) std::swap(low, high);

                t.check(tau_action_on_double(n, k, k - 1, sign) == low,
                        "twist action in degree k-1 at n=" + std::to_string(n) +
                            ", k=" + std::to_string(k));
                t.check(tau_action_on_double(n, k, n - k, sign) == high,
                        "twist action in degree n-k at n=" + std::to_string(n) +
                            ", k=" + std::to_string(k));

                const DistinguishResult dr = distinguish_monodromies(n, k, sign);
                t.check(dr.distinguished, "twin twists must be distinguished");
                t.check(dr.witness_degree == k - 1,
                        "the witness degree must be k-1 = " + std::to_string(k - 1));
                t.check(dr.rows.size() == 2, "both compared degrees must be reported");
                bool mirrored = true;
                for (const auto& row : dr.rows)
                    mirrored = mirrored && (row.first.is_identity() != row.second.is_identity());
                t.check(mirrored, "exactly one twist acts trivially in each compared degree");

                const DoubleBasis basis = tau_basis(n, k, k - 1);
                t.check(basis.degree == k - 1 && basis.labels[0] != basis.labels[1],
                        "the displayed basis must name two distinct classes");
            }
        }
    }
}

void suite_almost_canonical(Tally& t, std::mt19937_64& rng, bool mutated) {
    std::vector<Profile> cases;
    cases.push_back(Profile{6, {1, 1, 1, 1}});
    cases.push_back(Profile{3, {2}});
    for (int it = 0; it < 30; ++it) cases.push_back(random_profile(rng, 4, 10, 3));

    for (const Profile& p : cases) {
        const OpenBookDoc ob = natural_book(p.n, p.counts);
        const Selection sel = almost_canonical_selection(ob);

        const int threshold = (p.n + 1) / 2 + (mutated ? 1 : 0);
        Selection want;
        for (const Handle& h : ob.page.handles)
            if (h.index > threshold) want.ids.insert(h.id);

        t.check(sel == want, "almost-canonical selection at n=" + std::to_string(p.n) +
                                 " picked " + std::to_string(sel.ids.size()) + " handles, want " +
                                 std::to_string(want.ids.size()));

        const MoveResult mr = exchange_page(ob, sel);
        int max_index = 0;
        for (const Handle& h : mr.doc.page.handles) max_index = std::max(max_index, h.index);
        t.check(max_index <= (p.n + 1) / 2,
                "after the exchange no index may exceed ceil(n/2) = " +
                    std::to_string((p.n + 1) / 2));
        const CommutationCheck cc = verify_exchange_commutation(ob, sel);
        t.check(cc.equal, "the exchange must preserve the induced closed profile");
    }
}

void suite_round_trip(Tally& t, std::mt19937_64&, bool mutated) {
    std::vector<Document> docs;
    docs.push_back(make_document(natural_book(4, {2, 1})));
    {
        const MoveResult mr = stabilize_k(natural_book(5, {1, 0, 2}), 3);
        docs.push_back(make_document(mr.doc, mr.log));
    }
    {
        const MoveResult mr = stabilize_k(natural_book(5, {0, 0, 0}), 2);
        docs.push_back(make_document(mr.doc, mr.log));
    }
    {
        OpenBookDoc ob;
        ob.n = 4;
        ob.page.dimension = 3;
        ob.page.boundary_nonempty = true;
        ob.page.handles = {{"h0", 0, true, ""},
                           {"a", 1, false, "meridian"},
                           {"b", 2, true, "equator"}};
        ob.page.dependencies = {{"b", "a"}};
        ob.page.incidence = {{{"b", "a"}, -2}};
        ob.monodromy.kind = MonodromyKind::annotated;
        ob.monodromy.sign = -1;
        IntegerMatrix swap2(2, 2);
        swap2.at(0, 1) = 1;
        swap2.at(1, 0) = 1;
        ob.monodromy.homology_action = {{1, swap2}};
        docs.push_back(make_document(ob));
    }

    for (std::size_t i = 0; i < docs.size(); ++i) {
        std::string text = serialize_document(docs[i]);
        if (mutated) text += " ";
        const ParseResult pr = parse_document(text);
        const std::string at = "document " + std::to_string(i);
        t.check(pr.ok() && !pr.has_errors(), at + " does not parse back");
        if (!pr.ok()) continue;
        t.check(*pr.doc == docs[i], at + " changes across a round trip");
        t.check(serialize_document(*pr.doc) == text, at + " is not byte-stable");
    }

    {
        nlohmann::json j = nlohmann::json::parse(serialize_document(docs[0]));
        j["page"]["color"] = "red";
        const std::string text = j.dump(2) + "\n";

        const ParseResult strict = parse_document(text);
        bool flagged = false;
        for (const Diagnostic& d : strict.diagnostics)
            flagged = flagged || (d.severity == "error" && d.code == "unknown-field");
        t.check(!strict.ok() && flagged, "strict mode must reject unknown fields");

        const ParseResult lenient = parse_document(text, true);
        bool warned = false;
        for (const Diagnostic& d : lenient.diagnostics)
            warned = warned || (d.severity == "warning" && d.code == "unknown-field");
        t.check(lenient.ok() && warned, "lenient mode must warn about unknown fields");
    }
    {
        const ParseResult bad = parse_document("{ \"version\": ");
        bool syntax = false;
        for (const Diagnostic& d : bad.diagnostics) syntax = syntax || d.code == "syntax";
        t.check(!bad.ok() && syntax, "malformed JSON must yield a syntax diagnostic");
    }
    {
        const ParseResult missing = parse_document("{ \"version\": 1 }");
        bool flagged = false;
        for (const Diagnostic& d : missing.diagnostics)
            flagged = flagged || d.code == "missing-field";
        t.check(!missing.ok() && flagged, "missing fields must be named");
    }
}

struct SuiteDef {
    const char* name;
    bool mutable_suite;
    void (*fn)(Tally&, std::mt19937_64&, bool);
};

constexpr SuiteDef kSuites[] = {
    {"validate", false, suite_validate},
    {"profile-law", true, suite_profile_law},
    {"euler-law", true, suite_euler_law},
    {"duality", false, suite_duality},
    {"exchange-commutation", true, suite_exchange_commutation},
    {"stabilization", true, suite_stabilization},
    {"normal-form", true, suite_normal_form},
    {"hopf-relation", true, suite_hopf_relation},
    {"equalize", true, suite_equalize},
    {"common-page", true, suite_common_page},
    {"snf", true, suite_snf},
    {"homology", false, suite_homology},
    {"distinguish", true, suite_distinguish},
    {"almost-canonical", true, suite_almost_canonical},
    {"round-trip", true, suite_round_trip},
};

}  // namespace

std::vector<std::string> suite_names() {
    std::vector<std::string> out;
    for (const SuiteDef& s : kSuites) out.emplace_back(s.name);
    return out;
}

std::vector<std::string> mutation_names() {
    std::vector<std::string> out;
    for (const SuiteDef& s : kSuites)
        if (s.mutable_suite) out.emplace_back(s.name);
    return out;
}

Report run(std::uint64_t seed, const std::string& mutation) {
    if (!mutation.empty()) {
        bool known = false;
        for (const SuiteDef& s : kSuites) known = known || (s.mutable_suite && mutation == s.name);
        if (!known)
            throw CalculusError("unknown-mutation", "no fault injection named " + mutation);
    }

    Report rep;
    rep.data["seed"] = seed;
    if (!mutation.empty()) rep.data["mutation"] = mutation;
    nlohmann::ordered_json suites = nlohmann::ordered_json::object();

    std::uint64_t idx = 0;
    for (const SuiteDef& s : kSuites) {
        ++idx;
        std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * idx));
        Tally t;
        try {
            s.fn(t, rng, mutation == s.name);
        } catch (const std::exception& e) {
            t.check(false, std::string("unexpected exception: ") + e.what());
        }

        suites[s.name] = {{"checks", t.total}, {"failures", t.failures}};
        if (t.failures == 0)
            rep.add_pass(s.name, std::to_string(t.total) + " assertions");
        else
            rep.add_fail(s.name, "no failing assertions",
                         std::to_string(t.failures) + " of " + std::to_string(t.total) +
                             " failed; first: " + t.first);
    }
    rep.data["suites"] = std::move(suites);
    rep.finalize();
    return rep;
}

}  // namespace obcalc::selftest
