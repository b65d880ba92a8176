#include <doctest.h>

#include "obcalc/moves.hpp"

#include <algorithm>
#include <functional>

using namespace obcalc;
using i64v = std::vector<std::int64_t>;

namespace {

Profile prof(const OpenBookDoc& ob) { return profile_of(ob.page, ob.n); }

std::string code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const CalculusError& e) {
        return e.code();
    }
    return "";
}

}  // namespace

TEST_CASE("move kind names round trip") {
    for (MoveKind k : {MoveKind::induce, MoveKind::dual, MoveKind::exchange,
                       MoveKind::stabilize_k, MoveKind::stabilize_middle, MoveKind::pad,
                       MoveKind::pad_and_exchange, MoveKind::cancel, MoveKind::normal_form})
        CHECK(move_kind_from_string(to_string(k)) == k);
    CHECK_FALSE(move_kind_from_string("slide").has_value());
}

TEST_CASE("natural books validate and profile back") {
    const OpenBookDoc ob = natural_book(6, {1, 0, 2, 1});
    CHECK(validate_open_book(ob).empty());
    CHECK(prof(ob).counts == i64v{1, 0, 2, 1});
    CHECK(code_of([] { natural_book(3, {1, 2}); }) == "bad-profile");
    CHECK(code_of([] { natural_book(2, {}); }) == "bad-dimension");
}

TEST_CASE("open book validation names monodromy breaches") {
    auto has = [](const std::vector<Violation>& vs, const std::string& code) {
        for (const Violation& v : vs)
            if (v.invariant == code) return true;
        return false;
    };
    OpenBookDoc ob = natural_book(4, {1, 1});
    ob.monodromy.sign = 2;
    CHECK(has(validate_open_book(ob), "bad-sign"));

    ob = natural_book(4, {1, 1});
    ob.page.handles[1].monodromy_trivial = false;
    CHECK(has(validate_open_book(ob), "identity-kind-flag"));
    ob.monodromy.kind = MonodromyKind::annotated;
    CHECK(validate_open_book(ob).empty());

    ob = natural_book(4, {1, 1});
    ob.monodromy.kind = MonodromyKind::tau;
    ob.monodromy.tau_k = 9;
    CHECK(has(validate_open_book(ob), "bad-tau-k"));

    ob = natural_book(4, {1, 1});
    IntegerMatrix bad(2, 2);
    bad.at(0, 0) = 2;  // determinant 0
    ob.monodromy.homology_action[1] = bad;
    CHECK(has(validate_open_book(ob), "bad-homology-action"));
}

TEST_CASE("half open book lifts the page unchanged") {
    const HandleDecomposition page = natural_page(6, {1, 2, 3, 0});
    const HandleDecomposition hob = induce_hob(page);
    CHECK(hob.dimension == 6);
    CHECK(hob.handles == page.handles);
    CHECK(full_counts(hob) == i64v{1, 1, 2, 3, 0, 0, 0});
    CHECK(dual_counts(full_counts(hob)) == i64v{0, 0, 0, 3, 2, 1, 1});
}

TEST_CASE("induced closed profiles") {
    CHECK(induce_open_book(natural_book(3, {1})).counts.counts == i64v{1, 1, 1, 1});
    CHECK(induce_open_book(natural_book(4, {0, 1})).counts.counts == i64v{1, 0, 2, 0, 1});
    CHECK(induce_open_book(natural_book(5, {1, 2, 3})).counts.counts ==
          i64v{1, 1, 5, 5, 1, 1});

    // mu out of range reads as zero; the poles are always single handles.
    const InducedOpenBook io = induce_open_book(natural_book(7, {0, 0, 0, 0, 0}));
    CHECK(io.counts.counts == i64v{1, 0, 0, 0, 0, 0, 0, 1});
}

TEST_CASE("dual attaching descriptions carry the monodromy marker") {
    OpenBookDoc ob = natural_book(5, {1, 2, 0});
    const InducedOpenBook io = induce_open_book(ob);
    REQUIRE(io.duals.size() == ob.page.handles.size());
    for (const DualAttachingDescription& d : io.duals) {
        const Handle* h = ob.page.find(d.page_handle);
        REQUIRE(h != nullptr);
        CHECK(d.dual_index == 5 - h->index);
        CHECK(d.front_identity);
        CHECK(d.back_cover == d.front_cover);
    }

    ob.monodromy.kind = MonodromyKind::annotated;
    ob.page.handles[1].monodromy_trivial = false;  // h1_0
    const DualAttachingDescription d = dual_attaching_description(ob, "h1_0");
    CHECK_FALSE(d.front_identity);
    CHECK(d.front_cover != d.back_cover);

    CHECK(code_of([&] { dual_attaching_description(ob, "none"); }) == "unknown-handle");
}

TEST_CASE("total space Euler characteristic") {
    CHECK(open_book_euler(Profile{4, {0, 1}}) == 4);  // 2 * (1 - 0 + 1)
    CHECK(open_book_euler(Profile{5, {1, 2, 3}}) == 0);
    CHECK(open_book_euler(Profile{6, {1, 1, 1, 1}}) == 2 * (1 - 1 + 1 - 1 + 1));
}

TEST_CASE("exchange replaces k-handles by (n-k)-handles") {
    const MoveResult mr = exchange_page(natural_book(5, {0, 0, 1}), Selection{{"h3_0"}});
    CHECK(prof(mr.doc).counts == i64v{0, 1, 0});
    REQUIRE(mr.log.records.size() == 1);
    const MoveRecord& r = mr.log.records.front();
    CHECK(r.kind == MoveKind::exchange);
    CHECK(r.ids == std::vector<std::string>{"h3_0"});
    CHECK(r.indices == std::vector<int>{3});
    CHECK(r.before == i64v{0, 0, 1});
    CHECK(r.after == i64v{0, 1, 0});
    CHECK(r.rule == "handle-exchange");
    CHECK(apply_record(r, 5, r.before) == r.after);

    // Natural identity input stays natural with trivial flags.
    CHECK(is_natural(mr.doc.page));
    CHECK(all_monodromy_trivial(mr.doc.page));
    CHECK(mr.doc.monodromy.kind == MonodromyKind::identity);
}

TEST_CASE("exchange of several handles, profile oracle") {
    const MoveResult mr =
        exchange_page(natural_book(5, {2, 1, 3}), Selection{{"h3_0", "h3_1", "h3_2"}});
    CHECK(prof(mr.doc).counts == i64v{2, 4, 0});

    const MoveResult mr2 = exchange_page(natural_book(5, {2, 1, 3}), Selection{{"h2_0"}});
    CHECK(prof(mr2.doc).counts == i64v{2, 0, 4});
}

TEST_CASE("exchange on an annotated page poisons the new flags") {
    OpenBookDoc ob = natural_book(5, {0, 1, 1});
    ob.monodromy.kind = MonodromyKind::annotated;
    ob.page.handles[1].monodromy_trivial = false;  // h2_0 twisted
    const MoveResult mr = exchange_page(ob, Selection{{"h3_0"}});
    const Handle* fresh = mr.doc.page.find("h3_0.x");
    REQUIRE(fresh != nullptr);
    CHECK(fresh->index == 2);
    CHECK_FALSE(fresh->monodromy_trivial);
    CHECK(mr.doc.monodromy.kind == MonodromyKind::annotated);
}

TEST_CASE("exchange rejects bad selections") {
    const OpenBookDoc ob = natural_book(5, {1, 1, 1});
    CHECK(code_of([&] { exchange_page(ob, Selection{{"ghost"}}); }) == "invalid-selection");
    CHECK(code_of([&] { exchange_page(ob, Selection{{"h1_0"}}); }) == "invalid-selection");

    OpenBookDoc tw = ob;
    tw.monodromy.kind = MonodromyKind::annotated;
    tw.page.handles[2].monodromy_trivial = false;  // h2_0
    CHECK(code_of([&] { exchange_page(tw, Selection{{"h2_0"}}); }) ==
          "non-exchangeable-selection");
}

TEST_CASE("exchange commutes with induction") {
    const OpenBookDoc ob = natural_book(4, {1, 1});
    const CommutationCheck cc = verify_exchange_commutation(ob, Selection{{"h2_0"}});
    CHECK(cc.equal);
    CHECK(cc.direct.counts == i64v{1, 1, 2, 1, 1});
    CHECK(cc.direct.counts == cc.exchanged.counts);

    // And with the full almost-canonical selection of a bigger book.
    const OpenBookDoc big = natural_book(7, {1, 0, 2, 1, 1});
    const CommutationCheck c2 = verify_exchange_commutation(big, almost_canonical_selection(big));
    CHECK(c2.equal);
}

TEST_CASE("stabilization appends the handle pair and moves chi") {
    const MoveResult mr = stabilize_k(natural_book(5, {0, 0, 0}), 3);
    CHECK(prof(mr.doc).counts == i64v{0, 2, 0});
    REQUIRE(mr.log.records.size() == 1);
    const MoveRecord& r = mr.log.records.front();
    CHECK(r.kind == MoveKind::stabilize_k);
    CHECK(r.param == 3);
    CHECK(r.indices == std::vector<int>{2, 2});
    CHECK(r.chi_before == 1);
    CHECK(r.chi_after == 3);
    CHECK(r.rule == "k-stabilization");

    CHECK(prof(stabilize_k(natural_book(4, {0, 0}), 2).doc).counts == i64v{1, 1});
    CHECK(prof(stabilize_k(natural_book(3, {0}), 2).doc).counts == i64v{2});

    // The two fresh handles carry the twist.
    int twisted = 0;
    for (const Handle& h : mr.doc.page.handles)
        if (!h.monodromy_trivial) ++twisted;
    CHECK(twisted == 2);
}

TEST_CASE("stabilizing a disk yields the built-in twist, anything else an annotation") {
    const MoveResult disk = stabilize_k(natural_book(6, {0, 0, 0, 0}), 4);
    CHECK(disk.doc.monodromy.kind == MonodromyKind::tau);
    CHECK(disk.doc.monodromy.tau_k == 4);

    const MoveResult fat = stabilize_k(natural_book(6, {1, 0, 0, 0}), 4);
    CHECK(fat.doc.monodromy.kind == MonodromyKind::annotated);

    OpenBookDoc tau_in = disk.doc;
    const MoveResult again = stabilize_k(tau_in, 2);
    CHECK(again.doc.monodromy.kind == MonodromyKind::annotated);
}

TEST_CASE("stabilization rejects out-of-range k") {
    CHECK(code_of([] { stabilize_k(natural_book(5, {0, 0, 0}), 1); }) == "k-out-of-range");
    CHECK(code_of([] { stabilize_k(natural_book(5, {0, 0, 0}), 5); }) == "k-out-of-range");
    CHECK(code_of([] { stabilize_k(natural_book(5, {0, 0, 0}), 0); }) == "k-out-of-range");
}

TEST_CASE("middle stabilization") {
    CHECK(prof(stabilize_middle(natural_book(3, {0})).doc).counts == i64v{1});
    const MoveResult twice = stabilize_middle(stabilize_middle(natural_book(3, {0})).doc);
    CHECK(prof(twice.doc).counts == i64v{2});
    CHECK(prof(stabilize_middle(natural_book(5, {0, 0, 0})).doc).counts == i64v{0, 1, 0});

    const MoveResult mid = stabilize_middle(natural_book(5, {0, 0, 0}));
    const MoveRecord& r = mid.log.records.front();
    CHECK(r.kind == MoveKind::stabilize_middle);
    CHECK(r.indices == std::vector<int>{2});
    CHECK(r.chi_after - r.chi_before == 1);
    CHECK(r.rule == "middle-stabilization");

    CHECK(code_of([] { stabilize_middle(natural_book(4, {0, 0})); }) ==
          "odd-dimensional-page");
}

TEST_CASE("hopf relation: one 2-stabilization equals two middle stabilizations") {
    const OpenBookDoc disk = natural_book(3, {0});
    const Profile a = prof(stabilize_k(disk, 2).doc);
    const Profile b = prof(stabilize_middle(stabilize_middle(disk).doc).doc);
    CHECK(a.counts == i64v{2});
    CHECK(a == b);
}

TEST_CASE("cancel removes an isolated unit pair") {
    OpenBookDoc ob = natural_book(5, {1, 1, 0});
    ob.page.dependencies.insert({"h2_0", "h1_0"});
    ob.page.incidence[{"h2_0", "h1_0"}] = 1;

    const MoveResult mr = cancel_pair_move(ob, "h2_0", "h1_0");
    CHECK(prof(mr.doc).counts == i64v{0, 0, 0});
    CHECK(mr.doc.page.handles.size() == 1);
    CHECK(mr.doc.page.dependencies.empty());
    CHECK(mr.doc.page.incidence.empty());
    const MoveRecord& r = mr.log.records.front();
    CHECK(r.kind == MoveKind::cancel);
    CHECK(r.ids == std::vector<std::string>{"h2_0", "h1_0"});
    CHECK(r.indices == std::vector<int>{2, 1});
    CHECK(r.rule == "handle-cancellation");
}

TEST_CASE("cancel preconditions are named clause by clause") {
    OpenBookDoc base = natural_book(5, {1, 1, 0});
    base.page.dependencies.insert({"h2_0", "h1_0"});
    base.page.incidence[{"h2_0", "h1_0"}] = 1;

    SUBCASE("incidence must be a unit") {
        OpenBookDoc ob = base;
        ob.page.incidence[{"h2_0", "h1_0"}] = 2;
        CHECK(code_of([&] { cancel_pair_move(ob, "h2_0", "h1_0"); }) ==
              "cancel-incidence-not-unit");
    }
    SUBCASE("missing incidence is not a unit either") {
        OpenBookDoc ob = natural_book(5, {1, 1, 0});
        CHECK(code_of([&] { cancel_pair_move(ob, "h2_0", "h1_0"); }) ==
              "cancel-incidence-not-unit");
    }
    SUBCASE("indices must differ by one") {
        CHECK(code_of([&] { cancel_pair_move(base, "h1_0", "h2_0"); }) == "cancel-index-step");
    }
    SUBCASE("unknown ids") {
        CHECK(code_of([&] { cancel_pair_move(base, "x", "h1_0"); }) == "unknown-handle");
    }
    SUBCASE("the lower handle may have no other incoming incidence") {
        OpenBookDoc ob = natural_book(5, {1, 2, 0});
        ob.page.dependencies.insert({"h2_0", "h1_0"});
        ob.page.incidence[{"h2_0", "h1_0"}] = 1;
        ob.page.dependencies.insert({"h2_1", "h1_0"});
        ob.page.incidence[{"h2_1", "h1_0"}] = 1;
        CHECK(code_of([&] { cancel_pair_move(ob, "h2_0", "h1_0"); }) ==
              "cancel-lower-has-other-incoming");
    }
    SUBCASE("the upper handle may touch nothing else") {
        OpenBookDoc ob = natural_book(5, {2, 1, 0});
        ob.page.dependencies.insert({"h2_0", "h1_0"});
        ob.page.incidence[{"h2_0", "h1_0"}] = 1;
        ob.page.dependencies.insert({"h2_0", "h1_1"});
        ob.page.incidence[{"h2_0", "h1_1"}] = 1;
        CHECK(code_of([&] { cancel_pair_move(ob, "h2_0", "h1_0"); }) ==
              "cancel-upper-has-other-outgoing");
    }
    SUBCASE("nothing may depend on the upper handle") {
        OpenBookDoc ob = natural_book(5, {1, 1, 1});
        ob.page.dependencies.insert({"h2_0", "h1_0"});
        ob.page.incidence[{"h2_0", "h1_0"}] = 1;
        // A bare dependency, no incidence: adding incidence here would break
        // the boundary-squared law through h2_0.
        ob.page.dependencies.insert({"h3_0", "h2_0"});
        CHECK(code_of([&] { cancel_pair_move(ob, "h2_0", "h1_0"); }) ==
              "cancel-upper-has-dependents");
    }
}

TEST_CASE("cancel on a closed decomposition trims a sphere decomposition") {
    // Closed example: (1,1,1,1) with a unit 2-1 pair leaves (1,0,0,1).
    HandleDecomposition h;
    h.dimension = 3;
    h.boundary_nonempty = false;
    h.handles = {{"bot", 0, true, ""},
                 {"a", 1, true, ""},
                 {"b", 2, true, ""},
                 {"top", 3, true, ""}};
    h.dependencies = {{"b", "a"}};
    h.incidence = {{{"b", "a"}, 1}};
    REQUIRE(validate_decomposition(h).empty());

    const HandleDecomposition out = cancel_pair(h, "b", "a");
    CHECK(full_counts(out) == i64v{1, 0, 0, 1});
    CHECK(validate_decomposition(out).empty());
}

TEST_CASE("pad appends a canceling pair") {
    const MoveResult mr = pad_move(natural_book(5, {1, 0, 0}), 2);
    CHECK(prof(mr.doc).counts == i64v{1, 1, 1});
    const MoveRecord& r = mr.log.records.front();
    CHECK(r.kind == MoveKind::pad);
    CHECK(r.param == 2);
    CHECK(r.indices == std::vector<int>{2, 3});
    CHECK(r.rule == "canceling-pair-padding");
    CHECK(r.chi_after == r.chi_before);  // adjacent indices cancel in chi

    // The pair arrives cancelable and cancels back to the input.
    REQUIRE(r.ids.size() == 2);
    const MoveResult back = cancel_pair_move(mr.doc, r.ids[1], r.ids[0]);
    CHECK(prof(back.doc).counts == i64v{1, 0, 0});

    CHECK(code_of([] { pad_move(natural_book(3, {0}), 1); }) == "index-out-of-range");
    CHECK(code_of([] { pad_move(natural_book(5, {0, 0, 0}), 0); }) == "index-out-of-range");
    CHECK(code_of([] { pad_move(natural_book(5, {0, 0, 0}), 3); }) == "index-out-of-range");
}

TEST_CASE("pad keeps dependency and incidence wiring on the new pair only") {
    const MoveResult mr = pad_move(natural_book(4, {0, 0}), 1);
    const HandleDecomposition& page = mr.doc.page;
    CHECK(page.dependencies.size() == 1);
    CHECK(page.incidence.size() == 1);
    const auto& [pair, coeff] = *page.incidence.begin();
    CHECK(coeff == 1);
    CHECK(page.find(pair.first)->index == 2);
    CHECK(page.find(pair.second)->index == 1);
    CHECK(validate_open_book(mr.doc).empty());
}

TEST_CASE("pad-and-exchange lands e_{n-j-1} + e_{n-j} as one move") {
    const MoveResult mr = pad_and_exchange(natural_book(5, {1, 0, 0}), 2);
    CHECK(prof(mr.doc).counts == i64v{1, 1, 1});
    REQUIRE(mr.log.records.size() == 1);
    const MoveRecord& r = mr.log.records.front();
    CHECK(r.kind == MoveKind::pad_and_exchange);
    CHECK(r.param == 2);
    CHECK(r.indices == std::vector<int>{2, 3});
    CHECK(r.rule == "pad-and-exchange");
    CHECK(apply_record(r, 5, i64v{1, 0, 0}) == i64v{1, 1, 1});

    CHECK(prof(pad_and_exchange(natural_book(5, {0, 0, 0}), 3).doc).counts == i64v{1, 1, 0});
    CHECK(prof(pad_and_exchange(natural_book(6, {0, 0, 0, 0}), 2).doc).counts ==
          i64v{0, 0, 1, 1});

    CHECK(code_of([] { pad_and_exchange(natural_book(5, {0, 0, 0}), 1); }) ==
          "index-out-of-range");
    CHECK(code_of([] { pad_and_exchange(natural_book(5, {0, 0, 0}), 4); }) ==
          "index-out-of-range");
    // n = 3 has no valid j at all.
    CHECK(code_of([] { pad_and_exchange(natural_book(3, {0}), 2); }) == "index-out-of-range");
}

TEST_CASE("pad-and-exchange keeps the page natural on natural identity input") {
    const MoveResult mr = pad_and_exchange(natural_book(6, {1, 1, 0, 0}), 3);
    CHECK(is_natural(mr.doc.page));
    CHECK(all_monodromy_trivial(mr.doc.page));
    CHECK(validate_open_book(mr.doc).empty());
}

TEST_CASE("almost canonical selection clears everything above the middle") {
    const OpenBookDoc ob = natural_book(6, {1, 1, 1, 1});
    const Selection sel = almost_canonical_selection(ob);
    CHECK(sel.ids == std::set<std::string>{"h4_0"});
    const MoveResult mr = exchange_page(ob, sel);
    CHECK(prof(mr.doc).counts == i64v{1, 2, 1, 0});

    CHECK(almost_canonical_selection(natural_book(3, {2})).ids.empty());
    // At n = 5 the threshold is 3, and index 3 is not strictly above it.
    CHECK(almost_canonical_selection(natural_book(5, {1, 1, 1})).ids.empty());
}

TEST_CASE("normal form tail-reverses the profile") {
    const MoveResult mr = normal_form(natural_book(6, {1, 2, 0, 0}));
    CHECK(prof(mr.doc).counts == i64v{1, 0, 0, 2});
    REQUIRE(mr.log.records.size() == 1);
    CHECK(mr.log.records.front().kind == MoveKind::normal_form);
    CHECK(mr.log.records.front().rule == "normal-form");

    CHECK(prof(normal_form(natural_book(5, {3, 1, 2})).doc).counts == i64v{3, 2, 1});
    CHECK(prof(normal_form(natural_book(4, {2, 5})).doc).counts == i64v{2, 5});

    const OpenBookDoc small = natural_book(3, {4});
    const MoveResult nf3 = normal_form(small);
    CHECK(nf3.doc == small);
    CHECK(nf3.log.empty());

    OpenBookDoc tw = natural_book(5, {1, 0, 0});
    tw.monodromy.kind = MonodromyKind::annotated;
    tw.page.handles[1].monodromy_trivial = false;
    CHECK(code_of([&] { normal_form(tw); }) == "non-identity-monodromy");
}

TEST_CASE("normal form is an involution on profiles") {
    for (int n = 4; n <= 8; ++n) {
        i64v counts(static_cast<std::size_t>(n) - 2);
        for (std::size_t i = 0; i < counts.size(); ++i)
            counts[i] = static_cast<std::int64_t>((3 * i + n) % 5);
        const Profile once = prof(normal_form(natural_book(n, counts)).doc);
        const Profile twice = prof(normal_form(natural_book(n, once.counts)).doc);
        CHECK(twice.counts == counts);
    }
}

TEST_CASE("equalize pads both sides to one profile") {
    const EqualizeResult eq =
        equalize_handle_counts(Profile{5, {2, 1, 0}}, Profile{5, {1, 0, 0}});
    CHECK(eq.left == eq.right);
    CHECK(eq.left.counts == i64v{2, 1, 0});
    CHECK(eq.left_log.empty());
    CHECK(replay_log(eq.right_log, 5, {1, 0, 0}) == i64v{2, 1, 0});

    const EqualizeResult eq2 =
        equalize_handle_counts(Profile{5, {0, 0, 1}}, Profile{5, {0, 1, 2}});
    CHECK(eq2.left == eq2.right);
    CHECK(eq2.left.counts == i64v{0, 1, 2});
    CHECK(replay_log(eq2.left_log, 5, {0, 0, 1}) == eq2.left.counts);
    CHECK(eq2.right_log.empty());

    CHECK(code_of([] {
              equalize_handle_counts(Profile{4, {1, 0}}, Profile{5, {1, 0, 0}});
          }) == "dimension-mismatch");
    CHECK(code_of([] {
              equalize_handle_counts(Profile{4, {1, 0}}, Profile{4, {2, 0}});
          }) == "chi-mismatch");
}

TEST_CASE("equalize climbs interleaved deficits") {
    // chi equal: 1-3+1-0+0 = -1 and 1-1+0-2+1 = -1.
    const i64v a{3, 1, 0, 0}, b{1, 0, 2, 1};
    const EqualizeResult eq = equalize_handle_counts(Profile{6, a}, Profile{6, b});
    CHECK(eq.left == eq.right);
    CHECK(replay_log(eq.left_log, 6, a) == eq.left.counts);
    CHECK(replay_log(eq.right_log, 6, b) == eq.right.counts);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(eq.left.counts[i] >= std::max(a[i], b[i]));
}

TEST_CASE("common page for even total dimension") {
    const CommonPageResult cp =
        common_page(natural_book(4, {2, 1}), natural_book(4, {1, 0}));
    CHECK(cp.common.counts == replay_log(cp.left_log, 4, {2, 1}));
    CHECK(cp.common.counts == replay_log(cp.right_log, 4, {1, 0}));
    CHECK(cp.common.n == 4);

    CHECK(code_of([] {
              common_page(natural_book(4, {1, 0}), natural_book(4, {0, 0}));
          }) == "chi-mismatch");
}

TEST_CASE("common page for odd total dimension") {
    const CommonPageResult cp =
        common_page(natural_book(5, {2, 1, 0}), natural_book(5, {1, 1, 1}));
    CHECK(replay_log(cp.left_log, 5, {2, 1, 0}) == cp.common.counts);
    CHECK(replay_log(cp.right_log, 5, {1, 1, 1}) == cp.common.counts);

    // chi may differ by any even amount.
    const CommonPageResult gap =
        common_page(natural_book(5, {0, 0, 0}), natural_book(5, {2, 0, 0}));
    CHECK(replay_log(gap.left_log, 5, {0, 0, 0}) == gap.common.counts);
    CHECK(replay_log(gap.right_log, 5, {2, 0, 0}) == gap.common.counts);

    CHECK(code_of([] {
              common_page(natural_book(5, {0, 0, 0}), natural_book(5, {0, 1, 0}));
          }) == "parity-mismatch");
    CHECK(code_of([] {
              common_page(natural_book(4, {0, 0}), natural_book(5, {0, 0, 0}));
          }) == "dimension-mismatch");
}

TEST_CASE("common page at n = 3 stabilizes the larger side down") {
    const CommonPageResult cp = common_page(natural_book(3, {0}), natural_book(3, {4}));
    CHECK(cp.common.counts == i64v{4});
    CHECK(replay_log(cp.left_log, 3, {0}) == i64v{4});
    CHECK(cp.right_log.empty());
}

TEST_CASE("move records replay and validate") {
    // Normal form must come first: stabilization always leaves a non-trivial
    // monodromy behind, which normal form refuses.
    MoveLog log;
    const OpenBookDoc ob = natural_book(5, {1, 2, 0});
    MoveResult nf = normal_form(ob);
    log.extend(nf.log);
    MoveResult p = pad_and_exchange(nf.doc, 2);
    log.extend(p.log);
    MoveResult s = stabilize_k(p.doc, 2);
    log.extend(s.log);

    CHECK(replay_log(log, 5, {1, 2, 0}) == prof(s.doc).counts);
    CHECK(validate_log(log, 5).empty());

    // Breaking the chain is caught.
    MoveLog broken = log;
    broken.records[1].before[0] += 1;
    CHECK_FALSE(validate_log(broken, 5).empty());
    CHECK_THROWS_AS(replay_log(broken, 5, {1, 2, 0}), CalculusError);

    // Breaking a law inside one record is caught too.
    MoveLog bent = log;
    bent.records[0].after = bent.records[0].before;
    CHECK_FALSE(validate_log(bent, 5).empty());

    MoveLog skewed = log;
    skewed.records[2].chi_after += 1;
    CHECK_FALSE(validate_log(skewed, 5).empty());
}

TEST_CASE("induce and dual records are profile no-ops") {
    MoveRecord r;
    r.kind = MoveKind::induce;
    r.before = {1, 2, 3};
    r.after = {1, 2, 3};
    CHECK(apply_record(r, 5, {1, 2, 3}) == i64v{1, 2, 3});
    r.kind = MoveKind::dual;
    CHECK(apply_record(r, 5, {1, 2, 3}) == i64v{1, 2, 3});
}

TEST_CASE("apply_record rejects malformed records") {
    MoveRecord r;
    r.kind = MoveKind::stabilize_k;
    r.before = {0, 0, 0};
    CHECK(code_of([&] { apply_record(r, 5, {0, 0, 0}); }) == "bad-record");  // no k
    r.param = 7;
    CHECK(code_of([&] { apply_record(r, 5, {0, 0, 0}); }) == "bad-record");  // k range
    r.param = 2;
    CHECK(apply_record(r, 5, {0, 0, 0}) == i64v{1, 0, 1});

    MoveRecord c;
    c.kind = MoveKind::cancel;
    c.indices = {2, 1};
    CHECK(code_of([&] { apply_record(c, 5, {0, 0, 0}); }) == "bad-record");  // negative count
}
