#include "obcalc/moves.hpp"

#include <algorithm>

namespace obcalc {

namespace {

std::int64_t chi_of_counts(const std::vector<std::int64_t>& profile_counts) {
    std::int64_t acc = 1, sign = -1;
    for (std::int64_t c : profile_counts) {
        acc += sign * c;
        sign = -sign;
    }
    return acc;
}

std::vector<std::int64_t> tail_reversed(const std::vector<std::int64_t>& counts) {
    // (mu_1, mu_2, ..., mu_{n-2}) -> (mu_1, mu_{n-2}, ..., mu_2)
    std::vector<std::int64_t> out = counts;
    if (out.size() > 2) std::reverse(out.begin() + 1, out.end());
    return out;
}

bool id_taken(const HandleDecomposition& h, const std::string& id) {
    return h.find(id) != nullptr;
}

std::string fresh_id(const HandleDecomposition& h, const std::string& base) {
    if (!id_taken(h, base)) return base;
    for (int t = 2;; ++t) {
        std::string cand = base + "." + std::to_string(t);
        if (!id_taken(h, cand)) return cand;
    }
}

void insert_sorted(HandleDecomposition& h, Handle hd) {
    auto it = std::upper_bound(h.handles.begin(), h.handles.end(), hd.index,
                               [](int k, const Handle& x) { return k < x.index; });
    h.handles.insert(it, std::move(hd));
}

void throw_if_invalid_book(const OpenBookDoc& ob, const char* where) {
    auto v = validate_open_book(ob);
    if (!v.empty())
        throw InternalError(std::string(where) + " produced an invalid open book: " +
                            v.front().invariant + " (" + v.front().detail + ")");
}

MoveRecord make_page_record(MoveKind kind, std::optional<int> param,
                            std::vector<std::string> ids, std::vector<int> indices,
                            std::vector<std::int64_t> before, std::vector<std::int64_t> after,
                            std::string rule) {
    MoveRecord r;
    r.kind = kind;
    r.param = param;
    r.ids = std::move(ids);
    r.indices = std::move(indices);
    r.chi_before = chi_of_counts(before);
    r.chi_after = chi_of_counts(after);
    r.before = std::move(before);
    r.after = std::move(after);
    r.rule = std::move(rule);
    return r;
}

// Appends the canceling (j, j+1) pair without the page-level index guard;
// pad_and_exchange needs the transient top-index handle.
HandleDecomposition pad_impl(HandleDecomposition h, int j, std::string* lo_id_out,
                             std::string* hi_id_out) {
    std::string lo_id, hi_id;
    for (int t = 1;; ++t) {
        lo_id = "pad" + std::to_string(t) + ".lo";
        hi_id = "pad" + std::to_string(t) + ".hi";
        if (!id_taken(h, lo_id) && !id_taken(h, hi_id)) break;
    }
    insert_sorted(h, Handle{lo_id, j, true, ""});
    insert_sorted(h, Handle{hi_id, j + 1, true, ""});
    h.dependencies.insert({hi_id, lo_id});
    h.incidence[{hi_id, lo_id}] = 1;
    if (lo_id_out) *lo_id_out = lo_id;
    if (hi_id_out) *hi_id_out = hi_id;
    return h;
}

// Exchange without precondition reporting or logging: replaces each selected
// k-handle by a trivially attached (n-k)-handle.  The caller guarantees the
// selection is valid and exchangeable.  `natural_input` says whether the move
// as a whole started from a natural all-trivial page; composite moves judge
// that on their own input, not on transient intermediate pages.
OpenBookDoc exchange_core(const OpenBookDoc& ob, const Selection& a, bool natural_input) {
    OpenBookDoc out = ob;
    HandleDecomposition& pg = out.page;

    // Selected handles in attachment order, so fresh-summand insertion is
    // deterministic.
    std::vector<Handle> selected;
    for (const Handle& hd : pg.handles)
        if (a.ids.count(hd.id)) selected.push_back(hd);

    std::erase_if(pg.handles, [&](const Handle& hd) { return a.ids.count(hd.id) != 0; });
    std::erase_if(pg.dependencies, [&](const IdPair& p) {
        return a.ids.count(p.first) || a.ids.count(p.second);
    });
    std::erase_if(pg.incidence, [&](const auto& e) {
        return a.ids.count(e.first.first) || a.ids.count(e.first.second);
    });

    for (const Handle& old : selected)
        insert_sorted(pg, Handle{fresh_id(pg, old.id + ".x"), ob.n - old.index,
                                 natural_input, ""});

    if (!(natural_input && ob.monodromy.kind == MonodromyKind::identity)) {
        out.monodromy.kind = MonodromyKind::annotated;
        out.monodromy.tau_k = 0;
        out.monodromy.homology_action.clear();
    }
    return out;
}

OpenBookDoc exchange_core(const OpenBookDoc& ob, const Selection& a) {
    return exchange_core(ob, a, is_natural(ob.page) && all_monodromy_trivial(ob.page));
}

}  // namespace

std::string to_string(MoveKind k) {
    switch (k) {
        case MoveKind::induce: return "induce";
        case MoveKind::dual: return "dual";
        case MoveKind::exchange: return "exchange";
        case MoveKind::stabilize_k: return "stabilize_k";
        case MoveKind::stabilize_middle: return "stabilize_middle";
        case MoveKind::pad: return "pad";
        case MoveKind::pad_and_exchange: return "pad_and_exchange";
        case MoveKind::cancel: return "cancel";
        case MoveKind::normal_form: return "normal_form";
    }
    throw InternalError("unhandled move kind");
}

std::optional<MoveKind> move_kind_from_string(const std::string& s) {
    for (MoveKind k : {MoveKind::induce, MoveKind::dual, MoveKind::exchange,
                       MoveKind::stabilize_k, MoveKind::stabilize_middle, MoveKind::pad,
                       MoveKind::pad_and_exchange, MoveKind::cancel, MoveKind::normal_form})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

void MoveLog::extend(const MoveLog& o) {
    records.insert(records.end(), o.records.begin(), o.records.end());
}

std::vector<Violation> validate_open_book(const OpenBookDoc& ob) {
    std::vector<Violation> out;
    if (ob.n < 3)
        out.push_back({"bad-dimension", {}, "open book dimension must be at least 3"});
    if (ob.page.dimension != ob.n - 1)
        out.push_back({"dimension-mismatch", {},
                       "page dimension " + std::to_string(ob.page.dimension) +
                           " does not match n-1 = " + std::to_string(ob.n - 1)});
    if (!ob.page.boundary_nonempty)
        out.push_back({"closed-page", {}, "the page of an open book has nonempty boundary"});

    for (Violation v : validate_decomposition(ob.page)) out.push_back(std::move(v));

    const MonodromySpec& mo = ob.monodromy;
    if (mo.sign != 1 && mo.sign != -1)
        out.push_back({"bad-sign", {}, "monodromy sign must be +1 or -1"});
    if (mo.kind == MonodromyKind::identity) {
        for (const Handle& hd : ob.page.handles)
            if (!hd.monodromy_trivial)
                out.push_back({"identity-kind-flag", {hd.id},
                               "identity monodromy forces monodromy_trivial on every handle"});
    }
    if (mo.kind == MonodromyKind::tau && (mo.tau_k < 2 || mo.tau_k > ob.n - 1))
        out.push_back({"bad-tau-k", {},
                       "tau index " + std::to_string(mo.tau_k) + " outside [2, " +
                           std::to_string(ob.n - 1) + "]"});
    for (const auto& [degree, mat] : mo.homology_action) {
        if (degree < 0 || degree > ob.n) {
            out.push_back({"bad-homology-action", {},
                           "action degree " + std::to_string(degree) + " outside [0, n]"});
            continue;
        }
        if (!mat.is_square()) {
            out.push_back({"bad-homology-action", {},
                           "action matrix in degree " + std::to_string(degree) + " is not square"});
            continue;
        }
        const Int det = mat.determinant();
        if (det != 1 && det != -1)
            out.push_back({"bad-homology-action", {},
                           "action matrix in degree " + std::to_string(degree) +
                               " has determinant " + det.str() + ", expected +-1"});
    }
    return out;
}

HandleDecomposition natural_page(int n, const std::vector<std::int64_t>& counts) {
    if (n < 3)
        throw CalculusError("bad-dimension", "open book dimension must be at least 3");
    if (counts.size() != static_cast<std::size_t>(n) - 2)
        throw CalculusError("bad-profile",
                            "expected " + std::to_string(n - 2) + " counts, got " +
                                std::to_string(counts.size()));
    for (std::int64_t c : counts)
        if (c < 0) throw CalculusError("bad-profile", "negative handle count");

    HandleDecomposition h;
    h.dimension = n - 1;
    h.boundary_nonempty = true;
    h.handles.push_back({"h0", 0, true, ""});
    for (int i = 1; i <= n - 2; ++i)
        for (std::int64_t t = 0; t < counts[i - 1]; ++t)
            h.handles.push_back({"h" + std::to_string(i) + "_" + std::to_string(t), i, true, ""});
    return h;
}

OpenBookDoc natural_book(int n, const std::vector<std::int64_t>& counts) {
    return OpenBookDoc{n, natural_page(n, counts), MonodromySpec{}};
}

std::vector<std::int64_t> apply_record(const MoveRecord& r, int n,
                                       const std::vector<std::int64_t>& counts) {
    if (counts.size() != static_cast<std::size_t>(n) - 2)
        throw CalculusError("bad-record", "profile length does not match n");
    std::vector<std::int64_t> out = counts;
    auto bump = [&](int i, std::int64_t by) {
        if (i < 1 || i > n - 2)
            throw CalculusError("bad-record",
                                "record touches index " + std::to_string(i) +
                                    " outside the page profile");
        out[i - 1] += by;
        if (out[i - 1] < 0)
            throw CalculusError("bad-record", "record drives a handle count negative");
    };

    switch (r.kind) {
        case MoveKind::exchange:
            for (int k : r.indices) {
                bump(k, -1);
                bump(n - k, +1);
            }
            return out;
        case MoveKind::stabilize_k: {
            if (!r.param) throw CalculusError("bad-record", "stabilize_k without k");
            const int k = *r.param;
            if (k < 2 || k > n - 1)
                throw CalculusError("bad-record", "stabilize_k index out of range");
            bump(k - 1, +1);
            bump(n - k, +1);
            return out;
        }
        case MoveKind::stabilize_middle: {
            if (n % 2 == 0)
                throw CalculusError("bad-record", "middle stabilization needs an even-dimensional page");
            bump((n - 1) / 2, +1);
            return out;
        }
        case MoveKind::pad: {
            if (!r.param) throw CalculusError("bad-record", "pad without j");
            bump(*r.param, +1);
            bump(*r.param + 1, +1);
            return out;
        }
        case MoveKind::pad_and_exchange: {
            if (!r.param) throw CalculusError("bad-record", "pad_and_exchange without j");
            const int j = *r.param;
            if (j < 2 || j > n - 2)
                throw CalculusError("bad-record", "pad_and_exchange index out of range");
            bump(n - j - 1, +1);
            bump(n - j, +1);
            return out;
        }
        case MoveKind::cancel: {
            if (r.indices.size() != 2)
                throw CalculusError("bad-record", "cancel expects the two removed indices");
            bump(std::max(r.indices[0], r.indices[1]), -1);
            bump(std::min(r.indices[0], r.indices[1]), -1);
            return out;
        }
        case MoveKind::normal_form:
            return tail_reversed(out);
        case MoveKind::induce:
        case MoveKind::dual:
            // Queries, not rewrites: recording one changes nothing on the page.
            return out;
    }
    throw InternalError("unhandled move kind in apply_record");
}

std::vector<std::int64_t> replay_log(const MoveLog& log, int n,
                                     std::vector<std::int64_t> start) {
    std::vector<std::int64_t> cur = std::move(start);
    for (std::size_t i = 0; i < log.records.size(); ++i) {
        const MoveRecord& r = log.records[i];
        const std::string at = "record " + std::to_string(i) + " (" + to_string(r.kind) + ")";
        if (r.before != cur)
            throw CalculusError("log-replay-mismatch", at + ": before-profile does not chain");
        std::vector<std::int64_t> next = apply_record(r, n, cur);
        if (r.after != next)
            throw CalculusError("log-replay-mismatch", at + ": after-profile does not match the move law");
        if (r.chi_before != chi_of_counts(cur) || r.chi_after != chi_of_counts(next))
            throw CalculusError("log-replay-mismatch", at + ": recorded chi disagrees with the profile");
        cur = std::move(next);
    }
    return cur;
}

std::vector<std::string> validate_log(const MoveLog& log, int n) {
    std::vector<std::string> problems;
    if (log.records.empty()) return problems;
    std::vector<std::int64_t> cur = log.records.front().before;
    for (std::size_t i = 0; i < log.records.size(); ++i) {
        const MoveRecord& r = log.records[i];
        const std::string at = "record " + std::to_string(i) + " (" + to_string(r.kind) + ")";
        if (r.before != cur) {
            problems.push_back(at + ": before-profile does not chain");
            cur = r.before;
        }
        std::vector<std::int64_t> next;
        try {
            next = apply_record(r, n, cur);
        } catch (const CalculusError& e) {
            problems.push_back(at + ": " + e.what());
            cur = r.after;
            continue;
        }
        if (r.after != next)
            problems.push_back(at + ": after-profile does not match the move law");
        if (r.chi_before != chi_of_counts(r.before) || r.chi_after != chi_of_counts(r.after))
            problems.push_back(at + ": recorded chi disagrees with the profile");
        cur = r.after;
    }
    return problems;
}

HandleDecomposition induce_hob(const HandleDecomposition& page) {
    if (!page.boundary_nonempty)
        throw CalculusError("closed-page", "half open books are induced by pages with boundary");
    HandleDecomposition out = page;
    out.dimension += 1;
    return out;
}

DualAttachingDescription dual_attaching_description(const OpenBookDoc& ob,
                                                    const std::string& id) {
    const Handle* h = ob.page.find(id);
    if (!h)
        throw CalculusError("unknown-handle", "no handle with id " + id);
    DualAttachingDescription d;
    d.page_handle = id;
    d.dual_index = ob.n - h->index;
    d.back_cover = "coc(" + id + ")";
    d.front_identity = h->monodromy_trivial;
    if (h->monodromy_trivial) {
        d.front_cover = d.back_cover;
    } else {
        const char* name = ob.monodromy.kind == MonodromyKind::tau ? "tau" : "phi";
        d.front_cover = std::string(name) + "(coc(" + id + "))";
    }
    return d;
}

InducedOpenBook induce_open_book(const OpenBookDoc& ob) {
    const Profile p = profile_of(ob.page, ob.n);
    const int n = ob.n;
    auto mu = [&](int i) -> std::int64_t {
        return (i >= 1 && i <= n - 2) ? p.counts[i - 1] : 0;
    };

    InducedOpenBook out;
    out.counts.n = n;
    out.counts.counts.assign(static_cast<std::size_t>(n) + 1, 0);
    out.counts.counts[0] = 1;
    out.counts.counts[n] = 1;
    for (int i = 1; i <= n - 1; ++i) out.counts.counts[i] = mu(i) + mu(n - i);

    for (const Handle& hd : ob.page.handles)
        out.duals.push_back(dual_attaching_description(ob, hd.id));
    return out;
}

std::int64_t open_book_euler(const Profile& p) {
    return p.n % 2 == 0 ? 2 * euler_characteristic(p) : 0;
}

MoveResult exchange_page(const OpenBookDoc& ob, const Selection& a) {
    SelectionCheck sc = check_selection(ob.page, a, ob.n);
    if (!sc.valid) {
        std::string detail = sc.reason;
        for (const auto& w : sc.witness) detail += " " + w;
        throw CalculusError("invalid-selection", detail);
    }
    for (const auto& id : a.ids)
        if (!ob.page.find(id)->monodromy_trivial)
            throw CalculusError("non-exchangeable-selection",
                                "handle " + id + " does not have trivial monodromy");

    const Profile before = profile_of(ob.page, ob.n);

    std::vector<std::string> ids(a.ids.begin(), a.ids.end());
    std::vector<int> indices;
    for (const auto& id : ids) indices.push_back(ob.page.find(id)->index);

    OpenBookDoc doc = exchange_core(ob, a);
    throw_if_invalid_book(doc, "exchange");
    const Profile after = profile_of(doc.page, doc.n);

    MoveResult out{std::move(doc), {}};
    out.log.append(make_page_record(MoveKind::exchange, std::nullopt, std::move(ids),
                                    std::move(indices), before.counts, after.counts,
                                    "handle-exchange"));
    return out;
}

CommutationCheck verify_exchange_commutation(const OpenBookDoc& ob, const Selection& a) {
    CommutationCheck out;
    out.direct = induce_open_book(ob).counts;
    out.exchanged = induce_open_book(exchange_page(ob, a).doc).counts;
    out.equal = out.direct == out.exchanged;
    return out;
}

MoveResult stabilize_k(const OpenBookDoc& ob, int k) {
    const int n = ob.n;
    if (k < 2 || k > n - 1)
        throw CalculusError("k-out-of-range",
                            "stabilization index " + std::to_string(k) + " outside [2, " +
                                std::to_string(n - 1) + "]");
    const Profile before = profile_of(ob.page, n);

    // Stabilizing the trivial open book yields exactly the built-in twist
    // document; anything else keeps its annotations.
    const bool disk_input = ob.page.handles.size() == 1 &&
                            ob.monodromy.kind == MonodromyKind::identity;

    OpenBookDoc doc = ob;
    std::string a_id, b_id;
    for (int t = 1;; ++t) {
        a_id = "stab" + std::to_string(t) + ".a";
        b_id = "stab" + std::to_string(t) + ".b";
        if (!id_taken(doc.page, a_id) && !id_taken(doc.page, b_id)) break;
    }
    insert_sorted(doc.page, Handle{a_id, k - 1, false, ""});
    insert_sorted(doc.page, Handle{b_id, n - k, false, ""});

    doc.monodromy.homology_action.clear();
    if (disk_input) {
        doc.monodromy.kind = MonodromyKind::tau;
        doc.monodromy.tau_k = k;
    } else {
        doc.monodromy.kind = MonodromyKind::annotated;
        doc.monodromy.tau_k = 0;
    }

    throw_if_invalid_book(doc, "stabilize_k");
    const Profile after = profile_of(doc.page, n);

    MoveResult out{std::move(doc), {}};
    out.log.append(make_page_record(MoveKind::stabilize_k, k, {a_id, b_id}, {k - 1, n - k},
                                    before.counts, after.counts, "k-stabilization"));
    return out;
}

MoveResult stabilize_middle(const OpenBookDoc& ob) {
    const int n = ob.n;
    if ((n - 1) % 2 != 0)
        throw CalculusError("odd-dimensional-page",
                            "middle stabilization needs a page of even dimension, got " +
                                std::to_string(n - 1));
    const int mid = (n - 1) / 2;
    const Profile before = profile_of(ob.page, n);

    OpenBookDoc doc = ob;
    std::string m_id;
    for (int t = 1;; ++t) {
        m_id = "stab" + std::to_string(t) + ".m";
        if (!id_taken(doc.page, m_id)) break;
    }
    insert_sorted(doc.page, Handle{m_id, mid, false, ""});
    doc.monodromy.kind = MonodromyKind::annotated;
    doc.monodromy.tau_k = 0;
    doc.monodromy.homology_action.clear();

    throw_if_invalid_book(doc, "stabilize_middle");
    const Profile after = profile_of(doc.page, n);

    MoveResult out{std::move(doc), {}};
    out.log.append(make_page_record(MoveKind::stabilize_middle, std::nullopt, {m_id}, {mid},
                                    before.counts, after.counts, "middle-stabilization"));
    return out;
}

HandleDecomposition cancel_pair(const HandleDecomposition& h, const std::string& a,
                                const std::string& b) {
    const Handle* ha = h.find(a);
    const Handle* hb = h.find(b);
    if (!ha || !hb)
        throw CalculusError("unknown-handle", "no handle with id " + (ha ? b : a));
    if (ha->index != hb->index + 1)
        throw CalculusError("cancel-index-step",
                            "cancellation needs index(" + a + ") == index(" + b + ") + 1");
    auto inc = h.incidence.find({a, b});
    if (inc == h.incidence.end() || (inc->second != 1 && inc->second != -1))
        throw CalculusError("cancel-incidence-not-unit",
                            "incidence not +-1 on (" + a + ", " + b + ")");
    for (const auto& [x, y] : h.dependencies) {
        if (y == b && x != a)
            throw CalculusError("cancel-lower-has-other-incoming",
                                "handle " + x + " also depends on " + b);
        if (x == a && y != b)
            throw CalculusError("cancel-upper-has-other-outgoing",
                                "handle " + a + " also depends on " + y);
        if (y == a)
            throw CalculusError("cancel-upper-has-dependents",
                                "handle " + x + " depends on " + a);
    }

    HandleDecomposition out = h;
    std::erase_if(out.handles, [&](const Handle& hd) { return hd.id == a || hd.id == b; });
    std::erase_if(out.dependencies, [&](const IdPair& p) {
        return p.first == a || p.first == b || p.second == a || p.second == b;
    });
    std::erase_if(out.incidence, [&](const auto& e) {
        return e.first.first == a || e.first.first == b || e.first.second == a ||
               e.first.second == b;
    });
    return out;
}

HandleDecomposition pad_canceling_pair(const HandleDecomposition& h, int j) {
    const int top = h.boundary_nonempty ? h.dimension - 1 : h.dimension;
    if (j < 1 || j + 1 > top)
        throw CalculusError("index-out-of-range",
                            "pad at (" + std::to_string(j) + ", " + std::to_string(j + 1) +
                                ") exceeds the allowed top index " + std::to_string(top));
    return pad_impl(h, j, nullptr, nullptr);
}

MoveResult cancel_pair_move(const OpenBookDoc& ob, const std::string& a,
                            const std::string& b) {
    const Profile before = profile_of(ob.page, ob.n);
    const int ka = ob.page.find(a) ? ob.page.find(a)->index : 0;
    const int kb = ob.page.find(b) ? ob.page.find(b)->index : 0;

    OpenBookDoc doc = ob;
    doc.page = cancel_pair(ob.page, a, b);
    doc.monodromy.homology_action.clear();

    auto violations = validate_open_book(doc);
    if (!violations.empty())
        throw CalculusError("invalid-result",
                            "cancellation leaves an invalid page: " + violations.front().invariant);
    const Profile after = profile_of(doc.page, doc.n);

    MoveResult out{std::move(doc), {}};
    out.log.append(make_page_record(MoveKind::cancel, std::nullopt, {a, b}, {ka, kb},
                                    before.counts, after.counts, "handle-cancellation"));
    return out;
}

MoveResult pad_move(const OpenBookDoc& ob, int j) {
    const Profile before = profile_of(ob.page, ob.n);

    OpenBookDoc doc = ob;
    std::string lo, hi;
    // Page-level guard first, then the shared pad.
    const int top = doc.page.dimension - 1;
    if (j < 1 || j + 1 > top)
        throw CalculusError("index-out-of-range",
                            "pad at (" + std::to_string(j) + ", " + std::to_string(j + 1) +
                                ") exceeds the allowed top index " + std::to_string(top));
    doc.page = pad_impl(std::move(doc.page), j, &lo, &hi);

    throw_if_invalid_book(doc, "pad");
    const Profile after = profile_of(doc.page, doc.n);

    MoveResult out{std::move(doc), {}};
    out.log.append(make_page_record(MoveKind::pad, j, {lo, hi}, {j, j + 1}, before.counts,
                                    after.counts, "canceling-pair-padding"));
    return out;
}

MoveResult pad_and_exchange(const OpenBookDoc& ob, int j) {
    const int n = ob.n;
    if (j < 2 || j > n - 2)
        throw CalculusError("index-out-of-range",
                            "pad_and_exchange index " + std::to_string(j) + " outside [2, " +
                                std::to_string(n - 2) + "]");
    const Profile before = profile_of(ob.page, n);

    OpenBookDoc padded = ob;
    std::string lo, hi;
    padded.page = pad_impl(std::move(padded.page), j, &lo, &hi);

    // The padded page may carry a transient top-index handle (j + 1 == n - 1),
    // which is exactly why the two pieces are fused into one move.  The pair
    // lives in a boundary collar, so triviality of the outcome is judged on
    // the page we started from, not on the padded intermediate.
    OpenBookDoc doc = exchange_core(padded, Selection{{lo, hi}},
                                    is_natural(ob.page) && all_monodromy_trivial(ob.page));
    throw_if_invalid_book(doc, "pad_and_exchange");
    const Profile after = profile_of(doc.page, n);

    std::vector<std::int64_t> expect = before.counts;
    expect[static_cast<std::size_t>(n - j - 1) - 1] += 1;
    expect[static_cast<std::size_t>(n - j) - 1] += 1;
    if (after.counts != expect)
        throw InternalError("pad_and_exchange profile law violated");

    std::vector<std::string> new_ids;
    for (const Handle& hd : doc.page.handles)
        if (!ob.page.find(hd.id)) new_ids.push_back(hd.id);

    MoveResult out{std::move(doc), {}};
    out.log.append(make_page_record(MoveKind::pad_and_exchange, j, std::move(new_ids),
                                    {n - j - 1, n - j}, before.counts, after.counts,
                                    "pad-and-exchange"));
    return out;
}

Selection almost_canonical_selection(const OpenBookDoc& ob) {
    const int ceil_half = (ob.n + 1) / 2;
    Selection s;
    for (const Handle& hd : ob.page.handles)
        if (hd.index > ceil_half) s.ids.insert(hd.id);
    return s;
}

MoveResult normal_form(const OpenBookDoc& ob) {
    if (ob.monodromy.kind != MonodromyKind::identity)
        throw CalculusError("non-identity-monodromy",
                            "normal form is defined for identity monodromy");
    const int n = ob.n;
    if (n == 3) return MoveResult{ob, {}};  // nothing in [2, n-2]; not an error

    const Profile before = profile_of(ob.page, n);

    Selection s;
    for (const Handle& hd : ob.page.handles)
        if (hd.index >= 2 && hd.index <= n - 2) s.ids.insert(hd.id);

    std::vector<std::string> ids(s.ids.begin(), s.ids.end());
    std::vector<int> indices;
    for (const auto& id : ids) indices.push_back(ob.page.find(id)->index);

    OpenBookDoc doc = exchange_core(ob, s);
    throw_if_invalid_book(doc, "normal_form");
    const Profile after = profile_of(doc.page, n);

    if (after.counts != tail_reversed(before.counts))
        throw InternalError("normal form did not tail-reverse the profile");

    MoveResult out{std::move(doc), {}};
    out.log.append(make_page_record(MoveKind::normal_form, std::nullopt, std::move(ids),
                                    std::move(indices), before.counts, after.counts,
                                    "normal-form"));
    return out;
}

EqualizeResult equalize_handle_counts(const Profile& a, const Profile& b) {
    if (a.n != b.n)
        throw CalculusError("dimension-mismatch",
                            "profiles live in different dimensions: " + std::to_string(a.n) +
                                " and " + std::to_string(b.n));
    const int n = a.n;
    if (a.counts.size() != static_cast<std::size_t>(n) - 2 ||
        b.counts.size() != static_cast<std::size_t>(n) - 2)
        throw CalculusError("bad-profile", "profile length does not match n");
    const std::int64_t chi_a = euler_characteristic(a);
    const std::int64_t chi_b = euler_characteristic(b);
    if (chi_a != chi_b)
        throw CalculusError("chi-mismatch",
                            "equalization needs equal Euler characteristics, got " +
                                std::to_string(chi_a) + " and " + std::to_string(chi_b));

    EqualizeResult out{a, b, {}, {}};
    auto pad_side = [&](Profile& p, MoveLog& log, int j) {
        std::vector<std::int64_t> before = p.counts;
        p.counts[j - 1] += 1;
        p.counts[j] += 1;
        log.append(make_page_record(MoveKind::pad, j, {}, {j, j + 1}, std::move(before),
                                    p.counts, "canceling-pair-padding"));
    };

    // Sweep low to high; each pad fixes slot j and only disturbs slot j+1.
    // Equal chi forces the last slot to agree once the others do.
    for (int j = 1; j <= n - 3; ++j) {
        while (out.left.counts[j - 1] < out.right.counts[j - 1])
            pad_side(out.left, out.left_log, j);
        while (out.right.counts[j - 1] < out.left.counts[j - 1])
            pad_side(out.right, out.right_log, j);
    }
    if (out.left.counts != out.right.counts)
        throw InternalError("equalization sweep failed to converge");
    return out;
}

CommonPageResult common_page(const OpenBookDoc& x, const OpenBookDoc& y) {
    if (x.n != y.n)
        throw CalculusError("dimension-mismatch",
                            "open books live in different dimensions: " + std::to_string(x.n) +
                                " and " + std::to_string(y.n));
    if (x.monodromy.kind != MonodromyKind::identity ||
        y.monodromy.kind != MonodromyKind::identity)
        throw CalculusError("non-identity-monodromy",
                            "a common page is computed for identity monodromies");
    const int n = x.n;
    Profile px = profile_of(x.page, n);
    Profile py = profile_of(y.page, n);

    CommonPageResult out;

    auto append_normal_form = [&](Profile& p, MoveLog& log) {
        if (n == 3) return;  // normal form is a no-op with an empty log
        std::vector<std::int64_t> before = p.counts;
        p.counts = tail_reversed(p.counts);
        log.append(make_page_record(MoveKind::normal_form, std::nullopt, {}, {},
                                    std::move(before), p.counts, "normal-form"));
    };
    auto append_stabilize = [&](Profile& p, MoveLog& log, int k) {
        std::vector<std::int64_t> before = p.counts;
        p.counts[k - 2] += 1;      // mu_{k-1}
        p.counts[n - k - 1] += 1;  // mu_{n-k}
        log.append(make_page_record(MoveKind::stabilize_k, k, {}, {k - 1, n - k},
                                    std::move(before), p.counts, "k-stabilization"));
    };
    auto append_pad_exchange = [&](Profile& p, MoveLog& log, int j) {
        std::vector<std::int64_t> before = p.counts;
        p.counts[n - j - 2] += 1;  // mu_{n-j-1}
        p.counts[n - j - 1] += 1;  // mu_{n-j}
        log.append(make_page_record(MoveKind::pad_and_exchange, j, {}, {n - j - 1, n - j},
                                    std::move(before), p.counts, "pad-and-exchange"));
    };

    if (n % 2 == 0) {
        const std::int64_t cx = euler_characteristic(px);
        const std::int64_t cy = euler_characteristic(py);
        if (cx != cy)
            throw CalculusError("chi-mismatch",
                                "even total dimension needs equal page Euler characteristics, got " +
                                    std::to_string(cx) + " and " + std::to_string(cy));
        EqualizeResult eq = equalize_handle_counts(px, py);
        out.left_log = std::move(eq.left_log);
        out.right_log = std::move(eq.right_log);
        px = std::move(eq.left);
        py = std::move(eq.right);
        append_normal_form(px, out.left_log);
        append_normal_form(py, out.right_log);
    } else {
        const std::int64_t cx = euler_characteristic(px);
        const std::int64_t cy = euler_characteristic(py);
        if ((cx - cy) % 2 != 0)
            throw CalculusError("parity-mismatch",
                                "odd total dimension needs page Euler characteristics of equal "
                                "parity, got " +
                                    std::to_string(cx) + " and " + std::to_string(cy));
        append_normal_form(px, out.left_log);
        append_normal_form(py, out.right_log);

        // Close the chi gap by stabilization: +2 per 3-stabilization on the
        // smaller side; at n == 3 only k == 2 exists, which subtracts 2 from
        // the larger side instead.
        auto chi = [&](const Profile& p) { return euler_characteristic(p); };
        if (n >= 5) {
            while (chi(px) < chi(py)) append_stabilize(px, out.left_log, 3);
            while (chi(py) < chi(px)) append_stabilize(py, out.right_log, 3);
        } else {
            while (chi(px) > chi(py)) append_stabilize(px, out.left_log, 2);
            while (chi(py) > chi(px)) append_stabilize(py, out.right_log, 2);
        }

        // Equal chi now; clear residual differences slot by slot.  A
        // pad_and_exchange at j adds e_{n-j-1} + e_{n-j}, so j = n-i-1
        // raises slots i and i+1 on the smaller side.
        for (int i = 1; i <= n - 3; ++i) {
            while (px.counts[i - 1] < py.counts[i - 1])
                append_pad_exchange(px, out.left_log, n - i - 1);
            while (py.counts[i - 1] < px.counts[i - 1])
                append_pad_exchange(py, out.right_log, n - i - 1);
        }
        if (px.counts != py.counts)
            throw InternalError("common page equalization failed to converge");
    }

    if (px != py) throw InternalError("common page sides disagree");
    out.common = px;
    return out;
}

}  // namespace obcalc
