#include "obcalc/core.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

namespace obcalc {

const Handle* HandleDecomposition::find(const std::string& id) const {
    for (const Handle& h : handles)
        if (h.id == id) return &h;
    return nullptr;
}

std::optional<std::size_t> HandleDecomposition::position(const std::string& id) const {
    for (std::size_t i = 0; i < handles.size(); ++i)
        if (handles[i].id == id) return i;
    return std::nullopt;
}

std::int64_t HandleDecomposition::count_of_index(int k) const {
    return std::count_if(handles.begin(), handles.end(),
                         [k](const Handle& h) { return h.index == k; });
}

std::vector<std::size_t> HandleDecomposition::positions_of_index(int k) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < handles.size(); ++i)
        if (handles[i].index == k) out.push_back(i);
    return out;
}

std::string to_string(MonodromyKind kind) {
    switch (kind) {
        case MonodromyKind::identity: return "identity";
        case MonodromyKind::annotated: return "annotated";
        case MonodromyKind::tau: return "tau";
    }
    throw InternalError("unhandled monodromy kind");
}

std::optional<MonodromyKind> monodromy_kind_from_string(const std::string& s) {
    if (s == "identity") return MonodromyKind::identity;
    if (s == "annotated") return MonodromyKind::annotated;
    if (s == "tau") return MonodromyKind::tau;
    return std::nullopt;
}

namespace {

std::string join_ids(const std::vector<std::string>& ids) {
    std::string out;
    for (const auto& id : ids) {
        if (!out.empty()) out += ", ";
        out += id;
    }
    return out;
}

}  // namespace

std::vector<Violation> validate_decomposition(const HandleDecomposition& h) {
    std::vector<Violation> out;
    const int m = h.dimension;

    if (m < 2)
        out.push_back({"bad-dimension", {}, "dimension must be at least 2"});

    std::unordered_map<std::string, int> seen;
    for (const Handle& hd : h.handles) ++seen[hd.id];
    for (const auto& [id, cnt] : seen)
        if (cnt > 1)
            out.push_back({"duplicate-id", {id}, "handle id appears " + std::to_string(cnt) + " times"});

    for (const Handle& hd : h.handles)
        if (hd.index < 0 || hd.index > m)
            out.push_back({"index-range", {hd.id},
                           "index " + std::to_string(hd.index) + " outside [0, " + std::to_string(m) + "]"});

    for (std::size_t i = 0; i + 1 < h.handles.size(); ++i)
        if (h.handles[i].index > h.handles[i + 1].index) {
            out.push_back({"order-nondecreasing",
                           {h.handles[i].id, h.handles[i + 1].id},
                           "attachment order must have non-decreasing index"});
            break;
        }

    auto known = [&](const std::string& id) { return seen.count(id) != 0; };

    for (const auto& [a, b] : h.dependencies) {
        if (!known(a) || !known(b)) {
            out.push_back({"unknown-handle", {a, b}, "dependency names a handle that does not exist"});
            continue;
        }
        auto pa = h.position(a), pb = h.position(b);
        if (*pa <= *pb)
            out.push_back({"dependency-order", {a, b},
                           "handle " + a + " must be attached strictly after " + b});
    }

    for (const auto& [pair, coeff] : h.incidence) {
        const auto& [from, to] = pair;
        if (!known(from) || !known(to)) {
            out.push_back({"unknown-handle", {from, to}, "incidence names a handle that does not exist"});
            continue;
        }
        if (coeff == 0)
            out.push_back({"incidence-zero", {from, to}, "incidence coefficients must be nonzero"});
        if (h.find(from)->index != h.find(to)->index + 1)
            out.push_back({"incidence-index-step", {from, to},
                           "incidence requires index(from) == index(to) + 1"});
        if (!h.dependencies.count({from, to}))
            out.push_back({"incidence-outside-dependencies", {from, to},
                           "incidence support must be contained in the dependency relation"});
    }

    const std::int64_t zeros = h.count_of_index(0);
    if (zeros != 1)
        out.push_back({"zero-handle-count", {},
                       "expected exactly one 0-handle, found " + std::to_string(zeros)});

    if (h.boundary_nonempty && h.count_of_index(m) != 0) {
        std::vector<std::string> ids;
        for (const Handle& hd : h.handles)
            if (hd.index == m) ids.push_back(hd.id);
        out.push_back({"top-handle-forbidden", ids,
                       "a decomposition with nonempty boundary has no index-" + std::to_string(m) + " handles"});
    }

    // d o d == 0: for every pair (a, c) with index gap two, the signed count
    // of two-step incidence paths a -> b -> c must vanish.
    std::map<IdPair, Int> composite;
    for (const auto& [ab, f] : h.incidence)
        for (const auto& [bc, g] : h.incidence)
            if (ab.second == bc.first) composite[{ab.first, bc.second}] += Int(f) * g;
    for (const auto& [ac, total] : composite)
        if (total != 0)
            out.push_back({"boundary-squared", {ac.first, ac.second},
                           "boundary composite is nonzero (" + total.str() + ")"});

    return out;
}

bool is_valid_decomposition(const HandleDecomposition& h) {
    return validate_decomposition(h).empty();
}

bool is_natural(const HandleDecomposition& h) {
    return h.dependencies.empty() && h.incidence.empty();
}

bool all_monodromy_trivial(const HandleDecomposition& h) {
    return std::all_of(h.handles.begin(), h.handles.end(),
                       [](const Handle& hd) { return hd.monodromy_trivial; });
}

std::int64_t alternating_sum(const std::vector<std::int64_t>& counts) {
    std::int64_t acc = 0;
    std::int64_t sign = 1;
    for (std::int64_t c : counts) {
        acc += sign * c;
        sign = -sign;
    }
    return acc;
}

std::vector<std::int64_t> full_counts(const HandleDecomposition& h) {
    std::vector<std::int64_t> out(static_cast<std::size_t>(h.dimension) + 1, 0);
    for (const Handle& hd : h.handles)
        if (hd.index >= 0 && hd.index <= h.dimension) ++out[hd.index];
    return out;
}

Profile profile_of(const HandleDecomposition& h, int n) {
    if (n < 3)
        throw CalculusError("bad-dimension", "open book dimension must be at least 3");
    if (h.dimension != n - 1)
        throw CalculusError("dimension-mismatch",
                            "page has dimension " + std::to_string(h.dimension) +
                                ", expected " + std::to_string(n - 1));
    if (!h.boundary_nonempty)
        throw CalculusError("closed-page", "a page must have nonempty boundary");
    if (h.count_of_index(n - 1) != 0)
        throw CalculusError("top-handle-present",
                            "page carries a handle of top index " + std::to_string(n - 1));
    auto violations = validate_decomposition(h);
    if (!violations.empty())
        throw CalculusError("invalid-decomposition",
                            violations.front().invariant + ": " + violations.front().detail);

    Profile p;
    p.n = n;
    p.counts.resize(static_cast<std::size_t>(n) - 2);
    for (int i = 1; i <= n - 2; ++i) p.counts[i - 1] = h.count_of_index(i);
    return p;
}

std::int64_t euler_characteristic(const Profile& p) {
    std::int64_t acc = 1;
    std::int64_t sign = -1;
    for (std::int64_t c : p.counts) {
        acc += sign * c;
        sign = -sign;
    }
    return acc;
}

std::vector<std::int64_t> dual_counts(const std::vector<std::int64_t>& counts) {
    return {counts.rbegin(), counts.rend()};
}

std::vector<std::int64_t> double_counts(const std::vector<std::int64_t>& counts) {
    const std::size_t sz = counts.size();
    std::vector<std::int64_t> out(sz, 0);
    for (std::size_t k = 0; k < sz; ++k) out[k] = counts[k] + counts[sz - 1 - k];
    return out;
}

std::vector<std::int64_t> page_counts(const Profile& p) {
    // Indexed 0 .. n-1: the page is (n-1)-dimensional with an empty top slot.
    std::vector<std::int64_t> out(static_cast<std::size_t>(p.n), 0);
    out[0] = 1;
    for (std::size_t i = 0; i < p.counts.size(); ++i) out[i + 1] = p.counts[i];
    return out;
}

SelectionCheck check_selection(const HandleDecomposition& h, const Selection& a, int n) {
    SelectionCheck out;

    std::vector<std::string> unknown;
    for (const auto& id : a.ids)
        if (!h.find(id)) unknown.push_back(id);
    if (!unknown.empty()) {
        out.valid = false;
        out.reason = "unknown-handle";
        out.witness = unknown;
        return out;
    }

    std::vector<std::string> bad_range;
    for (const auto& id : a.ids) {
        const int k = h.find(id)->index;
        if (k < 2 || k > n - 1) bad_range.push_back(id);
    }
    if (!bad_range.empty()) {
        out.valid = false;
        out.reason = "index-out-of-range";
        out.witness = bad_range;
        return out;
    }

    for (const auto& [x, y] : h.dependencies)
        if (a.ids.count(y) && !a.ids.count(x)) {
            out.valid = false;
            out.reason = "not-upward-closed";
            out.witness = {x, y};
            return out;
        }

    return out;
}

bool is_valid_selection(const HandleDecomposition& h, const Selection& a, int n) {
    return check_selection(h, a, n).valid;
}

bool is_exchangeable(const HandleDecomposition& h, const Selection& a, int n) {
    SelectionCheck sc = check_selection(h, a, n);
    if (!sc.valid)
        throw CalculusError("invalid-selection", sc.reason + " (" + join_ids(sc.witness) + ")");
    return std::all_of(a.ids.begin(), a.ids.end(),
                       [&](const std::string& id) { return h.find(id)->monodromy_trivial; });
}

Selection upward_closure(const HandleDecomposition& h, const std::set<std::string>& seed) {
    Selection out{seed};
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& [x, y] : h.dependencies)
            if (out.ids.count(y) && !out.ids.count(x)) {
                out.ids.insert(x);
                grew = true;
            }
    }
    return out;
}

}  // namespace obcalc
