#pragma once

#include "obcalc/intmat.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace obcalc {

// Domain-level failure: the operation is well-defined but a precondition on
// the input does not hold.  `code` is a stable kebab-case name for the
// violated clause so callers (and tests) can match on it; the CLI maps these
// to exit status 1.
class CalculusError : public std::runtime_error {
public:
    CalculusError(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

// A broken internal invariant, i.e. a bug in this library rather than bad
// input.  The CLI maps these to exit status 3.
class InternalError : public std::logic_error {
    using std::logic_error::logic_error;
};

struct Handle {
    std::string id;
    int index = 0;
    bool monodromy_trivial = true;
    // Free-text note about where the handle sits against the boundary.
    // Carried through serialization, ignored by every law.
    std::string boundary_label;

    bool operator==(const Handle&) const = default;
};

using IdPair = std::pair<std::string, std::string>;

// A handle decomposition built on D^m: an ordered list of handles plus the
// combinatorial data the calculus needs.  A pair (a, b) in `dependencies`
// means the attaching sphere of `a` cannot be isotoped off the belt sphere
// of `b`, so `a` must be attached after `b`.  `incidence` carries the
// algebraic intersection number of attaching sphere and belt sphere for
// handles of adjacent index; these populate the boundary maps of the
// associated chain complex.
struct HandleDecomposition {
    int dimension = 2;  // m
    std::vector<Handle> handles;  // attachment order, non-decreasing index
    std::set<IdPair> dependencies;  // (later, earlier)
    std::map<IdPair, std::int64_t> incidence;  // (from, to) -> coefficient
    bool boundary_nonempty = true;

    const Handle* find(const std::string& id) const;
    std::optional<std::size_t> position(const std::string& id) const;
    std::int64_t count_of_index(int k) const;
    // Positions (into `handles`) of the index-k handles, in attachment
    // order.  This ordering is the basis of chain group C_k.
    std::vector<std::size_t> positions_of_index(int k) const;

    bool operator==(const HandleDecomposition&) const = default;
};

// Page profile of an n-dimensional open book: the page is (n-1)-dimensional,
// has one 0-handle, nothing above index n-2, and counts[i-1] handles of
// index i for i = 1 .. n-2.
struct Profile {
    int n = 3;
    std::vector<std::int64_t> counts;

    bool operator==(const Profile&) const = default;
};

// Handle counts of a decomposition of a closed n-manifold, indexed 0..n.
struct ClosedProfile {
    int n = 3;
    std::vector<std::int64_t> counts;

    bool operator==(const ClosedProfile&) const = default;
};

struct Selection {
    std::set<std::string> ids;

    bool operator==(const Selection&) const = default;
};

enum class MonodromyKind { identity, annotated, tau };

std::string to_string(MonodromyKind kind);
std::optional<MonodromyKind> monodromy_kind_from_string(const std::string& s);

// How the monodromy is presented.  `identity` forces every handle's
// monodromy_trivial flag to true.  `annotated` carries no global structure;
// triviality lives on the per-handle flags.  `tau` selects the built-in
// twist supported on the double of the k-stabilization page; its action on
// homology is generated, not stored.
struct MonodromySpec {
    MonodromyKind kind = MonodromyKind::identity;
    int tau_k = 0;  // only meaningful when kind == tau
    int sign = +1;
    std::map<int, IntegerMatrix> homology_action;  // degree -> matrix

    bool operator==(const MonodromySpec&) const = default;
};

struct Violation {
    std::string invariant;  // stable identifier, e.g. "dependency-order"
    std::vector<std::string> ids;  // offending handles, when applicable
    std::string detail;
};

// Checks every structural invariant of `h` and returns one Violation per
// breach (empty result == valid).  Never throws.
std::vector<Violation> validate_decomposition(const HandleDecomposition& h);

bool is_valid_decomposition(const HandleDecomposition& h);

// No dependencies and no incidence: the decomposition is a boundary
// connected sum of trivially attached handles.
bool is_natural(const HandleDecomposition& h);

bool all_monodromy_trivial(const HandleDecomposition& h);

// sum (-1)^k counts[k] over the whole vector.
std::int64_t alternating_sum(const std::vector<std::int64_t>& counts);

// Counts of `h` as a full vector over index 0..dimension.
std::vector<std::int64_t> full_counts(const HandleDecomposition& h);

// Page profile of a valid page of an n-dimensional open book.  Rejects
// closed decompositions, top-index handles and dimension mismatches.
Profile profile_of(const HandleDecomposition& h, int n);

// chi of the page: 1 - mu_1 + mu_2 - ...
std::int64_t euler_characteristic(const Profile& p);

// Dual decomposition counts: index k goes to m - k, i.e. the vector
// reversed.  Input and output are indexed 0..m.
std::vector<std::int64_t> dual_counts(const std::vector<std::int64_t>& counts);

// Counts of the double: original handles plus the duals of all of them,
// so out[k] = in[k] + in[m-k].
std::vector<std::int64_t> double_counts(const std::vector<std::int64_t>& counts);

// Full 0..n-1 count vector of a page profile (prepends the 0-handle).
std::vector<std::int64_t> page_counts(const Profile& p);

struct SelectionCheck {
    bool valid = true;
    // "unknown-handle" | "index-out-of-range" | "not-upward-closed"
    std::string reason;
    std::vector<std::string> witness;
};

// A selection is valid when every id exists, every selected index lies in
// [2, n-1], and the set is closed upward under the dependency relation:
// whenever (a, b) is a dependency and b is selected, a is selected too.
SelectionCheck check_selection(const HandleDecomposition& h, const Selection& a, int n);

bool is_valid_selection(const HandleDecomposition& h, const Selection& a, int n);

// Valid selection whose handles all have trivial monodromy.  Throws
// CalculusError("invalid-selection") when the selection is not valid.
bool is_exchangeable(const HandleDecomposition& h, const Selection& a, int n);

// Smallest upward-closed superset of `seed` under the dependency relation.
Selection upward_closure(const HandleDecomposition& h, const std::set<std::string>& seed);

}  // namespace obcalc
