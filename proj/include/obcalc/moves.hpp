#pragma once

#include "obcalc/core.hpp"

namespace obcalc {

enum class MoveKind {
    induce,
    dual,
    exchange,
    stabilize_k,
    stabilize_middle,
    pad,
    pad_and_exchange,
    cancel,
    normal_form,
};

std::string to_string(MoveKind k);
std::optional<MoveKind> move_kind_from_string(const std::string& s);

// One entry of a move log.  `before`/`after` are page profile counts
// (mu_1..mu_{n-2}); `ids`/`indices` name the handles a move consumed, in
// matching order, so a log can be replayed on bare profiles.
struct MoveRecord {
    MoveKind kind = MoveKind::exchange;
    std::optional<int> param;  // k for stabilize_k, j for pad / pad_and_exchange
    std::vector<std::string> ids;
    std::vector<int> indices;
    std::vector<std::int64_t> before;
    std::vector<std::int64_t> after;
    std::int64_t chi_before = 0;
    std::int64_t chi_after = 0;
    std::string rule;  // law justifying the move

    bool operator==(const MoveRecord&) const = default;
};

struct MoveLog {
    std::vector<MoveRecord> records;

    void append(MoveRecord r) { records.push_back(std::move(r)); }
    void extend(const MoveLog& o);
    bool empty() const { return records.empty(); }

    bool operator==(const MoveLog&) const = default;
};

struct OpenBookDoc {
    int n = 3;
    HandleDecomposition page;  // dimension n-1, nonempty boundary
    MonodromySpec monodromy;

    bool operator==(const OpenBookDoc&) const = default;
};

// Structural problems with an open book document (page validity, dimension
// fit, monodromy consistency).  Empty == valid.
std::vector<Violation> validate_open_book(const OpenBookDoc& ob);

// Natural page whose i-handles are h<i>_0, h<i>_1, ... with trivial flags.
HandleDecomposition natural_page(int n, const std::vector<std::int64_t>& counts);
OpenBookDoc natural_book(int n, const std::vector<std::int64_t>& counts);

// ---- profile bookkeeping --------------------------------------------------

// Applies one recorded move to a page profile; used to replay logs
// independently of the decompositions they were produced on.
std::vector<std::int64_t> apply_record(const MoveRecord& r, int n,
                                       const std::vector<std::int64_t>& counts);

// Replays `log` from `start`, checking that consecutive records chain, that
// every record's after/chi agree with the move's declared law, and returns
// the final counts.  Throws CalculusError("log-replay-mismatch") on breach.
std::vector<std::int64_t> replay_log(const MoveLog& log, int n,
                                     std::vector<std::int64_t> start);

// Non-throwing variant: one message per problem, empty == consistent.
std::vector<std::string> validate_log(const MoveLog& log, int n);

// ---- induction -------------------------------------------------------------

// Half open book: the page pushed up one dimension, handles unchanged.
HandleDecomposition induce_hob(const HandleDecomposition& page);

// The two-hemisphere description of the attaching sphere of the dual handle
// carried by a page handle: the cocore on the back cover and its monodromy
// image on the front cover.
struct DualAttachingDescription {
    std::string page_handle;
    int dual_index = 0;
    std::string back_cover;
    std::string front_cover;
    bool front_identity = true;
};

DualAttachingDescription dual_attaching_description(const OpenBookDoc& ob,
                                                    const std::string& id);

struct InducedOpenBook {
    ClosedProfile counts;
    std::vector<DualAttachingDescription> duals;
};

// Closed handle counts induced on the total space of the open book:
// c_i = mu_i + mu_{n-i} with out-of-range mu read as zero, except
// c_0 = c_n = 1.
InducedOpenBook induce_open_book(const OpenBookDoc& ob);

// chi of the total space: 2 * chi(page) for n even, 0 for n odd.
std::int64_t open_book_euler(const Profile& p);

// ---- moves ------------------------------------------------------------------

struct MoveResult {
    OpenBookDoc doc;
    MoveLog log;
};

// Replaces each selected k-handle by an (n-k)-handle attached trivially.
// Requires the selection to be valid and exchangeable.  New handles keep
// trivial monodromy only when the whole input is natural with identity
// monodromy; otherwise they are flagged non-trivial.
MoveResult exchange_page(const OpenBookDoc& ob, const Selection& a);

struct CommutationCheck {
    bool equal = false;
    ClosedProfile direct;     // induce, no exchange
    ClosedProfile exchanged;  // exchange then induce
};

// Exchange commutes with induction on closed handle counts.
CommutationCheck verify_exchange_commutation(const OpenBookDoc& ob, const Selection& a);

// Appends a (k-1)-handle and an (n-k)-handle, both with non-trivial
// monodromy.  2 <= k <= n-1.
MoveResult stabilize_k(const OpenBookDoc& ob, int k);

// Appends one middle handle of index (n-1)/2; page dimension must be even.
MoveResult stabilize_middle(const OpenBookDoc& ob);

// Removes a canceling pair: index(a) = index(b)+1, incidence +-1, and the
// pair is isolated in the dependency relation.
HandleDecomposition cancel_pair(const HandleDecomposition& h, const std::string& a,
                                const std::string& b);

// Appends a canceling (j, j+1) pair with incidence +1 and trivial flags.
HandleDecomposition pad_canceling_pair(const HandleDecomposition& h, int j);

MoveResult cancel_pair_move(const OpenBookDoc& ob, const std::string& a,
                            const std::string& b);
MoveResult pad_move(const OpenBookDoc& ob, int j);

// Pad at (j, j+1) then exchange the freshly padded pair; net effect on the
// profile is +e_{n-j-1} + e_{n-j}.  2 <= j <= n-2.
MoveResult pad_and_exchange(const OpenBookDoc& ob, int j);

// Every handle of index strictly above ceil(n/2); exchanging it leaves no
// index above ceil(n/2).
Selection almost_canonical_selection(const OpenBookDoc& ob);

// Exchanges every handle of index in [2, n-2]; requires identity monodromy.
// The profile comes out tail-reversed: (mu_1, mu_{n-2}, ..., mu_2).
// n = 3 has nothing to exchange and returns the input with an empty log.
MoveResult normal_form(const OpenBookDoc& ob);

// ---- profile-level procedures ----------------------------------------------

struct EqualizeResult {
    Profile left, right;  // equal counts on exit
    MoveLog left_log, right_log;
};

// Pads the smaller side at (j, j+1), sweeping j upward, until the profiles
// agree.  Requires equal n and equal Euler characteristic.
EqualizeResult equalize_handle_counts(const Profile& a, const Profile& b);

struct CommonPageResult {
    Profile common;
    MoveLog left_log, right_log;
};

// Produces one page profile both open books stabilize to, with the move
// logs that get each side there.  Requires identity monodromies and equal n;
// for even n the Euler characteristics must match, for odd n they must agree
// mod 2.
CommonPageResult common_page(const OpenBookDoc& x, const OpenBookDoc& y);

}  // namespace obcalc
