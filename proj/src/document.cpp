#include "obcalc/document.hpp"

#include <json.hpp>

#include <algorithm>
#include <limits>

namespace obcalc {

using json = nlohmann::json;  // std::map keys give the canonical sorted order

namespace {

std::int64_t to_i64(const Int& x) {
    if (x < std::numeric_limits<std::int64_t>::min() ||
        x > std::numeric_limits<std::int64_t>::max())
        throw InternalError("integer too large for document serialization");
    return x.convert_to<std::int64_t>();
}

json matrix_to_json(const IntegerMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_i64(m.at(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

json page_to_json(const HandleDecomposition& h) {
    json out;
    out["dimension"] = h.dimension;
    out["boundary_nonempty"] = h.boundary_nonempty;

    json handles = json::array();
    for (const Handle& hd : h.handles) {
        json one;
        one["id"] = hd.id;
        one["index"] = hd.index;
        one["monodromy_trivial"] = hd.monodromy_trivial;
        if (!hd.boundary_label.empty()) one["boundary_label"] = hd.boundary_label;
        handles.push_back(std::move(one));
    }
    out["handles"] = std::move(handles);

    json deps = json::array();
    for (const auto& [a, b] : h.dependencies) deps.push_back(json::array({a, b}));
    out["dependencies"] = std::move(deps);

    json inc = json::array();
    for (const auto& [pair, coeff] : h.incidence) {
        json one;
        one["from"] = pair.first;
        one["to"] = pair.second;
        one["coefficient"] = coeff;
        inc.push_back(std::move(one));
    }
    out["incidence"] = std::move(inc);
    return out;
}

json monodromy_to_json(const MonodromySpec& m) {
    json out;
    out["kind"] = to_string(m.kind);
    out["sign"] = m.sign;
    if (m.kind == MonodromyKind::tau) out["k"] = m.tau_k;
    if (!m.homology_action.empty()) {
        json action;
        for (const auto& [degree, mat] : m.homology_action)
            action[std::to_string(degree)] = matrix_to_json(mat);
        out["homology_action"] = std::move(action);
    }
    return out;
}

// ---- extraction with diagnostics -------------------------------------------

struct Ctx {
    std::vector<Diagnostic>& diags;
    bool lenient = false;
    bool failed = false;

    void error(const std::string& code, const std::string& message, const std::string& path) {
        diags.push_back({"error", code, message, path});
        failed = true;
    }
    void warn(const std::string& code, const std::string& message, const std::string& path) {
        diags.push_back({"warning", code, message, path});
    }
};

void check_keys(Ctx& cx, const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end()) {
            if (cx.lenient)
                cx.warn("unknown-field", "ignoring unknown field \"" + key + "\"",
                        path + "/" + key);
            else
                cx.error("unknown-field", "unknown field \"" + key + "\"", path + "/" + key);
        }
    }
}

const json* get_field(Ctx& cx, const json& obj, const std::string& path, const char* key,
                      bool required) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (required)
            cx.error("missing-field", std::string("missing required field \"") + key + "\"",
                     path + "/" + key);
        return nullptr;
    }
    return &*it;
}

bool want_int(Ctx& cx, const json& j, const std::string& path, std::int64_t& out) {
    if (!j.is_number_integer()) {
        cx.error("wrong-type", "expected an integer", path);
        return false;
    }
    out = j.get<std::int64_t>();
    return true;
}

bool want_small_int(Ctx& cx, const json& j, const std::string& path, int& out) {
    std::int64_t wide = 0;
    if (!want_int(cx, j, path, wide)) return false;
    if (wide < std::numeric_limits<int>::min() || wide > std::numeric_limits<int>::max()) {
        cx.error("wrong-type", "integer out of range", path);
        return false;
    }
    out = static_cast<int>(wide);
    return true;
}

bool want_string(Ctx& cx, const json& j, const std::string& path, std::string& out) {
    if (!j.is_string()) {
        cx.error("wrong-type", "expected a string", path);
        return false;
    }
    out = j.get<std::string>();
    return true;
}

bool want_bool(Ctx& cx, const json& j, const std::string& path, bool& out) {
    if (!j.is_boolean()) {
        cx.error("wrong-type", "expected a boolean", path);
        return false;
    }
    out = j.get<bool>();
    return true;
}

bool want_count_vector(Ctx& cx, const json& j, const std::string& path,
                       std::vector<std::int64_t>& out) {
    if (!j.is_array()) {
        cx.error("wrong-type", "expected an array of integers", path);
        return false;
    }
    out.clear();
    for (std::size_t i = 0; i < j.size(); ++i) {
        std::int64_t v = 0;
        if (!want_int(cx, j[i], path + "/" + std::to_string(i), v)) return false;
        out.push_back(v);
    }
    return true;
}

void parse_handles(Ctx& cx, const json& arr, const std::string& path, HandleDecomposition& h) {
    std::map<std::string, std::string> first_at;  // id -> path of first occurrence
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string hp = path + "/" + std::to_string(i);
        const json& one = arr[i];
        if (!one.is_object()) {
            cx.error("wrong-type", "expected a handle object", hp);
            continue;
        }
        check_keys(cx, one, hp, {"id", "index", "monodromy_trivial", "boundary_label"});
        Handle hd;
        if (const json* f = get_field(cx, one, hp, "id", true)) {
            if (want_string(cx, *f, hp + "/id", hd.id) && hd.id.empty())
                cx.error("bad-id", "handle id must be nonempty", hp + "/id");
        }
        if (const json* f = get_field(cx, one, hp, "index", true))
            want_small_int(cx, *f, hp + "/index", hd.index);
        if (const json* f = get_field(cx, one, hp, "monodromy_trivial", true))
            want_bool(cx, *f, hp + "/monodromy_trivial", hd.monodromy_trivial);
        if (const json* f = get_field(cx, one, hp, "boundary_label", false))
            want_string(cx, *f, hp + "/boundary_label", hd.boundary_label);

        if (!hd.id.empty()) {
            auto [it, inserted] = first_at.try_emplace(hd.id, hp);
            if (!inserted)
                cx.error("duplicate-id",
                         "handle id \"" + hd.id + "\" already declared at " + it->second, hp);
        }
        h.handles.push_back(std::move(hd));
    }
}

void parse_page(Ctx& cx, const json& j, const std::string& path, HandleDecomposition& h) {
    if (!j.is_object()) {
        cx.error("wrong-type", "expected the page object", path);
        return;
    }
    check_keys(cx, j, path,
               {"dimension", "handles", "dependencies", "incidence", "boundary_nonempty"});
    if (const json* f = get_field(cx, j, path, "dimension", true))
        want_small_int(cx, *f, path + "/dimension", h.dimension);
    if (const json* f = get_field(cx, j, path, "boundary_nonempty", true))
        want_bool(cx, *f, path + "/boundary_nonempty", h.boundary_nonempty);
    if (const json* f = get_field(cx, j, path, "handles", true)) {
        if (f->is_array())
            parse_handles(cx, *f, path + "/handles", h);
        else
            cx.error("wrong-type", "expected an array of handles", path + "/handles");
    }
    if (const json* f = get_field(cx, j, path, "dependencies", true)) {
        if (!f->is_array()) {
            cx.error("wrong-type", "expected an array of [a, b] pairs", path + "/dependencies");
        } else {
            for (std::size_t i = 0; i < f->size(); ++i) {
                const std::string dp = path + "/dependencies/" + std::to_string(i);
                const json& one = (*f)[i];
                if (!one.is_array() || one.size() != 2) {
                    cx.error("wrong-type", "expected a pair [a, b]", dp);
                    continue;
                }
                std::string a, b;
                if (!want_string(cx, one[0], dp + "/0", a) ||
                    !want_string(cx, one[1], dp + "/1", b))
                    continue;
                if (!h.dependencies.insert({a, b}).second)
                    cx.error("duplicate-entry", "dependency (" + a + ", " + b + ") repeats", dp);
            }
        }
    }
    if (const json* f = get_field(cx, j, path, "incidence", true)) {
        if (!f->is_array()) {
            cx.error("wrong-type", "expected an array of incidence entries", path + "/incidence");
        } else {
            for (std::size_t i = 0; i < f->size(); ++i) {
                const std::string ip = path + "/incidence/" + std::to_string(i);
                const json& one = (*f)[i];
                if (!one.is_object()) {
                    cx.error("wrong-type", "expected an incidence object", ip);
                    continue;
                }
                check_keys(cx, one, ip, {"from", "to", "coefficient"});
                std::string from, to;
                std::int64_t coeff = 0;
                bool ok = true;
                if (const json* g = get_field(cx, one, ip, "from", true))
                    ok = want_string(cx, *g, ip + "/from", from) && ok;
                else
                    ok = false;
                if (const json* g = get_field(cx, one, ip, "to", true))
                    ok = want_string(cx, *g, ip + "/to", to) && ok;
                else
                    ok = false;
                if (const json* g = get_field(cx, one, ip, "coefficient", true))
                    ok = want_int(cx, *g, ip + "/coefficient", coeff) && ok;
                else
                    ok = false;
                if (!ok) continue;
                if (!h.incidence.emplace(IdPair{from, to}, coeff).second)
                    cx.error("duplicate-entry", "incidence (" + from + ", " + to + ") repeats", ip);
            }
        }
    }
}

void parse_monodromy(Ctx& cx, const json& j, const std::string& path, MonodromySpec& m) {
    if (!j.is_object()) {
        cx.error("wrong-type", "expected the monodromy object", path);
        return;
    }
    check_keys(cx, j, path, {"kind", "sign", "k", "homology_action"});
    std::string kind;
    if (const json* f = get_field(cx, j, path, "kind", true)) {
        if (want_string(cx, *f, path + "/kind", kind)) {
            auto parsed = monodromy_kind_from_string(kind);
            if (!parsed)
                cx.error("bad-kind", "unknown monodromy kind \"" + kind + "\"", path + "/kind");
            else
                m.kind = *parsed;
        }
    }
    if (const json* f = get_field(cx, j, path, "sign", false))
        want_small_int(cx, *f, path + "/sign", m.sign);
    if (m.kind == MonodromyKind::tau) {
        if (const json* f = get_field(cx, j, path, "k", true))
            want_small_int(cx, *f, path + "/k", m.tau_k);
    } else if (j.contains("k")) {
        cx.error("unexpected-field", "\"k\" is only meaningful for kind \"tau\"", path + "/k");
    }
    if (const json* f = get_field(cx, j, path, "homology_action", false)) {
        if (!f->is_object()) {
            cx.error("wrong-type", "expected an object mapping degree to matrix",
                     path + "/homology_action");
            return;
        }
        for (const auto& [key, val] : f->items()) {
            const std::string ap = path + "/homology_action/" + key;
            int degree = -1;
            try {
                std::size_t used = 0;
                degree = std::stoi(key, &used);
                if (used != key.size()) degree = -1;
            } catch (...) {
                degree = -1;
            }
            if (degree < 0) {
                cx.error("bad-degree", "degree keys must be non-negative integers", ap);
                continue;
            }
            if (!val.is_array()) {
                cx.error("wrong-type", "expected a matrix (array of rows)", ap);
                continue;
            }
            const std::size_t rows = val.size();
            std::size_t cols = rows ? 0 : 0;
            bool ok = true;
            std::vector<std::vector<std::int64_t>> data;
            for (std::size_t i = 0; i < rows && ok; ++i) {
                std::vector<std::int64_t> row;
                if (!val[i].is_array()) {
                    cx.error("wrong-type", "expected a matrix row", ap + "/" + std::to_string(i));
                    ok = false;
                    break;
                }
                if (i == 0) cols = val[i].size();
                if (val[i].size() != cols) {
                    cx.error("wrong-type", "ragged matrix rows", ap + "/" + std::to_string(i));
                    ok = false;
                    break;
                }
                for (std::size_t c = 0; c < cols; ++c) {
                    std::int64_t v = 0;
                    if (!want_int(cx, val[i][c],
                                  ap + "/" + std::to_string(i) + "/" + std::to_string(c), v)) {
                        ok = false;
                        break;
                    }
                    row.push_back(v);
                }
                data.push_back(std::move(row));
            }
            if (!ok) continue;
            IntegerMatrix mat(rows, cols);
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t c = 0; c < cols; ++c) mat.at(i, c) = data[i][c];
            m.homology_action[degree] = std::move(mat);
        }
    }
}

void parse_history(Ctx& cx, const json& j, const std::string& path, MoveLog& log) {
    if (!j.is_array()) {
        cx.error("wrong-type", "expected an array of move records", path);
        return;
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string rp = path + "/" + std::to_string(i);
        const json& one = j[i];
        if (!one.is_object()) {
            cx.error("wrong-type", "expected a move record object", rp);
            continue;
        }
        check_keys(cx, one, rp,
                   {"kind", "param", "ids", "indices", "before", "after", "chi_before",
                    "chi_after", "rule"});
        MoveRecord r;
        if (const json* f = get_field(cx, one, rp, "kind", true)) {
            std::string kind;
            if (want_string(cx, *f, rp + "/kind", kind)) {
                auto parsed = move_kind_from_string(kind);
                if (!parsed)
                    cx.error("bad-kind", "unknown move kind \"" + kind + "\"", rp + "/kind");
                else
                    r.kind = *parsed;
            }
        }
        if (const json* f = get_field(cx, one, rp, "param", false)) {
            int p = 0;
            if (want_small_int(cx, *f, rp + "/param", p)) r.param = p;
        }
        if (const json* f = get_field(cx, one, rp, "ids", false)) {
            if (!f->is_array()) {
                cx.error("wrong-type", "expected an array of ids", rp + "/ids");
            } else {
                for (std::size_t t = 0; t < f->size(); ++t) {
                    std::string id;
                    if (want_string(cx, (*f)[t], rp + "/ids/" + std::to_string(t), id))
                        r.ids.push_back(std::move(id));
                }
            }
        }
        if (const json* f = get_field(cx, one, rp, "indices", false)) {
            if (!f->is_array()) {
                cx.error("wrong-type", "expected an array of indices", rp + "/indices");
            } else {
                for (std::size_t t = 0; t < f->size(); ++t) {
                    int k = 0;
                    if (want_small_int(cx, (*f)[t], rp + "/indices/" + std::to_string(t), k))
                        r.indices.push_back(k);
                }
            }
        }
        if (const json* f = get_field(cx, one, rp, "before", true))
            want_count_vector(cx, *f, rp + "/before", r.before);
        if (const json* f = get_field(cx, one, rp, "after", true))
            want_count_vector(cx, *f, rp + "/after", r.after);
        if (const json* f = get_field(cx, one, rp, "chi_before", true))
            want_int(cx, *f, rp + "/chi_before", r.chi_before);
        if (const json* f = get_field(cx, one, rp, "chi_after", true))
            want_int(cx, *f, rp + "/chi_after", r.chi_after);
        if (const json* f = get_field(cx, one, rp, "rule", true))
            want_string(cx, *f, rp + "/rule", r.rule);
        for (std::int64_t c : r.before)
            if (c < 0) cx.error("negative-count", "profile counts are non-negative", rp + "/before");
        for (std::int64_t c : r.after)
            if (c < 0) cx.error("negative-count", "profile counts are non-negative", rp + "/after");
        log.records.push_back(std::move(r));
    }
}

}  // namespace

bool ParseResult::has_errors() const {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == "error"; });
}

ParseResult parse_document(const std::string& text, bool lenient) {
    ParseResult out;
    Ctx cx{out.diagnostics, lenient};

    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        // e.byte is a 1-based offset into the input.
        std::size_t line = 1, col = 1;
        const std::size_t stop = std::min(text.size(), e.byte > 0 ? e.byte - 1 : 0);
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        cx.error("syntax",
                 "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                     e.what(),
                 "");
        return out;
    }

    if (!root.is_object()) {
        cx.error("wrong-type", "expected a document object", "");
        return out;
    }
    check_keys(cx, root, "", {"version", "n", "page", "monodromy", "history"});

    Document doc;
    if (const json* f = get_field(cx, root, "", "version", true)) {
        if (want_small_int(cx, *f, "/version", doc.version) && doc.version != 1)
            cx.error("bad-version", "unsupported document version " + std::to_string(doc.version),
                     "/version");
    }
    if (const json* f = get_field(cx, root, "", "n", true))
        want_small_int(cx, *f, "/n", doc.book.n);
    if (const json* f = get_field(cx, root, "", "page", true))
        parse_page(cx, *f, "/page", doc.book.page);
    if (const json* f = get_field(cx, root, "", "monodromy", true))
        parse_monodromy(cx, *f, "/monodromy", doc.book.monodromy);
    if (const json* f = get_field(cx, root, "", "history", true))
        parse_history(cx, *f, "/history", doc.history);

    if (cx.failed) return out;

    // Structural extraction succeeded; now the semantic invariants.
    for (const Violation& v : validate_open_book(doc.book)) {
        std::string msg = v.detail;
        if (!v.ids.empty()) {
            msg += " (";
            for (std::size_t i = 0; i < v.ids.size(); ++i)
                msg += (i ? ", " : "") + v.ids[i];
            msg += ")";
        }
        cx.error(v.invariant, msg, "/page");
    }
    for (const std::string& problem : validate_log(doc.history, doc.book.n))
        cx.error("bad-history", problem, "/history");

    // A history is the trail that produced the current page, so its final
    // profile must be the page's; appended moves then keep on chaining.
    if (!cx.failed && !doc.history.records.empty()) {
        const Profile now = profile_of(doc.book.page, doc.book.n);
        if (doc.history.records.back().after != now.counts)
            cx.error("history-page-mismatch",
                     "final history profile does not match the page", "/history");
    }

    if (cx.failed) return out;
    out.doc = std::move(doc);
    return out;
}

std::string serialize_document(const Document& doc) {
    json j;
    j["version"] = doc.version;
    j["n"] = doc.book.n;
    j["page"] = page_to_json(doc.book.page);
    j["monodromy"] = monodromy_to_json(doc.book.monodromy);
    json hist = json::array();
    for (const MoveRecord& r : doc.history.records) hist.push_back(record_to_json(r));
    j["history"] = std::move(hist);
    return j.dump(2) + "\n";
}

Document make_document(OpenBookDoc book, MoveLog history) {
    return Document{1, std::move(book), std::move(history)};
}

nlohmann::json record_to_json(const MoveRecord& r) {
    json out;
    out["kind"] = to_string(r.kind);
    if (r.param) out["param"] = *r.param;
    if (!r.ids.empty()) out["ids"] = r.ids;
    if (!r.indices.empty()) out["indices"] = r.indices;
    out["before"] = r.before;
    out["after"] = r.after;
    out["chi_before"] = r.chi_before;
    out["chi_after"] = r.chi_after;
    out["rule"] = r.rule;
    return out;
}

nlohmann::json log_to_json(const MoveLog& log) {
    json out = json::array();
    for (const MoveRecord& r : log.records) out.push_back(record_to_json(r));
    return out;
}

}  // namespace obcalc
