#pragma once

#include "obcalc/moves.hpp"

#include <json.hpp>

namespace obcalc {

// On-disk unit: an open book plus the move history that produced it.
struct Document {
    int version = 1;
    OpenBookDoc book;
    MoveLog history;

    bool operator==(const Document&) const = default;
};

struct Diagnostic {
    std::string severity;  // "error" | "warning"
    std::string code;      // stable identifier, e.g. "duplicate-id"
    std::string message;
    std::string path;      // JSON pointer to the offending element
};

struct ParseResult {
    std::optional<Document> doc;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return doc.has_value(); }
    bool has_errors() const;
};

// Parses and fully validates a document.  In strict mode unknown fields are
// errors; in lenient mode they are warnings and parsing proceeds.  On any
// error `doc` is empty and `diagnostics` says why, with JSON-pointer paths
// (line/column for syntax errors).
ParseResult parse_document(const std::string& text, bool lenient = false);

// Canonical form: sorted object keys, two-space indent, arrays in
// canonical order, trailing newline.  parse_document(serialize_document(d))
// reproduces `d` exactly, and serialization of a parsed canonical file is
// byte-identical to the file.
std::string serialize_document(const Document& doc);

Document make_document(OpenBookDoc book, MoveLog history = {});

// Canonical JSON shapes of log entries, shared by serialization and the
// machine-readable report payloads.
nlohmann::json record_to_json(const MoveRecord& r);
nlohmann::json log_to_json(const MoveLog& log);

}  // namespace obcalc
