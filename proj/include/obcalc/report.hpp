#pragma once

#include "obcalc/document.hpp"

#include <json.hpp>

namespace obcalc {

struct Check {
    std::string name;
    bool pass = false;
    std::string expected;  // empty for purely informational checks
    std::string actual;
    std::string rule;  // law the check verifies
};

// Result of one CLI command: the echoed invocation, every check performed,
// any parse diagnostics, and a structured payload for machine consumers.
struct Report {
    std::string command;
    std::vector<Check> checks;
    std::vector<Diagnostic> diagnostics;
    nlohmann::ordered_json data = nlohmann::ordered_json::object();
    int exit_status = 0;

    void add(Check c);
    void add_pass(const std::string& name, const std::string& actual,
                  const std::string& rule = "");
    void add_fail(const std::string& name, const std::string& expected,
                  const std::string& actual, const std::string& rule = "");
    bool all_pass() const;
    // Recomputes exit_status from checks and diagnostics.
    void finalize();
};

std::string render_text(const Report& r);
nlohmann::ordered_json render_machine(const Report& r);

}  // namespace obcalc
