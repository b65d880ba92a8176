#include "obcalc/report.hpp"

#include <sstream>

namespace obcalc {

void Report::add(Check c) { checks.push_back(std::move(c)); }

void Report::add_pass(const std::string& name, const std::string& actual,
                      const std::string& rule) {
    checks.push_back({name, true, "", actual, rule});
}

void Report::add_fail(const std::string& name, const std::string& expected,
                      const std::string& actual, const std::string& rule) {
    checks.push_back({name, false, expected, actual, rule});
}

bool Report::all_pass() const {
    for (const Check& c : checks)
        if (!c.pass) return false;
    for (const Diagnostic& d : diagnostics)
        if (d.severity == "error") return false;
    return true;
}

void Report::finalize() { exit_status = all_pass() ? 0 : 1; }

std::string render_text(const Report& r) {
    std::ostringstream os;
    os << "$ " << r.command << "\n";
    for (const Diagnostic& d : r.diagnostics) {
        os << (d.severity == "error" ? "[ERROR] " : "[WARN]  ") << d.code;
        if (!d.path.empty()) os << " at " << d.path;
        os << ": " << d.message << "\n";
    }
    for (const Check& c : r.checks) {
        os << (c.pass ? "[PASS] " : "[FAIL] ") << c.name;
        if (c.pass) {
            if (!c.actual.empty()) os << ": " << c.actual;
        } else {
            if (!c.expected.empty() || !c.actual.empty())
                os << ": expected " << c.expected << ", got " << c.actual;
        }
        if (!c.rule.empty()) os << "  [" << c.rule << "]";
        os << "\n";
    }
    os << (r.exit_status == 0 ? "ok" : "failed") << " (" << r.checks.size() << " checks)\n";
    return os.str();
}

nlohmann::ordered_json render_machine(const Report& r) {
    nlohmann::ordered_json out;
    out["command"] = r.command;
    out["exit_status"] = r.exit_status;
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const Check& c : r.checks) {
        nlohmann::ordered_json one;
        one["name"] = c.name;
        one["pass"] = c.pass;
        if (!c.expected.empty()) one["expected"] = c.expected;
        if (!c.actual.empty()) one["actual"] = c.actual;
        if (!c.rule.empty()) one["rule"] = c.rule;
        checks.push_back(std::move(one));
    }
    out["checks"] = std::move(checks);
    if (!r.diagnostics.empty()) {
        nlohmann::ordered_json diags = nlohmann::ordered_json::array();
        for (const Diagnostic& d : r.diagnostics) {
            nlohmann::ordered_json one;
            one["severity"] = d.severity;
            one["code"] = d.code;
            one["message"] = d.message;
            if (!d.path.empty()) one["path"] = d.path;
            diags.push_back(std::move(one));
        }
        out["diagnostics"] = std::move(diags);
    }
    if (!r.data.empty()) out["data"] = r.data;
    return out;
}

}  // namespace obcalc
