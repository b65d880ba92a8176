// Regenerates tests/fixtures/*.json in canonical form.  Not run by the
// build; invoke manually from the repository root after changing the
// document schema:  ./build/tools/make_fixtures tests/fixtures
#include "obcalc/document.hpp"
#include "obcalc/homology.hpp"
#include "obcalc/moves.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace obcalc;

namespace {

void write(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
    const std::filesystem::path p = dir / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) {
        std::cerr << "cannot write " << p << "\n";
        std::exit(1);
    }
    out << text;
    std::cout << "wrote " << p << "\n";
}

void write_doc(const std::filesystem::path& dir, const std::string& name, const Document& doc) {
    write(dir, name, serialize_document(doc));
}

// Annulus page at n=3 with one twisted 1-handle.
Document annulus_twist() {
    OpenBookDoc ob = natural_book(3, {1});
    ob.monodromy.kind = MonodromyKind::annotated;
    ob.page.handles[1].monodromy_trivial = false;
    ob.page.handles[1].boundary_label = "core circle";
    return make_document(std::move(ob));
}

// Disk page at n=4: the trivial open book on S^3.
Document disk_4() { return make_document(natural_book(4, {0, 0})); }

Document natural_5() { return make_document(natural_book(5, {1, 2, 3})); }

// A page with one canceling (2, 1) pair wired up with unit incidence.
Document cancel_pair_5() {
    OpenBookDoc ob = natural_book(5, {1, 1, 0});
    ob.page.dependencies.insert({"h2_0", "h1_0"});
    ob.page.incidence[{"h2_0", "h1_0"}] = 1;
    return make_document(std::move(ob));
}

// The built-in twist after stabilizing a disk, action matrices included.
Document tau_5() {
    MoveResult mr = stabilize_k(natural_book(5, {0, 0, 0}), 2);
    OpenBookDoc ob = std::move(mr.doc);
    ob.monodromy.homology_action = {{1, tau_action_on_double(5, 2, 1, +1)},
                                    {3, tau_action_on_double(5, 2, 3, +1)}};
    return make_document(std::move(ob), std::move(mr.log));
}

// A document whose history chains two moves.
Document history_6() {
    MoveResult s = stabilize_k(natural_book(6, {1, 0, 0, 0}), 3);
    MoveResult p = pad_move(s.doc, 2);
    MoveLog log = std::move(s.log);
    log.extend(p.log);
    return make_document(std::move(p.doc), std::move(log));
}

}  // namespace

int main(int argc, char** argv) {
    const std::filesystem::path dir = argc > 1 ? argv[1] : "tests/fixtures";
    std::filesystem::create_directories(dir);

    write_doc(dir, "annulus_twist.json", annulus_twist());
    write_doc(dir, "disk_4.json", disk_4());
    write_doc(dir, "natural_5.json", natural_5());
    write_doc(dir, "cancel_pair_5.json", cancel_pair_5());
    write_doc(dir, "tau_5.json", tau_5());
    write_doc(dir, "history_6.json", history_6());

    // Non-canonical on purpose: an unknown field for strict/lenient tests.
    nlohmann::json j = nlohmann::json::parse(serialize_document(disk_4()));
    j["page"]["color"] = "red";
    write(dir, "lenient_extra.json", j.dump(2) + "\n");

    return 0;
}
