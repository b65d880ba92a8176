#include "obcalc/cli.hpp"

#include "obcalc/homology.hpp"
#include "obcalc/selftest.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace obcalc {

namespace {

std::string counts_str(const std::vector<std::int64_t>& v) {
    std::string out = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(v[i]);
    }
    return out + ")";
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw CalculusError("io-error", "cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Loads and validates a document, folding diagnostics into the report.
// Returns nullopt (with report.exit_status already raised) on failure.
std::optional<Document> load_document(const std::string& path, bool lenient, Report& rep) {
    const std::string text = read_file(path);
    ParseResult pr = parse_document(text, lenient);
    for (const Diagnostic& d : pr.diagnostics) rep.diagnostics.push_back(d);
    return pr.doc;
}

nlohmann::ordered_json group_json(const GradedAbelianGroup& g) {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& [deg, piece] : g.pieces) {
        nlohmann::ordered_json one;
        one["free_rank"] = piece.free_rank;
        nlohmann::ordered_json tor = nlohmann::ordered_json::array();
        for (const Int& d : piece.torsion) tor.push_back(d.str());
        one["torsion"] = std::move(tor);
        out[std::to_string(deg)] = std::move(one);
    }
    return out;
}

nlohmann::ordered_json duals_json(const std::vector<DualAttachingDescription>& duals) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const DualAttachingDescription& d : duals) {
        nlohmann::ordered_json one;
        one["page_handle"] = d.page_handle;
        one["dual_index"] = d.dual_index;
        one["back_cover"] = d.back_cover;
        one["front_cover"] = d.front_cover;
        one["front_identity"] = d.front_identity;
        out.push_back(std::move(one));
    }
    return out;
}

// Appends freshly produced records to the document history and wraps the
// transformed book for output.
Document transformed(const Document& in, OpenBookDoc book, const MoveLog& log) {
    Document out = make_document(std::move(book), in.history);
    out.history.extend(log);
    return out;
}

struct Options {
    bool machine = false;
    bool lenient = false;
    std::string out_path;
};

}  // namespace

CommandResult run_command(const std::vector<std::string>& args) {
    CommandResult result;
    Report& rep = result.report;
    {
        std::string echo = "obcalc";
        for (const std::string& a : args) echo += " " + a;
        rep.command = echo;
    }

    CLI::App app{"symbolic handle calculus for open book decompositions"};
    app.name("obcalc");
    app.fallthrough();

    Options opt;
    app.add_flag("--machine", opt.machine, "structured (JSON) report on stderr");
    app.add_flag("--lenient", opt.lenient, "downgrade unknown document fields to warnings");
    app.add_option("--out", opt.out_path, "write the output document to FILE instead of stdout");

    std::string file_a, file_b, select_csv, pair_csv;
    int k_arg = 0, j_arg = 0, n_arg = 0, sign_arg = 1;
    bool middle = false, homology_page = false, homology_double = false,
         homology_open_book = false;
    std::uint64_t seed = selftest::default_seed;
    std::string mutation;

    CLI::App* c_validate = app.add_subcommand("validate", "check a document against every invariant");
    c_validate->add_option("file", file_a, "document")->required();

    CLI::App* c_profile = app.add_subcommand("profile", "page handle counts");
    c_profile->add_option("file", file_a, "document")->required();

    CLI::App* c_euler = app.add_subcommand("euler", "Euler characteristics of page and total space");
    c_euler->add_option("file", file_a, "document")->required();

    CLI::App* c_induce = app.add_subcommand("induce", "handle counts induced on the total space");
    c_induce->add_option("file", file_a, "document")->required();

    CLI::App* c_exchange = app.add_subcommand("exchange", "exchange a selection of handles");
    c_exchange->add_option("file", file_a, "document")->required();
    c_exchange->add_option("--select", select_csv, "comma-separated handle ids")->required();

    CLI::App* c_stab = app.add_subcommand("stabilize", "stabilize the open book");
    c_stab->add_option("file", file_a, "document")->required();
    CLI::Option* stab_k = c_stab->add_option("--k", k_arg, "stabilization index");
    CLI::Option* stab_mid = c_stab->add_flag("--middle", middle, "middle stabilization");
    stab_k->excludes(stab_mid);

    CLI::App* c_pad = app.add_subcommand("pad", "append a canceling pair");
    c_pad->add_option("file", file_a, "document")->required();
    c_pad->add_option("--j", j_arg, "lower index of the pair")->required();

    CLI::App* c_padex = app.add_subcommand("pad-exchange", "pad then exchange the padded pair");
    c_padex->add_option("file", file_a, "document")->required();
    c_padex->add_option("--j", j_arg, "lower index of the pad")->required();

    CLI::App* c_cancel = app.add_subcommand("cancel", "remove a canceling pair");
    c_cancel->add_option("file", file_a, "document")->required();
    c_cancel->add_option("--pair", pair_csv, "upper,lower handle ids")->required();

    CLI::App* c_normal = app.add_subcommand("normal-form", "exchange every middle-index handle");
    c_normal->add_option("file", file_a, "document")->required();

    CLI::App* c_equalize = app.add_subcommand("equalize", "pad two pages to equal handle counts");
    c_equalize->add_option("file_a", file_a, "first document")->required();
    c_equalize->add_option("file_b", file_b, "second document")->required();

    CLI::App* c_common = app.add_subcommand("common-page", "stabilize two open books to a shared page");
    c_common->add_option("file_a", file_a, "first document")->required();
    c_common->add_option("file_b", file_b, "second document")->required();

    CLI::App* c_homology = app.add_subcommand("homology", "integral homology");
    c_homology->add_option("file", file_a, "document")->required();
    CLI::Option* h_page = c_homology->add_flag("--page", homology_page, "homology of the page");
    CLI::Option* h_double = c_homology->add_flag("--double", homology_double, "homology of the double of the page");
    CLI::Option* h_ob = c_homology->add_flag("--open-book", homology_open_book, "homology of the total space");
    h_page->excludes(h_double)->excludes(h_ob);
    h_double->excludes(h_ob);

    CLI::App* c_distinguish = app.add_subcommand("distinguish", "tell twin twists apart on homology");
    c_distinguish->add_option("--n", n_arg, "total space dimension")->required();
    c_distinguish->add_option("--k", k_arg, "stabilization index")->required();
    c_distinguish->add_option("--sign", sign_arg, "framing sign, +1 or -1");

    CLI::App* c_selftest = app.add_subcommand("selftest", "run the built-in suites");
    c_selftest->add_option("--seed", seed, "random seed");
    c_selftest->add_option("--mutate", mutation,
                           "enable one named fault injection (testing hook)");

    app.require_subcommand(0, 1);

    try {
        std::vector<const char*> argv;
        argv.push_back("obcalc");
        for (const std::string& a : args) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        result.exit_code = 0;
        rep.exit_status = 0;
        return result;
    } catch (const CLI::ParseError& e) {
        rep.diagnostics.push_back({"error", "usage", e.what(), ""});
        result.exit_code = 2;
        rep.exit_status = 2;
        return result;
    }

    result.machine = opt.machine;
    result.out_path = opt.out_path;

    if (app.get_subcommands().empty()) {
        rep.diagnostics.push_back({"error", "usage", "a subcommand is required", ""});
        result.exit_code = 2;
        rep.exit_status = 2;
        return result;
    }

    try {
        if (std::getenv("OBCALC_INTERNAL_FAULT"))
            throw InternalError("internal fault injected for testing");

        if (*c_validate) {
            auto doc = load_document(file_a, opt.lenient, rep);
            if (doc) {
                const Profile p = profile_of(doc->book.page, doc->book.n);
                rep.add_pass("document-valid", "n = " + std::to_string(doc->book.n) +
                                                   ", profile " + counts_str(p.counts));
                rep.data["n"] = doc->book.n;
                rep.data["profile"] = p.counts;
            }
        } else if (*c_profile) {
            auto doc = load_document(file_a, opt.lenient, rep);
            if (doc) {
                const Profile p = profile_of(doc->book.page, doc->book.n);
                rep.add_pass("profile", counts_str(p.counts));
                rep.data["n"] = p.n;
                rep.data["profile"] = p.counts;
            }
        } else if (*c_euler) {
            auto doc = load_document(file_a, opt.lenient, rep);
            if (doc) {
                const Profile p = profile_of(doc->book.page, doc->book.n);
                const std::int64_t page_chi = euler_characteristic(p);
                const std::int64_t total_chi = open_book_euler(p);
                rep.add_pass("page-euler", std::to_string(page_chi));
                rep.add_pass("open-book-euler", std::to_string(total_chi), "open-book-euler-law");
                rep.data["page_euler"] = page_chi;
                rep.data["open_book_euler"] = total_chi;
            }
        } else if (*c_induce) {
            auto doc = load_document(file_a, opt.lenient, rep);
            if (doc) {
                const Profile p = profile_of(doc->book.page, doc->book.n);
                const InducedOpenBook io = induce_open_book(doc->book);
                rep.add_pass("closed-profile", counts_str(io.counts.counts),
                             "induced-open-book-law");
                const std::int64_t lhs = alternating_sum(io.counts.counts);
                const std::int64_t rhs = open_book_euler(p);
                if (lhs == rhs)
                    rep.add_pass("euler-law", "chi = " + std::to_string(lhs), "open-book-euler-law");
                else
                    rep.add_fail("euler-law", std::to_string(rhs), std::to_string(lhs),
                                 "open-book-euler-law");
                rep.data["closed_profile"] = io.counts.counts;
                rep.data["annotations"] = duals_json(io.duals);
            }
        } else if (*c_exchange) {
            auto doc = load_document(file_a, opt.lenient, rep);
            if (doc) {
                Selection sel;
                if (!select_csv.empty())
                    for (std::string& id : split_csv(select_csv)) sel.ids.insert(std::move(id));
                const CommutationCheck cc = verify_exchange_commutation(doc->book, sel);
                MoveResult mr = exchange_page(doc->book, sel);
                if (cc.equal)
                    rep.add_pass("exchange-commutation", counts_str(cc.direct.counts),
                                 "exchange-commutation-law");
                else
                    rep.add_fail("exchange-commutation", counts_str(cc.direct.counts),
                                 counts_str(cc.exchanged.counts), "exchange-commutation-law");
                rep.data["profile_before"] = mr.log.records.front().before;
                rep.data["profile_after"] = mr.log.records.front().after;
                rep.data["log"] = log_to_json(mr.log);
                result.output = transformed(*doc, std::move(mr.doc), mr.log);
            }
        } else if (*c_stab) {
            if (!*stab_k && !*stab_mid)
                throw CLI::RequiredError("--k or --middle");
            auto doc = load_document(file_a, opt.lenient, rep);
            if (doc) {
                MoveResult mr = *stab_k ? stabilize_k(doc->book, k_arg)
                                        : stabilize_middle(doc->book);
                const MoveRecord& r = mr.log.records.front();
                rep.add_pass("chi-delta",
                             std::to_string(r.chi_before) + " -> " + std::to_string(r.chi_after),
                             r.rule);
                rep.data["profile_before"] = r.before;
                rep.data["profile_after"] = r.after;
                rep.data["log"] = log_to_json(mr.log);
                result.output = transformed(*doc, std::move(mr.doc), mr.log);
            }
        } else if (*c_pad) {
            auto doc = load_document(file_a, opt.lenient, rep);
            if (doc) {
                MoveResult mr = pad_move(doc->book, j_arg);
                const MoveRecord& r = mr.log.records.front();
                rep.add_pass("profile-after", counts_str(r.after), r.rule);
                rep.data["log"] = log_to_json(mr.log);
                result.output = transformed(*doc, std::move(mr.doc), mr.log);
            }
        } else if (*c_padex) {
            auto doc = load_document(file_a, opt.lenient, rep);
            if (doc) {
                MoveResult mr = pad_and_exchange(doc->book, j_arg);
                const MoveRecord& r = mr.log.records.front();
                rep.add_pass("profile-after", counts_str(r.after), r.rule);
                rep.data["log"] = log_to_json(mr.log);
                result.output = transformed(*doc, std::move(mr.doc), mr.log);
            }
        } else if (*c_cancel) {
            std::vector<std::string> pair = split_csv(pair_csv);
            if (pair.size() != 2 || pair[0].empty() || pair[1].empty()) {
                rep.diagnostics.push_back(
                    {"error", "usage", "--pair expects exactly two ids, e.g. --pair a,b", ""});
                result.exit_code = 2;
                rep.exit_status = 2;
                return result;
            }
            auto doc = load_document(file_a, opt.lenient, rep);
            if (doc) {
                MoveResult mr = cancel_pair_move(doc->book, pair[0], pair[1]);
                const MoveRecord& r = mr.log.records.front();
                rep.add_pass("profile-after", counts_str(r.after), r.rule);
                rep.data["log"] = log_to_json(mr.log);
                result.output = transformed(*doc, std::move(mr.doc), mr.log);
            }
        } else if (*c_normal) {
            auto doc = load_document(file_a, opt.lenient, rep);
            if (doc) {
                MoveResult mr = normal_form(doc->book);
                const Profile p = profile_of(mr.doc.page, mr.doc.n);
                rep.add_pass("profile-after", counts_str(p.counts), "normal-form");
                rep.data["log"] = log_to_json(mr.log);
                result.output = transformed(*doc, std::move(mr.doc), mr.log);
            }
        } else if (*c_equalize) {
            auto da = load_document(file_a, opt.lenient, rep);
            auto db = load_document(file_b, opt.lenient, rep);
            if (da && db) {
                const Profile pa = profile_of(da->book.page, da->book.n);
                const Profile pb = profile_of(db->book.page, db->book.n);
                EqualizeResult eq = equalize_handle_counts(pa, pb);
                rep.add_pass("common-counts", counts_str(eq.left.counts),
                             "canceling-pair-padding");
                const auto ra = replay_log(eq.left_log, pa.n, pa.counts);
                const auto rb = replay_log(eq.right_log, pb.n, pb.counts);
                if (ra == eq.left.counts && rb == eq.right.counts)
                    rep.add_pass("logs-replay", std::to_string(eq.left_log.records.size()) +
                                                    " + " +
                                                    std::to_string(eq.right_log.records.size()) +
                                                    " pads");
                else
                    rep.add_fail("logs-replay", counts_str(eq.left.counts),
                                 counts_str(ra) + " / " + counts_str(rb));
                rep.data["common"] = eq.left.counts;
                rep.data["left_log"] = log_to_json(eq.left_log);
                rep.data["right_log"] = log_to_json(eq.right_log);
            }
        } else if (*c_common) {
            auto da = load_document(file_a, opt.lenient, rep);
            auto db = load_document(file_b, opt.lenient, rep);
            if (da && db) {
                const Profile pa = profile_of(da->book.page, da->book.n);
                const Profile pb = profile_of(db->book.page, db->book.n);
                CommonPageResult cp = common_page(da->book, db->book);
                rep.add_pass("common-page", counts_str(cp.common.counts),
                             "common-page-construction");
                const auto ra = replay_log(cp.left_log, pa.n, pa.counts);
                const auto rb = replay_log(cp.right_log, pb.n, pb.counts);
                if (ra == cp.common.counts && rb == cp.common.counts)
                    rep.add_pass("logs-replay", std::to_string(cp.left_log.records.size()) +
                                                    " + " +
                                                    std::to_string(cp.right_log.records.size()) +
                                                    " moves");
                else
                    rep.add_fail("logs-replay", counts_str(cp.common.counts),
                                 counts_str(ra) + " / " + counts_str(rb));
                rep.data["common"] = cp.common.counts;
                rep.data["left_log"] = log_to_json(cp.left_log);
                rep.data["right_log"] = log_to_json(cp.right_log);
            }
        } else if (*c_homology) {
            if (!homology_page && !homology_double && !homology_open_book)
                throw CLI::RequiredError("--page, --double or --open-book");
            auto doc = load_document(file_a, opt.lenient, rep);
            if (doc) {
                GradedAbelianGroup g;
                std::string route = "closed-form";
                if (homology_page) {
                    if (is_natural(doc->book.page)) {
                        g = page_homology(profile_of(doc->book.page, doc->book.n));
                    } else {
                        g = homology_of_complex(chain_complex_of(doc->book.page));
                        route = "chain-complex";
                    }
                } else if (homology_double) {
                    if (!is_natural(doc->book.page))
                        throw CalculusError("non-natural-page",
                                            "the double closed form needs a natural page");
                    g = double_homology_natural(profile_of(doc->book.page, doc->book.n));
                } else {
                    if (!is_natural(doc->book.page))
                        throw CalculusError("non-natural-page",
                                            "the total-space closed form needs a natural page");
                    if (doc->book.monodromy.kind != MonodromyKind::identity)
                        throw CalculusError("non-identity-monodromy",
                                            "the total-space closed form needs identity monodromy");
                    g = open_book_homology_trivial(profile_of(doc->book.page, doc->book.n));
                }
                rep.add_pass("homology", g.to_string(), route);
                rep.data["route"] = route;
                rep.data["groups"] = group_json(g);
            }
        } else if (*c_distinguish) {
            const DistinguishResult dr = distinguish_monodromies(n_arg, k_arg, sign_arg);
            if (dr.distinguished)
                rep.add_pass("distinguished",
                             "witness degree " + std::to_string(dr.witness_degree),
                             "twist-action-law");
            else
                rep.add_fail("distinguished", "distinct actions", "identical actions",
                             "twist-action-law");
            rep.data["witness_degree"] = dr.witness_degree;
            nlohmann::ordered_json rows = nlohmann::ordered_json::array();
            for (const auto& row : dr.rows) {
                nlohmann::ordered_json one;
                one["degree"] = row.degree;
                one["basis"] = {tau_basis(n_arg, k_arg, row.degree).labels[0],
                                tau_basis(n_arg, k_arg, row.degree).labels[1]};
                one["tau_k"] = row.first.to_string();
                one["tau_other"] = row.second.to_string();
                rows.push_back(std::move(one));
            }
            rep.data["actions"] = std::move(rows);
        } else if (*c_selftest) {
            Report sub = selftest::run(seed, mutation);
            sub.command = rep.command;
            sub.diagnostics.insert(sub.diagnostics.begin(), rep.diagnostics.begin(),
                                   rep.diagnostics.end());
            rep = std::move(sub);
        }
    } catch (const CLI::ParseError& e) {
        rep.diagnostics.push_back({"error", "usage", e.what(), ""});
        result.exit_code = 2;
        rep.exit_status = 2;
        return result;
    } catch (const CalculusError& e) {
        rep.diagnostics.push_back({"error", e.code(), e.what(), ""});
        result.exit_code = 1;
        rep.exit_status = 1;
        result.output.reset();
        return result;
    } catch (const InternalError& e) {
        rep.diagnostics.push_back({"error", "internal", e.what(), ""});
        result.exit_code = 3;
        rep.exit_status = 3;
        result.output.reset();
        return result;
    } catch (const std::exception& e) {
        rep.diagnostics.push_back({"error", "internal", e.what(), ""});
        result.exit_code = 3;
        rep.exit_status = 3;
        result.output.reset();
        return result;
    }

    rep.finalize();
    result.exit_code = rep.exit_status;
    return result;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);

    CommandResult result = run_command(args);

    if (result.output) {
        const std::string text = serialize_document(*result.output);
        if (result.out_path.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(result.out_path, std::ios::binary);
            if (out) out << text;
            if (!out) {
                result.report.diagnostics.push_back(
                    {"error", "io-error", "cannot write " + result.out_path, ""});
                if (result.exit_code == 0) {
                    result.exit_code = 1;
                    result.report.exit_status = 1;
                }
            }
        }
    }

    // A bare help invocation produced its text on stdout already; an empty
    // clean report would only add noise.
    const bool silent = result.exit_code == 0 && result.report.checks.empty() &&
                        result.report.diagnostics.empty();
    if (!silent) {
        if (result.machine)
            std::cerr << render_machine(result.report).dump(2) << "\n";
        else
            std::cerr << render_text(result.report);
    }
    return result.exit_code;
}

}  // namespace obcalc
