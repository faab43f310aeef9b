#include "whydb/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include "whydb/asp.hpp"
#include "whydb/causality.hpp"
#include "whydb/core.hpp"
#include "whydb/error.hpp"
#include "whydb/oracle.hpp"
#include "whydb/query.hpp"
#include "whydb/repair.hpp"

namespace whydb::cli {

namespace {

using nlohmann::json;

struct Invocation {
    std::string command;
    std::string db_path;
    std::string query_text;
    std::string query_path;
    std::string constraints_path;
    std::string hard_path;
    std::string format = "text";
    std::string dialect = "core_disjunctive";
    std::string kind = "s";
    std::optional<std::uint32_t> tid;
    bool no_cause_rules = false;
    bool contingency_union = false;
    bool responsibility_rules = false;
    bool weak_constraints = false;
    bool legacy_weak = false;
};

// Loaded inputs for one invocation.
struct Inputs {
    Instance inst;
    std::optional<UnionQuery> query;
    std::optional<ConstraintSet> constraints;
    std::vector<HardConstraint> hard;
};

std::string read_file(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw Error(ErrorKind::parse, "cannot read " + path);
    std::ostringstream buf;
    buf << file.rdbuf();
    return buf.str();
}

// Prefixes parse errors with the file they came from.
template <typename F>
auto with_source(const std::string& source, F&& f) {
    try {
        return f();
    } catch (const ParseError& e) {
        throw Error(ErrorKind::parse, source + ":" + e.what());
    }
}

Inputs load(const Invocation& inv) {
    Inputs in;
    in.inst = with_source(inv.db_path, [&] { return load_instance(read_file(inv.db_path)); });
    if (!inv.query_text.empty() && !inv.query_path.empty())
        throw Error(ErrorKind::invalid_option, "give either -q or --query-file, not both");
    if (!inv.query_text.empty())
        in.query = with_source("<query>", [&] { return parse_query(inv.query_text); });
    else if (!inv.query_path.empty())
        in.query = with_source(inv.query_path, [&] { return parse_query(read_file(inv.query_path)); });
    if (!inv.constraints_path.empty())
        in.constraints = with_source(inv.constraints_path, [&] {
            return parse_constraints(read_file(inv.constraints_path), in.inst.schema());
        });
    if (!inv.hard_path.empty())
        in.hard = with_source(inv.hard_path, [&] {
            return parse_hard_constraints(read_file(inv.hard_path), in.inst.schema());
        });
    return in;
}

const UnionQuery& need_query(const Inputs& in) {
    if (!in.query) throw Error(ErrorKind::invalid_option, "this command needs a query (-q or --query-file)");
    return *in.query;
}

const UnionQuery& need_boolean_query(const Inputs& in) {
    const UnionQuery& q = need_query(in);
    if (!q.is_boolean()) throw Error(ErrorKind::open_query, "this command needs a boolean query");
    return q;
}

ConstraintSet repair_constraints(const Inputs& in) {
    if (in.constraints) return *in.constraints;
    if (in.query) return negate_query(*in.query);
    throw Error(ErrorKind::invalid_option, "this command needs --constraints or a boolean query");
}

Tid need_tid(const Invocation& inv, const Instance& inst) {
    if (!inv.tid) throw Error(ErrorKind::invalid_option, "this command needs --tid");
    Tid t{*inv.tid};
    inst.tuple(t);
    return t;
}

// ---------------------------------------------------------------------------
// JSON shapes

json tuple_json(const Instance& inst, Tid t) {
    const Tuple& tu = inst.tuple(t);
    return {{"tid", t.value},
            {"predicate", tu.predicate},
            {"args", tu.args},
            {"exogenous", !tu.is_endogenous()},
            {"text", labelled_text(tu)}};
}

json tid_set_json(const TidSet& s) {
    json arr = json::array();
    for (Tid t : s) arr.push_back(t.value);
    return arr;
}

json responsibility_json(Responsibility r) {
    if (r.is_zero()) return 0;
    return {{"num", 1}, {"den", r.denominator()}};
}

json cause_json(const Instance& inst, const CauseReport& r) {
    json sets = json::array();
    for (const auto& g : r.minimal_contingency_sets) sets.push_back(tid_set_json(g));
    json minimum = json::array();
    for (const auto& g : minimum_contingency_sets(r)) minimum.push_back(tid_set_json(g));
    return {{"tuple", tuple_json(inst, r.tid)},
            {"responsibility", responsibility_json(r.responsibility)},
            {"counterfactual", r.is_counterfactual},
            {"most_responsible", r.is_most_responsible},
            {"minimal_contingency_sets", sets},
            {"minimum_contingency_sets", minimum}};
}

json envelope(const std::string& command) { return {{"schema", 1}, {"command", command}}; }

// ---------------------------------------------------------------------------
// Commands

void pad_row(std::ostream& out, const std::vector<std::string>& cells, const std::vector<std::size_t>& widths) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        line += cells[i];
        if (i + 1 < cells.size()) line += std::string(widths[i] - cells[i].size() + 2, ' ');
    }
    out << line << "\n";
}

void print_causes(std::ostream& out, const Instance& inst, const std::vector<CauseReport>& causes, bool as_json,
                  const std::string& command) {
    if (as_json) {
        json doc = envelope(command);
        doc["causes"] = json::array();
        for (const auto& r : causes) doc["causes"].push_back(cause_json(inst, r));
        out << doc.dump(2) << "\n";
        return;
    }
    std::vector<std::vector<std::string>> rows{{"tid", "tuple", "rho", "flags", "minimal contingency sets"}};
    for (const auto& r : causes) {
        std::string flags;
        if (r.is_counterfactual) flags += "counterfactual";
        if (r.is_most_responsible) flags += std::string(flags.empty() ? "" : ",") + "most-responsible";
        std::string sets;
        for (const auto& g : r.minimal_contingency_sets) sets += (sets.empty() ? "" : " ") + tuple_set_text(inst, g);
        rows.push_back({std::to_string(r.tid.value), atom_text(inst.tuple(r.tid)), r.responsibility.text(),
                        flags.empty() ? "-" : flags, sets});
    }
    std::vector<std::size_t> widths(rows.front().size(), 0);
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
    for (const auto& row : rows) pad_row(out, row, widths);
    out << causes.size() << (causes.size() == 1 ? " cause\n" : " causes\n");
}

void print_tid_list(std::ostream& out, const Instance& inst, const std::vector<Tid>& tids, bool as_json,
                    const std::string& command) {
    if (as_json) {
        json doc = envelope(command);
        doc["tuples"] = json::array();
        for (Tid t : tids) doc["tuples"].push_back(tuple_json(inst, t));
        out << doc.dump(2) << "\n";
        return;
    }
    for (Tid t : tids) out << labelled_text(inst.tuple(t)) << "\n";
    out << tids.size() << (tids.size() == 1 ? " tuple\n" : " tuples\n");
}

int cmd_query(const Invocation& inv, const Inputs& in, std::ostream& out) {
    const UnionQuery& q = need_query(in);
    const auto rows = answers(in.inst, q);
    if (inv.format == "json") {
        json doc = envelope("query");
        doc["boolean"] = q.is_boolean();
        doc["free_vars"] = q.free_vars();
        doc["answers"] = json::array();
        for (const auto& row : rows) doc["answers"].push_back(row);
        if (q.is_boolean()) doc["holds"] = !rows.empty();
        out << doc.dump(2) << "\n";
        return 0;
    }
    if (q.is_boolean()) {
        out << (rows.empty() ? "false" : "true") << "\n";
        return 0;
    }
    for (const auto& row : rows) {
        std::string line = "(";
        for (std::size_t i = 0; i < row.size(); ++i) line += (i ? "," : "") + row[i];
        out << line << ")\n";
    }
    out << rows.size() << (rows.size() == 1 ? " answer\n" : " answers\n");
    return 0;
}

int cmd_repairs(const Invocation& inv, const Inputs& in, std::ostream& out) {
    if (inv.kind != "s" && inv.kind != "c") throw Error(ErrorKind::invalid_option, "--kind must be s or c");
    const ConstraintSet cs = repair_constraints(in);
    const auto repairs = inv.kind == "s" ? s_repairs(in.inst, cs, in.hard) : c_repairs(in.inst, cs, in.hard);
    if (inv.format == "json") {
        json doc = envelope("repairs");
        doc["kind"] = inv.kind;
        doc["repairs"] = json::array();
        for (const auto& r : repairs)
            doc["repairs"].push_back({{"deleted", tid_set_json(r.deleted)}, {"retained", tid_set_json(r.retained)}});
        out << doc.dump(2) << "\n";
        return 0;
    }
    out << (inv.kind == "s" ? "S" : "C") << "-repairs: " << repairs.size() << "\n";
    for (std::size_t i = 0; i < repairs.size(); ++i) {
        out << "#" << i + 1 << " deleted:  " << tuple_set_text(in.inst, repairs[i].deleted) << "\n";
        out << std::string(std::to_string(i + 1).size() + 1, ' ') << " retained: "
            << tuple_set_text(in.inst, repairs[i].retained) << "\n";
    }
    return 0;
}

std::vector<CauseReport> causes_for(const Inputs& in) {
    const UnionQuery& q = need_boolean_query(in);
    return in.hard.empty() ? actual_causes(in.inst, q) : causes_under_ics(in.inst, q, in.hard);
}

std::vector<Tid> flagged(const std::vector<CauseReport>& causes, bool CauseReport::*flag) {
    std::vector<Tid> out;
    for (const auto& r : causes)
        if (r.*flag) out.push_back(r.tid);
    std::sort(out.begin(), out.end());
    return out;
}

int cmd_causes(const Invocation& inv, const Inputs& in, std::ostream& out) {
    const auto causes = causes_for(in);
    print_causes(out, in.inst, causes, inv.format == "json", "causes");
    return 0;
}

int cmd_contingency(const Invocation& inv, const Inputs& in, std::ostream& out) {
    const UnionQuery& q = need_boolean_query(in);
    const Tid t = need_tid(inv, in.inst);
    const auto sets = contingency_sets(in.inst, q, t);
    if (inv.format == "json") {
        json doc = envelope("contingency");
        doc["tuple"] = tuple_json(in.inst, t);
        doc["minimal_contingency_sets"] = json::array();
        for (const auto& g : sets) doc["minimal_contingency_sets"].push_back(tid_set_json(g));
        out << doc.dump(2) << "\n";
        return 0;
    }
    out << labelled_text(in.inst.tuple(t)) << ": ";
    if (sets.empty()) {
        out << "not an actual cause\n";
        return 0;
    }
    out << sets.size() << " minimal contingency set" << (sets.size() == 1 ? "" : "s") << "\n";
    for (const auto& g : sets) out << "  " << tuple_set_text(in.inst, g) << "\n";
    return 0;
}

int cmd_responsibility(const Invocation& inv, const Inputs& in, std::ostream& out) {
    const UnionQuery& q = need_boolean_query(in);
    std::vector<Tid> tids;
    if (inv.tid) {
        tids.push_back(need_tid(inv, in.inst));
    } else {
        for (Tid t : in.inst.endogenous_tids()) tids.push_back(t);
    }

    std::vector<std::pair<Tid, Responsibility>> rows;
    if (inv.tid) {
        rows.emplace_back(tids.front(), responsibility(in.inst, q, tids.front()));
    } else {
        std::map<Tid, Responsibility> by_tid;
        for (const auto& r : actual_causes(in.inst, q)) by_tid[r.tid] = r.responsibility;
        for (Tid t : tids) rows.emplace_back(t, by_tid.count(t) ? by_tid[t] : Responsibility::zero());
    }

    if (inv.format == "json") {
        json doc = envelope("responsibility");
        doc["responsibilities"] = json::array();
        for (const auto& [t, r] : rows)
            doc["responsibilities"].push_back(
                {{"tuple", tuple_json(in.inst, t)}, {"responsibility", responsibility_json(r)}});
        out << doc.dump(2) << "\n";
        return 0;
    }
    std::size_t width = 0;
    for (const auto& [t, r] : rows) width = std::max(width, labelled_text(in.inst.tuple(t)).size());
    for (const auto& [t, r] : rows) {
        const std::string label = labelled_text(in.inst.tuple(t));
        out << label << std::string(width - label.size() + 2, ' ') << r.text() << "\n";
    }
    return 0;
}

int cmd_emit(const Invocation& inv, const Inputs& in, std::ostream& out) {
    const auto dialect = parse_dialect(inv.dialect);
    if (!dialect) throw Error(ErrorKind::invalid_option, "unknown dialect " + inv.dialect);
    AspProgram prog;
    if (in.query) {
        CausalityProgramOptions opts;
        opts.cause_rules = !inv.no_cause_rules;
        opts.contingency_union = inv.contingency_union;
        opts.responsibility_rules = inv.responsibility_rules;
        opts.weak_constraints = inv.weak_constraints;
        opts.legacy_weak_syntax = inv.legacy_weak;
        opts.hard_constraints = in.hard;
        prog = emit_causality_program(in.inst, need_boolean_query(in), *dialect, opts);
    } else if (in.constraints) {
        if (inv.no_cause_rules || inv.contingency_union || inv.responsibility_rules || inv.weak_constraints ||
            inv.legacy_weak || !in.hard.empty())
            throw Error(ErrorKind::invalid_option, "causality program options need a query");
        prog = emit_repair_program(in.inst, *in.constraints, *dialect);
    } else {
        throw Error(ErrorKind::invalid_option, "emit-asp needs a query or --constraints");
    }
    if (inv.format == "json") {
        json doc = envelope("emit-asp");
        doc["dialect"] = to_string(prog.dialect);
        doc["predicate_map"] = prog.predicate_map;
        doc["program"] = prog.text;
        out << doc.dump(2) << "\n";
        return 0;
    }
    out << prog.text;
    return 0;
}

oracle::Options oracle_options() {
    oracle::Options opts;
    if (const char* env = std::getenv("WHYDB_ORACLE_GUARD")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end == env || *end != '\0') throw Error(ErrorKind::invalid_option, "WHYDB_ORACLE_GUARD must be an integer");
        opts.guard = std::min<std::size_t>(v, oracle::max_guard);
    }
    return opts;
}

int cmd_oracle_check(const Invocation& inv, const Inputs& in, std::ostream& out) {
    const oracle::Options opts = oracle_options();
    json doc = envelope("oracle-check");
    std::vector<std::string> lines;
    bool agree = true;

    if (in.constraints || in.query) {
        const ConstraintSet cs = repair_constraints(in);
        std::vector<Repair> fast_s, fast_c;
        std::vector<oracle::BruteRepair> brute;
        std::string fast_error, brute_error;
        try {
            fast_s = s_repairs(in.inst, cs);
            fast_c = c_repairs(in.inst, cs);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::irreparable) throw;
            fast_error = to_string(e.kind());
        }
        try {
            brute = oracle::brute_repairs(in.inst, cs, opts);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::irreparable) throw;
            brute_error = to_string(e.kind());
        }
        std::vector<Repair> brute_s, brute_c;
        for (const auto& b : brute) {
            brute_s.push_back(b.repair);
            if (b.is_c_repair) brute_c.push_back(b.repair);
        }
        const bool ok = fast_error == brute_error && fast_s == brute_s && fast_c == brute_c;
        agree = agree && ok;
        doc["repairs"] = {{"agree", ok}, {"s_repairs", fast_s.size()}, {"c_repairs", fast_c.size()}};
        lines.push_back("repairs: " + std::string(ok ? "agree" : "MISMATCH") + " (" + std::to_string(fast_s.size()) +
                        " S-repairs, " + std::to_string(fast_c.size()) + " C-repairs" +
                        (fast_error.empty() ? "" : ", " + fast_error) + ")");
    }

    if (in.query && in.query->is_boolean()) {
        const auto fast = in.hard.empty() ? actual_causes(in.inst, *in.query)
                                          : causes_under_ics(in.inst, *in.query, in.hard);
        const auto brute = in.hard.empty() ? oracle::brute_causes(in.inst, *in.query, opts)
                                           : oracle::brute_causes_filtered(in.inst, *in.query, in.hard, opts);
        const bool ok = fast == brute;
        agree = agree && ok;
        doc["causes"] = {{"agree", ok}, {"count", fast.size()}};
        lines.push_back("causes: " + std::string(ok ? "agree" : "MISMATCH") + " (" + std::to_string(fast.size()) +
                        " causes)");
    }
    if (lines.empty()) throw Error(ErrorKind::invalid_option, "oracle-check needs a query or --constraints");

    doc["agree"] = agree;
    if (inv.format == "json")
        out << doc.dump(2) << "\n";
    else
        for (const auto& l : lines) out << l << "\n";
    return agree ? 0 : 1;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"whydb: actual causes and responsibilities for query answers via database repairs", "whydb"};
    app.require_subcommand(1);
    Invocation inv;

    struct Spec {
        const char* name;
        const char* help;
    };
    const Spec specs[] = {
        {"repairs", "S- or C-repairs wrt. constraints or the negated query"},
        {"causes", "actual causes with responsibilities and contingency sets"},
        {"contingency", "subset-minimal contingency sets of one tuple"},
        {"responsibility", "responsibility of one tuple or of every endogenous tuple"},
        {"counterfactual", "counterfactual causes"},
        {"most-responsible", "most responsible actual causes"},
        {"emit-asp", "emit the repair or causality answer-set program"},
        {"query", "evaluate a query"},
        {"oracle-check", "cross-check repairs and causes against brute force"},
    };
    for (const auto& s : specs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("--db", inv.db_path, "fact file")->required();
        sub->add_option("-q,--query", inv.query_text, "query rules given inline");
        sub->add_option("--query-file", inv.query_path, "file with query rules");
        sub->add_option("--constraints", inv.constraints_path, "denial constraints and FDs");
        sub->add_option("--hard", inv.hard_path, "hard constraints that candidate repairs must satisfy");
        sub->add_option("--format", inv.format, "output format")->check(CLI::IsMember({"text", "json"}));
        sub->final_callback([&inv, sub] { inv.command = sub->get_name(); });
        const std::string name = s.name;
        if (name == "repairs") sub->add_option("--kind", inv.kind, "s or c")->check(CLI::IsMember({"s", "c"}));
        if (name == "contingency" || name == "responsibility") sub->add_option("--tid", inv.tid, "tuple id");
        if (name == "emit-asp") {
            sub->add_option("--dialect", inv.dialect, "core_disjunctive, core_normalized or extended");
            sub->add_flag("--no-cause-rules", inv.no_cause_rules, "omit cause(T,Tp) rules");
            sub->add_flag("--contingency-union", inv.contingency_union, "set-term contingency rules (extended)");
            sub->add_flag("--responsibility-rules", inv.responsibility_rules, "count-based rules (extended)");
            sub->add_flag("--weak-constraints", inv.weak_constraints, "weak constraints selecting C-repairs");
            sub->add_flag("--legacy-weak", inv.legacy_weak, "DLV [w:l] weak-constraint syntax");
        }
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "whydb: " << e.what() << "\n";
        return 2;
    }

    try {
        const Inputs in = load(inv);
        const std::string& c = inv.command;
        if (c == "query") return cmd_query(inv, in, out);
        if (c == "repairs") return cmd_repairs(inv, in, out);
        if (c == "causes") return cmd_causes(inv, in, out);
        if (c == "contingency") return cmd_contingency(inv, in, out);
        if (c == "responsibility") return cmd_responsibility(inv, in, out);
        if (c == "counterfactual") {
            const auto tids = in.hard.empty() ? counterfactual_causes(in.inst, need_boolean_query(in))
                                              : flagged(causes_for(in), &CauseReport::is_counterfactual);
            print_tid_list(out, in.inst, tids, inv.format == "json", c);
            return 0;
        }
        if (c == "most-responsible") {
            const auto tids = in.hard.empty() ? most_responsible_causes(in.inst, need_boolean_query(in))
                                              : flagged(causes_for(in), &CauseReport::is_most_responsible);
            print_tid_list(out, in.inst, tids, inv.format == "json", c);
            return 0;
        }
        if (c == "emit-asp") return cmd_emit(inv, in, out);
        if (c == "oracle-check") return cmd_oracle_check(inv, in, out);
        err << "whydb: unknown command " << c << "\n";
        return 2;
    } catch (const Error& e) {
        err << "whydb: " << to_string(e.kind()) << ": " << e.what() << "\n";
        return e.is_input_error() ? 2 : 1;
    }
}

} // namespace whydb::cli
