#include "whydb/asp.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "whydb/error.hpp"

namespace whydb {

const char* to_string(AspDialect d) {
    switch (d) {
    case AspDialect::core_disjunctive: return "core_disjunctive";
    case AspDialect::core_normalized: return "core_normalized";
    case AspDialect::extended: return "extended";
    }
    return "?";
}

std::optional<AspDialect> parse_dialect(std::string_view name) {
    if (name == "core_disjunctive" || name == "core-disjunctive") return AspDialect::core_disjunctive;
    if (name == "core_normalized" || name == "core-normalized") return AspDialect::core_normalized;
    if (name == "extended") return AspDialect::extended;
    return std::nullopt;
}

std::string asp_constant(const std::string& c) {
    auto all = [&](auto pred) { return std::all_of(c.begin(), c.end(), pred); };
    const bool identifier = !c.empty() && std::islower(static_cast<unsigned char>(c.front())) &&
                            all([](char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; });
    const bool integer = !c.empty() && all([](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }) &&
                         (c.size() == 1 || c.front() != '0');
    if (identifier || integer) return c;
    std::string out = "\"";
    for (char ch : c) {
        if (ch == '"' || ch == '\\') out += '\\';
        out += ch;
    }
    return out + "\"";
}

namespace {

const std::set<std::string> reserved_names = {"cause", "ans", "con", "pre_rho", "rho", "exo"};

bool is_aux_name(const std::string& s) {
    return s.rfind("aux", 0) == 0 &&
           std::all_of(s.begin() + 3, s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

std::string lower(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Generic argument variables: X,Y,Z / U,V,W up to arity three, else X1.. / U1..
std::vector<std::string> generic_vars(std::size_t arity, bool second) {
    static const char* first_names[] = {"X", "Y", "Z"};
    static const char* second_names[] = {"U", "V", "W"};
    std::vector<std::string> out;
    for (std::size_t i = 0; i < arity; ++i) {
        if (arity <= 3)
            out.emplace_back(second ? second_names[i] : first_names[i]);
        else
            out.push_back((second ? "U" : "X") + std::to_string(i + 1));
    }
    return out;
}

std::string join(const std::vector<std::string>& parts, const char* sep = ",") {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
    return out;
}

class Emitter {
public:
    Emitter(const Instance& inst, const ConstraintSet& cs, AspDialect dialect,
            const std::vector<HardConstraint>& hard)
        : inst_(inst), cs_(cs), dialect_(dialect), hard_(hard) {
        for (const auto& dc : cs_.dcs)
            for (const auto& a : dc.body.atoms) note_predicate(a.predicate, a.terms.size(), true);
        for (const auto& hc : hard_) {
            if (const auto* dc = std::get_if<DenialConstraint>(&hc)) {
                for (const auto& a : dc->body.atoms) note_predicate(a.predicate, a.terms.size(), false);
            } else {
                const auto& ind = std::get<InclusionDependency>(hc);
                for (const auto* p : {&ind.from, &ind.to}) {
                    auto arity = arity_of(*p);
                    if (!arity)
                        throw Error(ErrorKind::invalid_constraint, "unknown arity for predicate " + *p +
                                                                       " in " + hard_constraint_text(hc));
                    note_predicate(*p, *arity, false);
                }
                for (std::size_t k = 0; k < ind.from_positions.size(); ++k)
                    if (ind.from_positions[k] > *arity_of(ind.from) || ind.to_positions[k] > *arity_of(ind.to))
                        throw Error(ErrorKind::invalid_constraint,
                                    "position out of range in " + hard_constraint_text(hc));
            }
        }
        check_names();
    }

    AspProgram repair_program(const std::string& title) {
        out_ << "% whydb " << version << " " << title << "\n";
        out_ << "% dialect: " << to_string(dialect_) << "\n";

        if (!inst_.empty()) {
            out_ << "\n% facts\n";
            for (const auto& t : inst_.tuples()) {
                std::vector<std::string> args{std::to_string(t.tid.value)};
                for (const auto& a : t.args) args.push_back(asp_constant(a));
                out_ << base(t.predicate) << "(" << join(args) << ").\n";
            }
            for (Tid t : inst_.exogenous_tids()) out_ << "exo(" << t.value << ").\n";
        }

        out_ << "\n% repair rules\n";
        for (const auto& dc : cs_.dcs) {
            const std::string shown = dc_text(dc);
            out_ << "% " << (dc.label.empty() || dc.label == shown ? shown : dc.label + ": " + shown) << "\n";
            emit_repair_rules(dc.body);
        }

        out_ << "\n% stays rules\n";
        for (const auto& p : stays_predicates_) {
            const auto vars = generic_vars(arity_.at(p), false);
            const std::string args = "T," + join(vars);
            out_ << nick(p) << "(" << args << ",s) :- " << base(p) << "(" << args << "), not " << nick(p) << "("
                 << args << ",d).\n";
        }

        if (!inst_.exogenous_tids().empty()) {
            out_ << "\n% exogenous tuples are never deleted\n";
            for (const auto& p : constraint_predicates_)
                out_ << ":- " << nick(p) << "(T," << join(generic_vars(arity_.at(p), false)) << ",d), exo(T).\n";
        }

        AspProgram prog;
        prog.dialect = dialect_;
        for (const auto& [original, name] : base_names_) prog.predicate_map[original] = name + "_x";
        return prog;
    }

    void cause_rules() {
        out_ << "\n% causes: cause(T,Tp) when Tp is deleted together with T\n";
        for (const auto& p : constraint_predicates_) {
            for (const auto& p2 : constraint_predicates_) {
                out_ << "cause(T,Tp) :- " << nick(p) << "(T," << join(generic_vars(arity_.at(p), false)) << ",d), "
                     << nick(p2) << "(Tp," << join(generic_vars(arity_.at(p2), true)) << ",d)"
                     << (p == p2 ? ", T != Tp" : "") << ".\n";
            }
        }
    }

    void answer_rules() {
        out_ << "\n% brave query: ans(T) holds in some model iff T is an actual cause\n";
        for (const auto& p : constraint_predicates_)
            out_ << "ans(T) :- " << nick(p) << "(T," << join(generic_vars(arity_.at(p), false)) << ",d).\n";
    }

    void contingency_union_rules() {
        out_ << "\n% contingency sets (set terms)\n";
        out_ << "con(T,{Tp}) :- cause(T,Tp).\n";
        out_ << "con(T,#union(C1,C2)) :- con(T,C1), con(T,C2), #member(M,C1), not #member(M,C2).\n";
    }

    void responsibility_rules() {
        out_ << "\n% responsibility within a model: rho(T,M) reads M = 1/(N+1).\n";
        out_ << "% Integer-only solvers cannot represent 1/k; whydb computes responsibilities natively.\n";
        out_ << "pre_rho(T,N) :- ans(T), #count{Tp : cause(T,Tp)} = N.\n";
        out_ << "rho(T,M) :- pre_rho(T,N), M * (N + 1) = 1.\n";
    }

    void weak_constraints(bool legacy) {
        out_ << "\n% C-repairs: minimize the number of deleted tuples\n";
        for (const auto& p : constraint_predicates_) {
            const std::string args = "T," + join(generic_vars(arity_.at(p), false));
            const std::string body = base(p) + "(" + args + "), " + nick(p) + "(" + args + ",d)";
            if (legacy)
                out_ << "% <= " << body << ".\n:~ " << body << ". [1:1]\n";
            else
                out_ << ":~ " << body << ". [1@1,T]\n";
        }
    }

    void hard_constraint_rules() {
        if (hard_.empty()) return;
        out_ << "\n% hard constraints on the retained tuples\n";
        std::size_t aux_count = 0;
        for (const auto& hc : hard_) {
            out_ << "% " << hard_constraint_text(hc) << "\n";
            if (const auto* dc = std::get_if<DenialConstraint>(&hc)) {
                const auto names = variable_names(dc->body);
                std::vector<std::string> body;
                for (std::size_t i = 0; i < dc->body.atoms.size(); ++i)
                    body.push_back(nick_atom(dc->body.atoms[i], "T" + std::to_string(i + 1), names, "s"));
                for (const auto& ineq : dc->body.inequalities)
                    body.push_back(term(ineq.lhs, names) + " != " + term(ineq.rhs, names));
                out_ << ":- " << join(body, ", ") << ".\n";
                continue;
            }
            const auto& ind = std::get<InclusionDependency>(hc);
            const std::string aux = ++aux_count == 1 ? "aux" : "aux" + std::to_string(aux_count);
            const auto from_vars = generic_vars(*arity_of(ind.from), false);
            auto to_vars = generic_vars(*arity_of(ind.to), true);
            std::vector<std::string> keys;
            for (std::size_t k = 0; k < ind.from_positions.size(); ++k) {
                keys.push_back(from_vars[ind.from_positions[k] - 1]);
                to_vars[ind.to_positions[k] - 1] = keys.back();
            }
            out_ << aux << "(" << join(keys) << ") :- " << nick(ind.to) << "(Tp," << join(to_vars) << ",s).\n";
            out_ << ":- " << nick(ind.from) << "(T," << join(from_vars) << ",s), not " << aux << "(" << join(keys)
                 << ").\n";
        }
    }

    std::string text() const { return out_.str(); }

private:
    std::optional<std::size_t> arity_of(const std::string& p) const {
        if (auto a = inst_.arity(p)) return a;
        if (auto it = arity_.find(p); it != arity_.end()) return it->second;
        return std::nullopt;
    }

    void note_predicate(const std::string& p, std::size_t arity, bool in_constraints) {
        if (auto a = arity_of(p); a && *a != arity)
            throw Error(ErrorKind::arity_clash, "predicate " + p + " used with arity " + std::to_string(*a) +
                                                    " and " + std::to_string(arity));
        arity_[p] = arity;
        if (in_constraints && std::find(constraint_predicates_.begin(), constraint_predicates_.end(), p) ==
                                  constraint_predicates_.end())
            constraint_predicates_.push_back(p);
        if (std::find(stays_predicates_.begin(), stays_predicates_.end(), p) == stays_predicates_.end())
            stays_predicates_.push_back(p);
    }

    void check_names() {
        std::set<std::string> all;
        for (const auto& t : inst_.tuples()) all.insert(t.predicate);
        for (const auto& [p, a] : arity_) all.insert(p);

        std::map<std::string, std::string> owner; // emitted name -> original predicate
        for (const auto& p : all) {
            const std::string b = lower(p);
            base_names_[p] = b;
            for (const std::string& name : {b, b + "_x"}) {
                if (reserved_names.count(name) || is_aux_name(name))
                    throw Error(ErrorKind::name_collision,
                                "predicate " + p + " collides with the auxiliary predicate " + name);
                auto [it, fresh] = owner.emplace(name, p);
                if (!fresh && it->second != p)
                    throw Error(ErrorKind::name_collision,
                                "predicates " + it->second + " and " + p + " both map to " + name);
            }
        }
    }

    std::string base(const std::string& p) const { return base_names_.at(p); }
    std::string nick(const std::string& p) const { return base_names_.at(p) + "_x"; }

    // Query variable names as ASP variables: upper-case first letter, with a
    // V_ prefix when that would clash with the tid variables.
    std::map<std::string, std::string> variable_names(const ConjunctiveQuery& cq) const {
        std::map<std::string, std::string> names;
        for (const auto& v : cq.variables()) {
            std::string n = v;
            n.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(n.front())));
            const bool tid_like = n == "T" || n == "Tp" ||
                                  (n.size() > 1 && n.front() == 'T' &&
                                   std::all_of(n.begin() + 1, n.end(),
                                               [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }));
            names[v] = tid_like ? "V_" + v : n;
        }
        return names;
    }

    static std::string term(const Term& t, const std::map<std::string, std::string>& names) {
        return t.is_variable() ? names.at(t.name) : asp_constant(t.name);
    }

    std::string args(const Atom& a, const std::string& tid, const std::map<std::string, std::string>& names) const {
        std::vector<std::string> parts{tid};
        for (const auto& t : a.terms) parts.push_back(term(t, names));
        return join(parts);
    }

    std::string nick_atom(const Atom& a, const std::string& tid, const std::map<std::string, std::string>& names,
                          const char* annotation) const {
        return nick(a.predicate) + "(" + args(a, tid, names) + "," + annotation + ")";
    }

    void emit_repair_rules(const ConjunctiveQuery& body) {
        const auto names = variable_names(body);
        std::vector<std::string> heads, positive;
        for (std::size_t i = 0; i < body.atoms.size(); ++i) {
            const std::string tid = "T" + std::to_string(i + 1);
            heads.push_back(nick_atom(body.atoms[i], tid, names, "d"));
            positive.push_back(base(body.atoms[i].predicate) + "(" + args(body.atoms[i], tid, names) + ")");
        }
        for (const auto& ineq : body.inequalities)
            positive.push_back(term(ineq.lhs, names) + " != " + term(ineq.rhs, names));

        if (dialect_ != AspDialect::core_normalized) {
            out_ << join(heads, " | ") << " :- " << join(positive, ", ") << ".\n";
            return;
        }
        // Shifting. An atom over the same predicate may ground to the very
        // tuple of atom i, so each such `not` is paired with a variant that
        // requires the two tids to be equal instead.
        for (std::size_t i = 0; i < heads.size(); ++i) {
            std::vector<std::size_t> same;
            for (std::size_t j = 0; j < heads.size(); ++j)
                if (j != i && body.atoms[j].predicate == body.atoms[i].predicate) same.push_back(j);
            for (std::size_t mask = 0; mask < (std::size_t{1} << same.size()); ++mask) {
                std::vector<std::string> parts = positive;
                for (std::size_t j = 0; j < heads.size(); ++j) {
                    if (j == i) continue;
                    const auto k = std::find(same.begin(), same.end(), j) - same.begin();
                    if (k < static_cast<std::ptrdiff_t>(same.size()) && (mask >> k & 1u))
                        parts.push_back("T" + std::to_string(i + 1) + " = T" + std::to_string(j + 1));
                    else
                        parts.push_back("not " + heads[j]);
                }
                out_ << heads[i] << " :- " << join(parts, ", ") << ".\n";
            }
        }
    }

    const Instance& inst_;
    const ConstraintSet& cs_;
    AspDialect dialect_;
    const std::vector<HardConstraint>& hard_;
    std::map<std::string, std::size_t> arity_;
    std::vector<std::string> constraint_predicates_;
    std::vector<std::string> stays_predicates_;
    std::map<std::string, std::string> base_names_;
    std::ostringstream out_;
};

} // namespace

AspProgram emit_repair_program(const Instance& inst, const ConstraintSet& cs, AspDialect dialect) {
    const std::vector<HardConstraint> none;
    Emitter e(inst, cs, dialect, none);
    AspProgram prog = e.repair_program("repair program");
    prog.text = e.text();
    return prog;
}

AspProgram emit_causality_program(const Instance& inst, const UnionQuery& q, AspDialect dialect,
                                  const CausalityProgramOptions& opts) {
    if ((opts.contingency_union || opts.responsibility_rules) && dialect != AspDialect::extended)
        throw Error(ErrorKind::invalid_option, "contingency-union and responsibility rules need the extended dialect");
    const ConstraintSet kappa = negate_query(q);
    Emitter e(inst, kappa, dialect, opts.hard_constraints);
    AspProgram prog = e.repair_program("causality program");
    if (opts.cause_rules) e.cause_rules();
    e.answer_rules();
    if (opts.contingency_union) e.contingency_union_rules();
    if (opts.responsibility_rules) e.responsibility_rules();
    if (opts.weak_constraints) e.weak_constraints(opts.legacy_weak_syntax);
    e.hard_constraint_rules();
    prog.text = e.text();
    return prog;
}

} // namespace whydb
