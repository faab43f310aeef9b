#include "whydb/query.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "syntax.hpp"
#include "whydb/error.hpp"

namespace whydb {

std::vector<std::string> ConjunctiveQuery::variables() const {
    std::vector<std::string> out;
    for (const auto& a : atoms)
        for (const auto& t : a.terms)
            if (t.is_variable() && std::find(out.begin(), out.end(), t.name) == out.end()) out.push_back(t.name);
    return out;
}

void check_safety(const ConjunctiveQuery& cq) {
    if (cq.atoms.empty()) throw Error(ErrorKind::unsafe_variable, "query body needs a relational atom");
    const auto vars = cq.variables();
    auto bound = [&](const std::string& v) { return std::find(vars.begin(), vars.end(), v) != vars.end(); };
    for (const auto& ineq : cq.inequalities)
        for (const Term* t : {&ineq.lhs, &ineq.rhs})
            if (t->is_variable() && !bound(t->name))
                throw Error(ErrorKind::unsafe_variable, "variable " + t->name + " occurs only in an inequality");
    for (std::size_t i = 0; i < cq.free_vars.size(); ++i) {
        if (!bound(cq.free_vars[i]))
            throw Error(ErrorKind::unsafe_variable, "head variable " + cq.free_vars[i] + " not in body");
        for (std::size_t j = 0; j < i; ++j)
            if (cq.free_vars[j] == cq.free_vars[i])
                throw Error(ErrorKind::unsafe_variable, "head variable " + cq.free_vars[i] + " repeated");
    }
}

FunctionalDependency FunctionalDependency::make(std::string predicate, std::vector<std::size_t> determinant,
                                                std::size_t determined) {
    if (determinant.empty()) throw Error(ErrorKind::invalid_constraint, "fd needs a determinant position");
    std::sort(determinant.begin(), determinant.end());
    determinant.erase(std::unique(determinant.begin(), determinant.end()), determinant.end());
    if (determined == 0 || determinant.front() == 0)
        throw Error(ErrorKind::invalid_constraint, "fd positions are 1-based");
    if (std::binary_search(determinant.begin(), determinant.end(), determined))
        throw Error(ErrorKind::invalid_constraint,
                    "fd on " + predicate + ": position " + std::to_string(determined) + " determines itself");
    return {std::move(predicate), std::move(determinant), determined};
}

DenialConstraint fd_to_dc(const FunctionalDependency& fd, std::size_t arity) {
    const std::size_t top = std::max(fd.determined, fd.determinant.back());
    if (top > arity)
        throw Error(ErrorKind::invalid_constraint, "fd position " + std::to_string(top) + " out of range for " +
                                                       fd.predicate + "/" + std::to_string(arity));

    // Shared determinant positions get x, y (x1.. beyond two); the determined
    // position z1/z2; remaining positions v.. in the first atom, w.. in the second.
    const std::size_t shared = fd.determinant.size();
    const std::size_t rest = arity - shared - 1;
    auto name = [](const char* base, std::size_t i, std::size_t n) {
        return n == 1 ? std::string(base) : std::string(base) + std::to_string(i + 1);
    };

    Atom first{fd.predicate, {}}, second{fd.predicate, {}};
    std::size_t next_shared = 0, next_rest = 0;
    for (std::size_t pos = 1; pos <= arity; ++pos) {
        if (pos == fd.determined) {
            first.terms.push_back(Term::variable("z1"));
            second.terms.push_back(Term::variable("z2"));
        } else if (std::binary_search(fd.determinant.begin(), fd.determinant.end(), pos)) {
            std::string v = shared <= 2 ? std::string(next_shared == 0 ? "x" : "y")
                                        : "x" + std::to_string(next_shared + 1);
            ++next_shared;
            first.terms.push_back(Term::variable(v));
            second.terms.push_back(Term::variable(v));
        } else {
            first.terms.push_back(Term::variable(name("v", next_rest, rest)));
            second.terms.push_back(Term::variable(name("w", next_rest, rest)));
            ++next_rest;
        }
    }

    DenialConstraint dc;
    dc.body.atoms = {std::move(first), std::move(second)};
    dc.body.inequalities.push_back({Term::variable("z1"), Term::variable("z2")});
    std::string label = "fd " + fd.predicate + ": ";
    for (std::size_t i = 0; i < fd.determinant.size(); ++i)
        label += (i ? "," : "") + std::to_string(fd.determinant[i]);
    dc.label = label + " -> " + std::to_string(fd.determined);
    return dc;
}

ConstraintSet negate_query(const UnionQuery& q) {
    if (!q.is_boolean()) throw Error(ErrorKind::open_query, "query has free variables; a boolean query is required");
    ConstraintSet cs;
    for (std::size_t i = 0; i < q.disjuncts.size(); ++i)
        cs.dcs.push_back({q.disjuncts[i], "not q#" + std::to_string(i + 1)});
    return cs;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {
namespace {

bool term_char(char c) { return TextCursor::ident_char(c) || c == '-'; }

bool is_variable_name(const std::string& s) {
    return !s.empty() && s.front() >= 'a' && s.front() <= 'z' &&
           std::all_of(s.begin(), s.end(), [](char c) { return TextCursor::ident_char(c); });
}

bool is_predicate_name(const std::string& s) {
    return !s.empty() && TextCursor::ident_start(s.front()) &&
           std::all_of(s.begin(), s.end(), [](char c) { return TextCursor::ident_char(c); });
}

std::string read_word(TextCursor& in) {
    std::string out;
    while (!in.at_end() && term_char(in.peek())) out += in.get();
    return out;
}

Term word_to_term(TextCursor& in, const std::string& word) {
    if (word.empty()) in.fail("expected a term" + in.found());
    if (is_variable_name(word)) return Term::variable(word);
    if (word.front() >= 'a' && word.front() <= 'z') in.fail("invalid variable name '" + word + "'");
    return Term::constant(word);
}

Term read_quoted(TextCursor& in) {
    in.get();
    std::string value;
    while (!in.at_end() && in.peek() != '"') {
        char c = in.get();
        if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == '(' || c == ')')
            in.fail("constants may not contain whitespace, commas or parentheses");
        value += c;
    }
    if (in.at_end()) in.fail("unterminated quoted constant");
    in.get();
    if (value.empty()) in.fail("empty constant");
    return Term::constant(value);
}

Atom read_atom_args(TextCursor& in, std::string predicate) {
    Atom atom{std::move(predicate), {}};
    in.expect("(");
    do {
        atom.terms.push_back(read_term(in));
    } while (in.accept(","));
    in.expect(")");
    return atom;
}

} // namespace

Term read_term(TextCursor& in) {
    in.skip_space();
    if (in.peek() == '"') return read_quoted(in);
    return word_to_term(in, read_word(in));
}

ConjunctiveQuery read_body(TextCursor& in) {
    ConjunctiveQuery cq;
    do {
        in.skip_space();
        Term lhs;
        if (in.peek() == '"') {
            lhs = read_quoted(in);
        } else {
            const std::size_t line = in.line(), col = in.column();
            std::string word = read_word(in);
            in.skip_space();
            if (in.peek() == '(') {
                if (!is_predicate_name(word)) throw ParseError(line, col, "invalid predicate name '" + word + "'");
                cq.atoms.push_back(read_atom_args(in, std::move(word)));
                continue;
            }
            lhs = word_to_term(in, word);
        }
        in.expect("!=");
        cq.inequalities.push_back({std::move(lhs), read_term(in)});
    } while (in.accept(","));
    in.expect(".");
    return cq;
}

DenialConstraint read_fd(TextCursor& in, const Schema& schema) {
    const std::size_t line = in.line(), col = in.column();
    std::string predicate = in.identifier("predicate name");
    std::optional<std::size_t> arity;
    if (in.accept("/")) arity = in.positive_integer("arity");
    in.expect(":");
    std::vector<std::size_t> determinant;
    do {
        determinant.push_back(in.positive_integer("position"));
    } while (in.accept(","));
    in.expect("->");
    std::size_t determined = in.positive_integer("position");
    in.expect(".");

    auto fd = FunctionalDependency::make(predicate, determinant, determined);
    if (auto it = schema.find(predicate); it != schema.end()) {
        if (arity && *arity != it->second)
            throw ParseError(line, col, "fd arity " + std::to_string(*arity) + " disagrees with instance arity " +
                                            std::to_string(it->second) + " of " + predicate);
        arity = it->second;
    }
    if (!arity) arity = std::max(fd.determined, fd.determinant.back());
    return fd_to_dc(fd, *arity);
}

} // namespace detail

namespace {

// Records the arity of every atom's predicate, throwing on disagreement.
void note_arities(const ConjunctiveQuery& cq, Schema& seen) {
    for (const auto& a : cq.atoms) {
        auto [it, fresh] = seen.emplace(a.predicate, a.terms.size());
        if (!fresh && it->second != a.terms.size())
            throw Error(ErrorKind::arity_clash, "predicate " + a.predicate + " used with arity " +
                                                    std::to_string(it->second) + " and " +
                                                    std::to_string(a.terms.size()));
    }
}

} // namespace

UnionQuery parse_query(std::string_view text) {
    detail::TextCursor in(text);
    UnionQuery q;
    std::string head;
    Schema arities;
    for (;;) {
        in.skip_space();
        if (in.at_end()) break;
        const std::size_t line = in.line(), col = in.column();
        std::string name = in.identifier("query head");
        std::vector<std::string> free_vars;
        if (in.accept("(") && !in.accept(")")) {
            do {
                Term t = detail::read_term(in);
                if (!t.is_variable()) in.fail("query head arguments must be variables");
                free_vars.push_back(t.name);
            } while (in.accept(","));
            in.expect(")");
        }
        in.expect(":-");
        ConjunctiveQuery cq = detail::read_body(in);
        cq.free_vars = std::move(free_vars);
        if (cq.atoms.empty()) throw ParseError(line, col, "query body needs a relational atom");
        check_safety(cq);
        note_arities(cq, arities);

        if (q.disjuncts.empty()) {
            head = name;
        } else {
            if (name != head) throw ParseError(line, col, "all rules must share the head " + head);
            if (cq.free_vars != q.disjuncts.front().free_vars)
                throw ParseError(line, col, "all rules must share the same head variables");
        }
        q.disjuncts.push_back(std::move(cq));
    }
    if (q.disjuncts.empty()) throw ParseError(in.line(), in.column(), "expected at least one query rule");
    return q;
}

ConstraintSet parse_constraints(std::string_view text, const Schema& schema) {
    detail::TextCursor in(text);
    ConstraintSet cs;
    Schema arities = schema;
    for (;;) {
        in.skip_space();
        if (in.at_end()) break;
        const std::size_t line = in.line(), col = in.column();
        if (in.accept(":-")) {
            DenialConstraint dc;
            dc.body = detail::read_body(in);
            if (dc.body.atoms.empty()) throw ParseError(line, col, "denial constraint needs a relational atom");
            check_safety(dc.body);
            dc.label = dc_text(dc);
            cs.dcs.push_back(std::move(dc));
        } else if (in.identifier("':-' or 'fd'") == "fd") {
            cs.dcs.push_back(detail::read_fd(in, arities));
        } else {
            throw ParseError(line, col, "expected ':-' or 'fd'");
        }
    }
    for (const auto& dc : cs.dcs) note_arities(dc.body, arities);
    return cs;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

struct Slot {
    bool is_var = false;
    std::size_t var = 0;
    const std::string* constant = nullptr;
};

struct CompiledQuery {
    std::vector<std::string> vars;
    std::vector<const std::string*> predicates;
    std::vector<std::vector<Slot>> atoms;
    // Inequalities whose last variable becomes bound at atom d.
    std::vector<std::vector<std::pair<Slot, Slot>>> checks;
    bool trivially_false = false;
};

CompiledQuery compile(const Instance& inst, const ConjunctiveQuery& cq) {
    CompiledQuery c;
    c.vars = cq.variables();
    auto index_of = [&](const std::string& v) {
        return static_cast<std::size_t>(std::find(c.vars.begin(), c.vars.end(), v) - c.vars.begin());
    };
    std::vector<std::size_t> bound_at(c.vars.size(), cq.atoms.size());
    for (std::size_t d = 0; d < cq.atoms.size(); ++d) {
        const Atom& a = cq.atoms[d];
        if (auto arity = inst.arity(a.predicate); arity && *arity != a.terms.size())
            throw Error(ErrorKind::arity_clash, "atom " + atom_text(a) + " has arity " +
                                                    std::to_string(a.terms.size()) + " but the instance uses " +
                                                    std::to_string(*arity) + " for " + a.predicate);
        std::vector<Slot> slots;
        for (const auto& t : a.terms) {
            if (t.is_variable()) {
                std::size_t v = index_of(t.name);
                bound_at[v] = std::min(bound_at[v], d);
                slots.push_back({true, v, nullptr});
            } else {
                slots.push_back({false, 0, &t.name});
            }
        }
        c.predicates.push_back(&a.predicate);
        c.atoms.push_back(std::move(slots));
    }
    c.checks.resize(cq.atoms.size());
    for (const auto& ineq : cq.inequalities) {
        auto slot = [&](const Term& t) {
            return t.is_variable() ? Slot{true, index_of(t.name), nullptr} : Slot{false, 0, &t.name};
        };
        Slot l = slot(ineq.lhs), r = slot(ineq.rhs);
        if (!l.is_var && !r.is_var) {
            if (*l.constant == *r.constant) c.trivially_false = true;
            continue;
        }
        std::size_t depth = 0;
        for (const Slot& s : {l, r})
            if (s.is_var) depth = std::max(depth, bound_at[s.var]);
        c.checks[depth].emplace_back(l, r);
    }
    return c;
}

class Matcher {
public:
    Matcher(const Instance& inst, const CompiledQuery& q, const MatchVisitor& visit)
        : inst_(inst), q_(q), visit_(visit), binding_(q.vars.size(), nullptr), image_(q.atoms.size()) {}

    void run() {
        if (!q_.trivially_false) step(0);
    }

private:
    const std::string& value(const Slot& s) const { return s.is_var ? *binding_[s.var] : *s.constant; }

    bool step(std::size_t depth) {
        if (depth == q_.atoms.size()) return visit_(binding_, image_);
        const auto& slots = q_.atoms[depth];
        for (std::size_t idx : inst_.of_predicate(*q_.predicates[depth])) {
            const Tuple& t = inst_.tuples()[idx];
            std::vector<std::size_t> newly;
            bool ok = true;
            for (std::size_t i = 0; i < slots.size() && ok; ++i) {
                const Slot& s = slots[i];
                if (!s.is_var) {
                    ok = *s.constant == t.args[i];
                } else if (binding_[s.var] == nullptr) {
                    binding_[s.var] = &t.args[i];
                    newly.push_back(s.var);
                } else {
                    ok = *binding_[s.var] == t.args[i];
                }
            }
            for (std::size_t k = 0; ok && k < q_.checks[depth].size(); ++k) {
                const auto& [l, r] = q_.checks[depth][k];
                ok = value(l) != value(r);
            }
            bool keep_going = true;
            if (ok) {
                image_[depth] = t.tid;
                keep_going = step(depth + 1);
            }
            for (std::size_t v : newly) binding_[v] = nullptr;
            if (!keep_going) return false;
        }
        return true;
    }

    const Instance& inst_;
    const CompiledQuery& q_;
    const MatchVisitor& visit_;
    std::vector<const std::string*> binding_;
    std::vector<Tid> image_;
};

} // namespace

void for_each_match(const Instance& inst, const ConjunctiveQuery& cq, const MatchVisitor& visit) {
    CompiledQuery compiled = compile(inst, cq);
    Matcher(inst, compiled, visit).run();
}

bool eval_cq(const Instance& inst, const ConjunctiveQuery& cq) {
    bool found = false;
    for_each_match(inst, cq, [&](const auto&, const auto&) {
        found = true;
        return false;
    });
    return found;
}

bool eval_bcq(const Instance& inst, const UnionQuery& q) {
    if (!q.is_boolean()) throw Error(ErrorKind::open_query, "query has free variables; a boolean query is required");
    bool result = false;
    // Evaluate every disjunct so arity errors surface regardless of order.
    for (const auto& cq : q.disjuncts) result = eval_cq(inst, cq) || result;
    return result;
}

std::set<std::vector<std::string>> answers(const Instance& inst, const UnionQuery& q) {
    std::set<std::vector<std::string>> out;
    for (const auto& cq : q.disjuncts) {
        const auto vars = cq.variables();
        std::vector<std::size_t> positions;
        for (const auto& fv : cq.free_vars)
            positions.push_back(static_cast<std::size_t>(std::find(vars.begin(), vars.end(), fv) - vars.begin()));
        for_each_match(inst, cq, [&](const std::vector<const std::string*>& binding, const auto&) {
            std::vector<std::string> row;
            for (std::size_t p : positions) row.push_back(*binding[p]);
            out.insert(std::move(row));
            return true;
        });
    }
    return out;
}

std::vector<ViolationEdge> violations(const Instance& inst, const ConstraintSet& cs) {
    std::set<ViolationEdge> edges;
    for (std::size_t i = 0; i < cs.dcs.size(); ++i) {
        for_each_match(inst, cs.dcs[i].body, [&](const auto&, const std::vector<Tid>& image) {
            edges.insert({TidSet(image.begin(), image.end()), i});
            return true;
        });
    }
    return {edges.begin(), edges.end()};
}

bool satisfies(const Instance& inst, const ConstraintSet& cs) {
    for (const auto& dc : cs.dcs)
        if (eval_cq(inst, dc.body)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Printing

std::string term_text(const Term& t) {
    if (t.is_variable()) return t.name;
    const bool bare = !t.name.empty() && ((t.name.front() >= 'A' && t.name.front() <= 'Z') ||
                                          (t.name.front() >= '0' && t.name.front() <= '9')) &&
                      std::all_of(t.name.begin(), t.name.end(), [](char c) {
                          return detail::TextCursor::ident_char(c) || c == '-';
                      });
    return bare ? t.name : "\"" + t.name + "\"";
}

std::string atom_text(const Atom& a) {
    std::string out = a.predicate + "(";
    for (std::size_t i = 0; i < a.terms.size(); ++i) out += (i ? "," : "") + term_text(a.terms[i]);
    return out + ")";
}

std::string body_text(const ConjunctiveQuery& cq) {
    std::string out;
    for (const auto& a : cq.atoms) out += (out.empty() ? "" : ", ") + atom_text(a);
    for (const auto& i : cq.inequalities) out += ", " + term_text(i.lhs) + " != " + term_text(i.rhs);
    return out;
}

std::string dc_text(const DenialConstraint& dc) { return ":- " + body_text(dc.body) + "."; }

std::string query_text(const UnionQuery& q) {
    std::string out;
    for (const auto& cq : q.disjuncts) {
        out += "q";
        if (!cq.free_vars.empty()) {
            out += "(";
            for (std::size_t i = 0; i < cq.free_vars.size(); ++i) out += (i ? "," : "") + cq.free_vars[i];
            out += ")";
        }
        out += " :- " + body_text(cq) + ".\n";
    }
    return out;
}

} // namespace whydb
