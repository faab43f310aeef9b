#pragma once

#include <cstddef>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "whydb/core.hpp"

namespace whydb {

struct Term {
    enum class Kind { variable, constant };

    Kind kind = Kind::variable;
    std::string name; // variable name or constant symbol

    static Term variable(std::string n) { return {Kind::variable, std::move(n)}; }
    static Term constant(std::string v) { return {Kind::constant, std::move(v)}; }

    bool is_variable() const noexcept { return kind == Kind::variable; }

    friend bool operator==(const Term&, const Term&) = default;
};

struct Atom {
    std::string predicate;
    std::vector<Term> terms;

    friend bool operator==(const Atom&, const Atom&) = default;
};

struct Inequality {
    Term lhs;
    Term rhs;

    friend bool operator==(const Inequality&, const Inequality&) = default;
};

/// Conjunction of relational atoms and inequalities. Variables not listed in
/// free_vars are existentially quantified; free_vars empty means boolean.
struct ConjunctiveQuery {
    std::vector<Atom> atoms;
    std::vector<Inequality> inequalities;
    std::vector<std::string> free_vars;

    bool is_boolean() const noexcept { return free_vars.empty(); }
    /// Variables in order of first occurrence in the relational atoms.
    std::vector<std::string> variables() const;

    friend bool operator==(const ConjunctiveQuery&, const ConjunctiveQuery&) = default;
};

/// Throws if a variable of an inequality or of free_vars does not occur in
/// a relational atom, or if the query has no relational atom.
void check_safety(const ConjunctiveQuery& cq);

struct UnionQuery {
    std::vector<ConjunctiveQuery> disjuncts;

    bool is_boolean() const noexcept { return disjuncts.empty() || disjuncts.front().is_boolean(); }
    const std::vector<std::string>& free_vars() const { return disjuncts.front().free_vars; }
};

/// Reads `¬∃ body`.
struct DenialConstraint {
    ConjunctiveQuery body;
    std::string label;
};

/// Positions are 1-based.
struct FunctionalDependency {
    std::string predicate;
    std::vector<std::size_t> determinant;
    std::size_t determined = 0;

    /// Throws invalid_constraint if determined is among the determinant
    /// positions, a position is zero, or the determinant is empty.
    static FunctionalDependency make(std::string predicate, std::vector<std::size_t> determinant,
                                     std::size_t determined);
};

struct ConstraintSet {
    std::vector<DenialConstraint> dcs;

    bool empty() const noexcept { return dcs.empty(); }
    std::size_t size() const noexcept { return dcs.size(); }
};

/// Ground witness of a constraint violation: the tids of one homomorphic
/// image of a DC body. Two body atoms landing on the same tuple collapse.
struct ViolationEdge {
    TidSet tids;
    std::size_t constraint_index = 0;

    friend auto operator<=>(const ViolationEdge&, const ViolationEdge&) = default;
};

/// Query rules `q(x,...) :- atom, ..., t1 != t2.`; several rules with the same
/// head form a union. Variables are identifiers starting with a lower-case
/// letter; constants are double-quoted, or start with a digit or an
/// upper-case letter.
UnionQuery parse_query(std::string_view text);

/// Denial constraints `:- atom, ..., t1 != t2.` and functional dependencies
/// `fd Pred: i,j -> k.` (or `fd Pred/arity: ...`). FD arities come from the
/// explicit `/arity`, else from `schema`, else the largest position named.
ConstraintSet parse_constraints(std::string_view text, const Schema& schema = {});

DenialConstraint fd_to_dc(const FunctionalDependency& fd, std::size_t arity);

/// One DC per disjunct with the body copied verbatim.
ConstraintSet negate_query(const UnionQuery& q);

/// Called once per homomorphism of a CQ into an instance. `binding` follows
/// `cq.variables()`; `image` holds the matched tid of each atom in order.
/// Return false to stop the enumeration.
using MatchVisitor =
    std::function<bool(const std::vector<const std::string*>& binding, const std::vector<Tid>& image)>;

/// Backtracking join over the atoms in query order. Throws arity_clash when
/// an atom disagrees with the arity the instance uses for its predicate.
void for_each_match(const Instance& inst, const ConjunctiveQuery& cq, const MatchVisitor& visit);

bool eval_bcq(const Instance& inst, const UnionQuery& q);
bool eval_cq(const Instance& inst, const ConjunctiveQuery& cq);

/// Distinct bindings of the free variables; `{()}` or `{}` for boolean queries.
std::set<std::vector<std::string>> answers(const Instance& inst, const UnionQuery& q);

/// Deduplicated and ordered by (sorted tids, constraint index).
std::vector<ViolationEdge> violations(const Instance& inst, const ConstraintSet& cs);

bool satisfies(const Instance& inst, const ConstraintSet& cs);

std::string term_text(const Term& t);
std::string atom_text(const Atom& a);
/// `atom, ..., x != y`
std::string body_text(const ConjunctiveQuery& cq);
/// `:- body.`
std::string dc_text(const DenialConstraint& dc);
/// One `q(...) :- body.` rule per disjunct.
std::string query_text(const UnionQuery& q);

} // namespace whydb
