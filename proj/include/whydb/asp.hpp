#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "whydb/core.hpp"
#include "whydb/query.hpp"
#include "whydb/repair.hpp"

namespace whydb {

inline constexpr const char* version = "0.1.0";

/// core_disjunctive: disjunctive repair rules.
/// core_normalized: each disjunction split into rules with the other
///   disjuncts negated in the body.
/// extended: core_disjunctive plus set-term and aggregate rules in the
///   DLV-Complex style.
enum class AspDialect { core_disjunctive, core_normalized, extended };

const char* to_string(AspDialect d);
std::optional<AspDialect> parse_dialect(std::string_view name);

/// Emitted program text. Every database predicate P is written in lower case
/// (`p`) with the tid as first argument; its nickname `p_x` carries one more
/// trailing argument, `d` (deleted) or `s` (stays).
struct AspProgram {
    std::string text;
    AspDialect dialect = AspDialect::core_disjunctive;
    /// Database predicate to its nickname.
    std::map<std::string, std::string> predicate_map;
};

struct CausalityProgramOptions {
    bool cause_rules = true;
    bool contingency_union = false;    // extended only
    bool responsibility_rules = false; // extended only
    bool weak_constraints = false;
    /// `[1:1]` weights preceded by a `<=` comment instead of `[1@1,T]`.
    bool legacy_weak_syntax = false;
    std::vector<HardConstraint> hard_constraints;
};

/// Throws name_collision when two predicates share a lower-case form or
/// collide with a nickname or an auxiliary predicate.
AspProgram emit_repair_program(const Instance& inst, const ConstraintSet& cs, AspDialect dialect);

/// The repair program of the negated query extended with cause, answer and
/// the optional rules selected in `opts`.
AspProgram emit_causality_program(const Instance& inst, const UnionQuery& q, AspDialect dialect,
                                  const CausalityProgramOptions& opts = {});

/// An ASP constant for a database constant: bare when it is a lower-case
/// identifier or a plain integer, quoted otherwise.
std::string asp_constant(const std::string& c);

} // namespace whydb
