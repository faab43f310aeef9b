#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "whydb/core.hpp"
#include "whydb/query.hpp"

namespace whydb {

/// A consistent sub-instance, stored as the partition of tids it induces.
struct Repair {
    TidSet retained;
    TidSet deleted;

    friend bool operator==(const Repair&, const Repair&) = default;
};

/// Referential constraint `from[from_positions] ⊆ to[to_positions]`.
struct InclusionDependency {
    std::string from;
    std::vector<std::size_t> from_positions;
    std::string to;
    std::vector<std::size_t> to_positions;
};

/// Checked on each candidate repair's retained sub-instance. Candidates that
/// violate one are discarded; they never trigger further deletions.
using HardConstraint = std::variant<DenialConstraint, InclusionDependency>;

/// Statements as in parse_constraints plus `P[i,...] <= Q[j,...].` (`⊆` is
/// accepted for `<=`).
std::vector<HardConstraint> parse_hard_constraints(std::string_view text, const Schema& schema = {});

std::string hard_constraint_text(const HardConstraint& hc);

/// Throws invalid_constraint when a position exceeds the instance arity.
bool satisfies(const Instance& inst, const HardConstraint& hc);
bool satisfies_all(const Instance& inst, const std::vector<HardConstraint>& hard);

/// All inclusion-minimal hitting sets of a hypergraph with nonempty edges,
/// each exactly once, sorted by (size, lexicographic).
std::vector<TidSet> minimal_hitting_sets(const std::vector<TidSet>& edges);

/// S-repairs: complements of the minimal hitting sets of the violation
/// hypergraph projected onto endogenous tids, filtered by `hard`, sorted by
/// (|deleted|, deleted). Throws irreparable when some violation consists of
/// exogenous tuples only.
std::vector<Repair> s_repairs(const Instance& inst, const ConstraintSet& cs,
                              const std::vector<HardConstraint>& hard = {});

/// The S-repairs (after filtering) with the fewest deletions.
std::vector<Repair> c_repairs(const Instance& inst, const ConstraintSet& cs,
                              const std::vector<HardConstraint>& hard = {});

/// Keeps the repairs with minimum |deleted|.
std::vector<Repair> minimum_cardinality(const std::vector<Repair>& repairs);

enum class SubsetClass { inconsistent, consistent_not_maximal, s_repair, c_repair };

const char* to_string(SubsetClass c);

/// Classifies a retained tid set by definition. A consistent subset that
/// drops an exogenous tuple is never a repair.
SubsetClass classify_subset(const Instance& inst, const ConstraintSet& cs, const TidSet& retained);

} // namespace whydb
