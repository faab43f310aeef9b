#pragma once

#include <cstddef>
#include <vector>

#include "whydb/causality.hpp"
#include "whydb/core.hpp"
#include "whydb/query.hpp"
#include "whydb/repair.hpp"

// Exhaustive reference implementations of the repair and cause definitions.
// Exponential in the number of endogenous tuples; used as ground truth.
// Nothing here calls into the query evaluator, the hitting-set search or the
// causality module.
namespace whydb::oracle {

inline constexpr std::size_t max_guard = 18;

struct Options {
    /// Largest number of endogenous tuples accepted; clamped to max_guard.
    std::size_t guard = max_guard;
};

struct BruteRepair {
    Repair repair;
    bool is_c_repair = false;

    friend bool operator==(const BruteRepair&, const BruteRepair&) = default;
};

/// Scans every subset of endogenous tuples (exogenous ones always stay).
/// Sorted by (|deleted|, deleted). Throws irreparable when no such subset is
/// consistent and size_guard beyond the guard.
std::vector<BruteRepair> brute_repairs(const Instance& inst, const ConstraintSet& cs, Options opts = {});

/// Scans every Γ ⊆ D^n \ {t} for each endogenous t.
std::vector<CauseReport> brute_causes(const Instance& inst, const UnionQuery& q, Options opts = {});

Responsibility brute_responsibility(const Instance& inst, const UnionQuery& q, Tid t, Options opts = {});

/// Causes read off the brute-force S-repairs of the negated query after
/// discarding those whose retained part violates a hard constraint.
std::vector<CauseReport> brute_causes_filtered(const Instance& inst, const UnionQuery& q,
                                               const std::vector<HardConstraint>& hard, Options opts = {});

/// Naive evaluation: tries every combination of same-predicate tuples per
/// atom against the tuples flagged in `present`.
bool naive_holds(const Instance& inst, const std::vector<char>& present, const ConjunctiveQuery& cq);

} // namespace whydb::oracle
