#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "whydb/core.hpp"
#include "whydb/query.hpp"
#include "whydb/repair.hpp"

namespace whydb {

/// Exact responsibility: zero, or 1/k for k >= 1.
class Responsibility {
public:
    constexpr Responsibility() = default;

    static constexpr Responsibility zero() { return {}; }
    /// 1/k; k must be positive.
    static Responsibility inverse_of(std::uint32_t k);

    constexpr bool is_zero() const noexcept { return denominator_ == 0; }
    /// 0 for the zero value.
    constexpr std::uint32_t denominator() const noexcept { return denominator_; }

    /// `0`, `1`, or `1/k`.
    std::string text() const;

    friend constexpr bool operator==(Responsibility, Responsibility) = default;
    friend constexpr std::strong_ordering operator<=>(Responsibility a, Responsibility b) {
        if (a.is_zero() || b.is_zero()) return !a.is_zero() <=> !b.is_zero();
        return b.denominator_ <=> a.denominator_;
    }

private:
    std::uint32_t denominator_ = 0;
};

enum class DiffSource { s_repair, c_repair };

/// Deleted part D \ D' of one repair D' whose deletions include the tuple of interest.
struct DiffSet {
    TidSet deleted;
    DiffSource source = DiffSource::s_repair;

    friend bool operator==(const DiffSet&, const DiffSet&) = default;
};

struct CauseReport {
    Tid tid;
    Responsibility responsibility;
    /// Subset-minimal contingency sets, one per S-repair deleting the tuple,
    /// ordered by (size, lexicographic).
    std::vector<TidSet> minimal_contingency_sets;
    bool is_counterfactual = false;
    bool is_most_responsible = false;

    friend bool operator==(const CauseReport&, const CauseReport&) = default;
};

/// The minimal contingency sets of smallest size, i.e. those realising the
/// responsibility.
std::vector<TidSet> minimum_contingency_sets(const CauseReport& report);

std::vector<DiffSet> dif_s(const Instance& inst, const UnionQuery& q, Tid t);
std::vector<DiffSet> dif_c(const Instance& inst, const UnionQuery& q, Tid t);

/// One report per endogenous actual cause, sorted by (responsibility desc, tid).
std::vector<CauseReport> actual_causes(const Instance& inst, const UnionQuery& q);

std::vector<TidSet> contingency_sets(const Instance& inst, const UnionQuery& q, Tid t);

Responsibility responsibility(const Instance& inst, const UnionQuery& q, Tid t);

std::vector<Tid> counterfactual_causes(const Instance& inst, const UnionQuery& q);

std::vector<Tid> most_responsible_causes(const Instance& inst, const UnionQuery& q);

/// As actual_causes, with the repairs of the negated query filtered by
/// `hard`. Throws precondition when `inst` itself violates `hard`.
std::vector<CauseReport> causes_under_ics(const Instance& inst, const UnionQuery& q,
                                          const std::vector<HardConstraint>& hard);

/// Builds cause reports from a family of S-repairs and the C-repairs among
/// them. Shared by the hard-constraint path and by tests.
std::vector<CauseReport> causes_from_repairs(const Instance& inst, const std::vector<Repair>& s_family,
                                             const std::vector<Repair>& c_family);

} // namespace whydb
