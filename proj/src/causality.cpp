#include "whydb/causality.hpp"

#include <algorithm>

#include "whydb/error.hpp"

namespace whydb {

Responsibility Responsibility::inverse_of(std::uint32_t k) {
    if (k == 0) throw Error(ErrorKind::precondition, "responsibility denominator must be positive");
    Responsibility r;
    r.denominator_ = k;
    return r;
}

std::string Responsibility::text() const {
    if (is_zero()) return "0";
    if (denominator_ == 1) return "1";
    return "1/" + std::to_string(denominator_);
}

namespace {

bool size_then_lex(const TidSet& a, const TidSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

struct RepairFamilies {
    std::vector<Repair> s;
    std::vector<Repair> c;
};

// When some violation of the negated query is made of exogenous tuples only,
// no endogenous intervention can falsify the query and nothing is a cause.
RepairFamilies families(const Instance& inst, const UnionQuery& q, const std::vector<HardConstraint>& hard = {}) {
    const ConstraintSet cs = negate_query(q);
    RepairFamilies f;
    try {
        f.s = s_repairs(inst, cs, hard);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::irreparable) throw;
        return f;
    }
    f.c = minimum_cardinality(f.s);
    return f;
}

std::vector<DiffSet> diffs_containing(const std::vector<Repair>& family, Tid t, DiffSource source) {
    std::vector<DiffSet> out;
    for (const auto& r : family)
        if (r.deleted.count(t)) out.push_back({r.deleted, source});
    std::sort(out.begin(), out.end(), [](const DiffSet& a, const DiffSet& b) { return size_then_lex(a.deleted, b.deleted); });
    return out;
}

void require_boolean(const UnionQuery& q) {
    if (!q.is_boolean()) throw Error(ErrorKind::open_query, "query has free variables; a boolean query is required");
}

} // namespace

std::vector<TidSet> minimum_contingency_sets(const CauseReport& report) {
    std::vector<TidSet> out;
    if (report.minimal_contingency_sets.empty()) return out;
    const std::size_t best = report.minimal_contingency_sets.front().size();
    for (const auto& g : report.minimal_contingency_sets)
        if (g.size() == best) out.push_back(g);
    return out;
}

std::vector<DiffSet> dif_s(const Instance& inst, const UnionQuery& q, Tid t) {
    require_boolean(q);
    inst.tuple(t);
    return diffs_containing(families(inst, q).s, t, DiffSource::s_repair);
}

std::vector<DiffSet> dif_c(const Instance& inst, const UnionQuery& q, Tid t) {
    require_boolean(q);
    inst.tuple(t);
    return diffs_containing(families(inst, q).c, t, DiffSource::c_repair);
}

std::vector<CauseReport> causes_from_repairs(const Instance& inst, const std::vector<Repair>& s_family,
                                             const std::vector<Repair>& c_family) {
    std::vector<CauseReport> out;
    for (const auto& tuple : inst.tuples()) {
        if (!tuple.is_endogenous()) continue;
        const Tid t = tuple.tid;
        const auto diffs = diffs_containing(s_family, t, DiffSource::s_repair);
        if (diffs.empty()) continue;

        CauseReport report;
        report.tid = t;
        for (const auto& d : diffs) {
            TidSet gamma = d.deleted;
            gamma.erase(t);
            report.minimal_contingency_sets.push_back(std::move(gamma));
        }
        std::sort(report.minimal_contingency_sets.begin(), report.minimal_contingency_sets.end(), size_then_lex);
        report.responsibility =
            Responsibility::inverse_of(static_cast<std::uint32_t>(report.minimal_contingency_sets.front().size() + 1));
        report.is_counterfactual = report.minimal_contingency_sets.front().empty();
        report.is_most_responsible =
            std::any_of(c_family.begin(), c_family.end(), [&](const Repair& r) { return r.deleted.count(t) != 0; });
        out.push_back(std::move(report));
    }
    std::stable_sort(out.begin(), out.end(), [](const CauseReport& a, const CauseReport& b) {
        if (a.responsibility != b.responsibility) return a.responsibility > b.responsibility;
        return a.tid < b.tid;
    });
    return out;
}

std::vector<CauseReport> actual_causes(const Instance& inst, const UnionQuery& q) {
    require_boolean(q);
    const auto f = families(inst, q);
    return causes_from_repairs(inst, f.s, f.c);
}

std::vector<TidSet> contingency_sets(const Instance& inst, const UnionQuery& q, Tid t) {
    require_boolean(q);
    if (!inst.tuple(t).is_endogenous())
        throw Error(ErrorKind::precondition, "tid " + std::to_string(t.value) + " is exogenous");
    std::vector<TidSet> out;
    for (const auto& d : dif_s(inst, q, t)) {
        TidSet gamma = d.deleted;
        gamma.erase(t);
        out.push_back(std::move(gamma));
    }
    std::sort(out.begin(), out.end(), size_then_lex);
    return out;
}

Responsibility responsibility(const Instance& inst, const UnionQuery& q, Tid t) {
    const auto diffs = dif_s(inst, q, t);
    if (diffs.empty()) return Responsibility::zero();
    return Responsibility::inverse_of(static_cast<std::uint32_t>(diffs.front().deleted.size()));
}

std::vector<Tid> counterfactual_causes(const Instance& inst, const UnionQuery& q) {
    std::vector<Tid> out;
    for (const auto& r : actual_causes(inst, q))
        if (r.is_counterfactual) out.push_back(r.tid);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Tid> most_responsible_causes(const Instance& inst, const UnionQuery& q) {
    std::vector<Tid> out;
    for (const auto& r : actual_causes(inst, q))
        if (r.is_most_responsible) out.push_back(r.tid);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<CauseReport> causes_under_ics(const Instance& inst, const UnionQuery& q,
                                          const std::vector<HardConstraint>& hard) {
    require_boolean(q);
    for (const auto& hc : hard)
        if (!satisfies(inst, hc))
            throw Error(ErrorKind::precondition, "instance violates hard constraint " + hard_constraint_text(hc));
    const auto f = families(inst, q, hard);
    return causes_from_repairs(inst, f.s, f.c);
}

} // namespace whydb
