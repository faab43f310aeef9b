#include "whydb/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>

#include "whydb/error.hpp"

namespace whydb::oracle {

bool naive_holds(const Instance& inst, const std::vector<char>& present, const ConjunctiveQuery& cq) {
    const auto& tuples = inst.tuples();
    std::vector<std::vector<std::size_t>> candidates(cq.atoms.size());
    for (std::size_t a = 0; a < cq.atoms.size(); ++a) {
        for (std::size_t j = 0; j < tuples.size(); ++j) {
            if (tuples[j].predicate != cq.atoms[a].predicate) continue;
            if (tuples[j].args.size() != cq.atoms[a].terms.size())
                throw Error(ErrorKind::arity_clash, "arity mismatch on " + cq.atoms[a].predicate);
            if (present[j]) candidates[a].push_back(j);
        }
        if (candidates[a].empty()) return false;
    }

    std::vector<std::size_t> pick(cq.atoms.size(), 0);
    for (;;) {
        std::map<std::string, std::string> env;
        bool ok = true;
        for (std::size_t a = 0; a < cq.atoms.size() && ok; ++a) {
            const Tuple& t = tuples[candidates[a][pick[a]]];
            for (std::size_t k = 0; k < t.args.size() && ok; ++k) {
                const Term& term = cq.atoms[a].terms[k];
                if (!term.is_variable()) {
                    ok = term.name == t.args[k];
                } else if (auto it = env.find(term.name); it != env.end()) {
                    ok = it->second == t.args[k];
                } else {
                    env[term.name] = t.args[k];
                }
            }
        }
        for (std::size_t i = 0; i < cq.inequalities.size() && ok; ++i) {
            auto value = [&](const Term& term) { return term.is_variable() ? env.at(term.name) : term.name; };
            ok = value(cq.inequalities[i].lhs) != value(cq.inequalities[i].rhs);
        }
        if (ok) return true;

        std::size_t a = 0;
        while (a < pick.size() && ++pick[a] == candidates[a].size()) pick[a++] = 0;
        if (a == pick.size()) return false;
    }
}

namespace {

using Mask = std::uint32_t;

struct Layout {
    std::vector<std::size_t> endogenous; // positions in inst.tuples()
};

Layout layout_of(const Instance& inst, Options opts) {
    Layout l;
    for (std::size_t i = 0; i < inst.tuples().size(); ++i)
        if (inst.tuples()[i].is_endogenous()) l.endogenous.push_back(i);
    const std::size_t guard = std::min(opts.guard, max_guard);
    if (l.endogenous.size() > guard)
        throw Error(ErrorKind::size_guard, "oracle limited to " + std::to_string(guard) + " endogenous tuples, got " +
                                               std::to_string(l.endogenous.size()));
    return l;
}

// Bit i of `removed` deletes the i-th endogenous tuple.
std::vector<char> present_after(const Instance& inst, const Layout& l, Mask removed) {
    std::vector<char> present(inst.tuples().size(), 1);
    for (std::size_t i = 0; i < l.endogenous.size(); ++i)
        if (removed & (Mask{1} << i)) present[l.endogenous[i]] = 0;
    return present;
}

TidSet to_tids(const Instance& inst, const Layout& l, Mask m) {
    TidSet out;
    for (std::size_t i = 0; i < l.endogenous.size(); ++i)
        if (m & (Mask{1} << i)) out.insert(inst.tuples()[l.endogenous[i]].tid);
    return out;
}

bool any_holds(const Instance& inst, const std::vector<char>& present, const std::vector<ConjunctiveQuery>& bodies) {
    for (const auto& b : bodies)
        if (naive_holds(inst, present, b)) return true;
    return false;
}

std::vector<ConjunctiveQuery> bodies_of(const ConstraintSet& cs) {
    std::vector<ConjunctiveQuery> out;
    for (const auto& dc : cs.dcs) out.push_back(dc.body);
    return out;
}

bool by_size_then_lex(const TidSet& a, const TidSet& b) { return a.size() != b.size() ? a.size() < b.size() : a < b; }

void finish_reports(std::vector<CauseReport>& reports) {
    Responsibility best;
    for (const auto& r : reports) best = std::max(best, r.responsibility);
    for (auto& r : reports) {
        std::sort(r.minimal_contingency_sets.begin(), r.minimal_contingency_sets.end(), by_size_then_lex);
        r.is_counterfactual = r.responsibility == Responsibility::inverse_of(1);
        r.is_most_responsible = r.responsibility == best;
    }
    std::sort(reports.begin(), reports.end(), [](const CauseReport& a, const CauseReport& b) {
        if (a.responsibility != b.responsibility) return a.responsibility > b.responsibility;
        return a.tid < b.tid;
    });
}

void require_boolean(const UnionQuery& q) {
    if (!q.is_boolean()) throw Error(ErrorKind::open_query, "oracle needs a boolean query");
}

bool hard_ok(const Instance& inst, const std::vector<char>& present, const HardConstraint& hc) {
    if (const auto* dc = std::get_if<DenialConstraint>(&hc)) return !naive_holds(inst, present, dc->body);
    const auto& ind = std::get<InclusionDependency>(hc);
    const auto& tuples = inst.tuples();
    for (std::size_t i = 0; i < tuples.size(); ++i) {
        if (!present[i] || tuples[i].predicate != ind.from) continue;
        bool matched = false;
        for (std::size_t j = 0; j < tuples.size() && !matched; ++j) {
            if (!present[j] || tuples[j].predicate != ind.to) continue;
            matched = true;
            for (std::size_t k = 0; k < ind.from_positions.size() && matched; ++k)
                matched = tuples[i].args.at(ind.from_positions[k] - 1) == tuples[j].args.at(ind.to_positions[k] - 1);
        }
        if (!matched) return false;
    }
    return true;
}

} // namespace

std::vector<BruteRepair> brute_repairs(const Instance& inst, const ConstraintSet& cs, Options opts) {
    const Layout l = layout_of(inst, opts);
    const auto bodies = bodies_of(cs);
    const Mask full = static_cast<Mask>((Mask{1} << l.endogenous.size()) - 1);

    std::vector<char> consistent(std::size_t{full} + 1);
    for (Mask m = 0;; ++m) {
        consistent[m] = !any_holds(inst, present_after(inst, l, m), bodies);
        if (m == full) break;
    }
    if (!consistent[full]) throw Error(ErrorKind::irreparable, "no consistent subset keeps the exogenous tuples");

    std::vector<Mask> s_masks;
    for (Mask m = 0;; ++m) {
        if (consistent[m]) {
            bool maximal = true;
            for (std::size_t i = 0; i < l.endogenous.size() && maximal; ++i)
                if ((m & (Mask{1} << i)) && consistent[m & ~(Mask{1} << i)]) maximal = false;
            if (maximal) s_masks.push_back(m);
        }
        if (m == full) break;
    }

    int fewest = 64;
    for (Mask m : s_masks) fewest = std::min(fewest, std::popcount(m));

    const TidSet all = inst.tids();
    std::vector<BruteRepair> out;
    for (Mask m : s_masks) {
        BruteRepair br;
        br.repair.deleted = to_tids(inst, l, m);
        for (Tid t : all)
            if (!br.repair.deleted.count(t)) br.repair.retained.insert(t);
        br.is_c_repair = std::popcount(m) == fewest;
        out.push_back(std::move(br));
    }
    std::sort(out.begin(), out.end(), [](const BruteRepair& a, const BruteRepair& b) {
        return by_size_then_lex(a.repair.deleted, b.repair.deleted);
    });
    return out;
}

std::vector<CauseReport> brute_causes(const Instance& inst, const UnionQuery& q, Options opts) {
    require_boolean(q);
    const Layout l = layout_of(inst, opts);
    const Mask full = static_cast<Mask>((Mask{1} << l.endogenous.size()) - 1);

    // holds[m]: the query is true once the endogenous tuples in m are removed.
    std::vector<char> holds(std::size_t{full} + 1);
    for (Mask m = 0;; ++m) {
        holds[m] = any_holds(inst, present_after(inst, l, m), q.disjuncts);
        if (m == full) break;
    }

    std::vector<CauseReport> reports;
    for (std::size_t i = 0; i < l.endogenous.size(); ++i) {
        const Mask bit = Mask{1} << i;
        std::vector<Mask> gammas;
        for (Mask g = 0;; ++g) {
            if (!(g & bit) && holds[g] && !holds[g | bit]) gammas.push_back(g);
            if (g == full) break;
        }
        if (gammas.empty()) continue;

        std::stable_sort(gammas.begin(), gammas.end(),
                         [](Mask a, Mask b) { return std::popcount(a) < std::popcount(b); });
        std::vector<Mask> minimal;
        for (Mask g : gammas)
            if (std::none_of(minimal.begin(), minimal.end(), [&](Mask k) { return (k & g) == k; }))
                minimal.push_back(g);

        CauseReport r;
        r.tid = inst.tuples()[l.endogenous[i]].tid;
        for (Mask g : minimal) r.minimal_contingency_sets.push_back(to_tids(inst, l, g));
        r.responsibility = Responsibility::inverse_of(static_cast<std::uint32_t>(std::popcount(minimal.front()) + 1));
        reports.push_back(std::move(r));
    }
    finish_reports(reports);
    return reports;
}

Responsibility brute_responsibility(const Instance& inst, const UnionQuery& q, Tid t, Options opts) {
    inst.tuple(t);
    for (const auto& r : brute_causes(inst, q, opts))
        if (r.tid == t) return r.responsibility;
    return Responsibility::zero();
}

std::vector<CauseReport> brute_causes_filtered(const Instance& inst, const UnionQuery& q,
                                               const std::vector<HardConstraint>& hard, Options opts) {
    require_boolean(q);
    ConstraintSet kappa;
    for (const auto& cq : q.disjuncts) kappa.dcs.push_back({cq, ""});

    std::vector<BruteRepair> repairs;
    try {
        repairs = brute_repairs(inst, kappa, opts);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::irreparable) throw;
        return {};
    }

    std::vector<TidSet> kept;
    for (const auto& br : repairs) {
        std::vector<char> present(inst.tuples().size(), 0);
        for (std::size_t i = 0; i < inst.tuples().size(); ++i)
            present[i] = br.repair.retained.count(inst.tuples()[i].tid) ? 1 : 0;
        if (std::all_of(hard.begin(), hard.end(), [&](const HardConstraint& hc) { return hard_ok(inst, present, hc); }))
            kept.push_back(br.repair.deleted);
    }

    std::vector<CauseReport> reports;
    for (const auto& tuple : inst.tuples()) {
        if (!tuple.is_endogenous()) continue;
        CauseReport r;
        r.tid = tuple.tid;
        for (const auto& deleted : kept) {
            if (!deleted.count(tuple.tid)) continue;
            TidSet gamma = deleted;
            gamma.erase(tuple.tid);
            r.minimal_contingency_sets.push_back(gamma);
        }
        if (r.minimal_contingency_sets.empty()) continue;
        std::size_t smallest = r.minimal_contingency_sets.front().size();
        for (const auto& g : r.minimal_contingency_sets) smallest = std::min(smallest, g.size());
        r.responsibility = Responsibility::inverse_of(static_cast<std::uint32_t>(smallest + 1));
        reports.push_back(std::move(r));
    }
    finish_reports(reports);
    return reports;
}

} // namespace whydb::oracle
