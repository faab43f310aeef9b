#include "whydb/repair.hpp"

#include <algorithm>
#include <map>

#include "syntax.hpp"
#include "whydb/error.hpp"

namespace whydb {

// ---------------------------------------------------------------------------
// Hard constraints

namespace {

std::string positions_text(const std::vector<std::size_t>& ps) {
    std::string out = "[";
    for (std::size_t i = 0; i < ps.size(); ++i) out += (i ? "," : "") + std::to_string(ps[i]);
    return out + "]";
}

std::vector<std::size_t> read_positions(detail::TextCursor& in) {
    std::vector<std::size_t> ps;
    in.expect("[");
    do {
        ps.push_back(in.positive_integer("position"));
    } while (in.accept(","));
    in.expect("]");
    return ps;
}

void check_positions(const std::string& pred, const std::vector<std::size_t>& ps, std::optional<std::size_t> arity) {
    if (!arity) return;
    for (std::size_t p : ps)
        if (p > *arity)
            throw Error(ErrorKind::invalid_constraint, "position " + std::to_string(p) + " out of range for " + pred +
                                                           "/" + std::to_string(*arity));
}

std::optional<std::size_t> schema_arity(const Schema& schema, const std::string& pred) {
    auto it = schema.find(pred);
    if (it == schema.end()) return std::nullopt;
    return it->second;
}

} // namespace

std::vector<HardConstraint> parse_hard_constraints(std::string_view text, const Schema& schema) {
    detail::TextCursor in(text);
    std::vector<HardConstraint> out;
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
            out.emplace_back(std::move(dc));
            continue;
        }
        std::string word = in.identifier("constraint");
        in.skip_space();
        if (word == "fd" && in.peek() != '[') {
            out.emplace_back(detail::read_fd(in, schema));
            continue;
        }
        InclusionDependency ind;
        ind.from = std::move(word);
        ind.from_positions = read_positions(in);
        if (!in.accept("<=") && !in.accept("⊆")) in.fail("expected '<='" + in.found());
        ind.to = in.identifier("predicate name");
        ind.to_positions = read_positions(in);
        in.expect(".");
        if (ind.from_positions.size() != ind.to_positions.size())
            throw ParseError(line, col, "inclusion dependency sides have different lengths");
        check_positions(ind.from, ind.from_positions, schema_arity(schema, ind.from));
        check_positions(ind.to, ind.to_positions, schema_arity(schema, ind.to));
        out.emplace_back(std::move(ind));
    }
    return out;
}

std::string hard_constraint_text(const HardConstraint& hc) {
    if (const auto* dc = std::get_if<DenialConstraint>(&hc)) return dc->label.empty() ? dc_text(*dc) : dc->label;
    const auto& ind = std::get<InclusionDependency>(hc);
    return ind.from + positions_text(ind.from_positions) + " <= " + ind.to + positions_text(ind.to_positions);
}

bool satisfies(const Instance& inst, const HardConstraint& hc) {
    if (const auto* dc = std::get_if<DenialConstraint>(&hc)) return !eval_cq(inst, dc->body);
    const auto& ind = std::get<InclusionDependency>(hc);
    check_positions(ind.from, ind.from_positions, inst.arity(ind.from));
    check_positions(ind.to, ind.to_positions, inst.arity(ind.to));

    auto project = [&](const Tuple& t, const std::vector<std::size_t>& ps) {
        std::vector<std::string> key;
        for (std::size_t p : ps) key.push_back(t.args[p - 1]);
        return key;
    };
    std::set<std::vector<std::string>> targets;
    for (std::size_t i : inst.of_predicate(ind.to)) targets.insert(project(inst.tuples()[i], ind.to_positions));
    for (std::size_t i : inst.of_predicate(ind.from))
        if (!targets.count(project(inst.tuples()[i], ind.from_positions))) return false;
    return true;
}

bool satisfies_all(const Instance& inst, const std::vector<HardConstraint>& hard) {
    return std::all_of(hard.begin(), hard.end(), [&](const HardConstraint& hc) { return satisfies(inst, hc); });
}

// ---------------------------------------------------------------------------
// Minimal hitting sets

namespace {

bool size_then_lex(const TidSet& a, const TidSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

// Branches on the first unhit edge. Branch i forbids the elements before
// position i of that edge, so each minimal hitting set H is reached along
// exactly one path: the one that always picks min(edge ∩ H).
class HittingSetSearch {
public:
    explicit HittingSetSearch(std::vector<std::vector<std::size_t>> edges, std::size_t universe)
        : edges_(std::move(edges)), hits_(edges_.size(), 0), forbidden_(universe, 0), containing_(universe) {
        for (std::size_t e = 0; e < edges_.size(); ++e)
            for (std::size_t v : edges_[e]) containing_[v].push_back(e);
    }

    std::vector<std::vector<std::size_t>> run() {
        search(0);
        return std::move(found_);
    }

private:
    void search(std::size_t from_edge) {
        std::size_t e = from_edge;
        while (e < edges_.size() && hits_[e] > 0) ++e;
        if (e == edges_.size()) {
            found_.push_back(chosen_);
            return;
        }
        std::vector<std::size_t> newly_forbidden;
        for (std::size_t v : edges_[e]) {
            if (forbidden_[v]) continue;
            choose(v);
            if (all_chosen_private()) search(e + 1);
            unchoose(v);
            forbidden_[v] = 1;
            newly_forbidden.push_back(v);
        }
        for (std::size_t v : newly_forbidden) forbidden_[v] = 0;
    }

    void choose(std::size_t v) {
        chosen_.push_back(v);
        for (std::size_t e : containing_[v]) ++hits_[e];
    }

    void unchoose(std::size_t v) {
        chosen_.pop_back();
        for (std::size_t e : containing_[v]) --hits_[e];
    }

    // A chosen element only loses private edges as more are chosen, so a
    // failure here is final for the whole subtree.
    bool all_chosen_private() const {
        for (std::size_t u : chosen_) {
            bool has_private = false;
            for (std::size_t e : containing_[u])
                if (hits_[e] == 1) {
                    has_private = true;
                    break;
                }
            if (!has_private) return false;
        }
        return true;
    }

    std::vector<std::vector<std::size_t>> edges_;
    std::vector<std::size_t> hits_;
    std::vector<char> forbidden_;
    std::vector<std::vector<std::size_t>> containing_;
    std::vector<std::size_t> chosen_;
    std::vector<std::vector<std::size_t>> found_;
};

} // namespace

std::vector<TidSet> minimal_hitting_sets(const std::vector<TidSet>& edges) {
    // Dedupe and drop edges that contain another edge; neither changes the
    // family of minimal hitting sets.
    std::vector<TidSet> sorted(edges.begin(), edges.end());
    std::sort(sorted.begin(), sorted.end(), size_then_lex);
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<TidSet> minimal;
    for (const auto& e : sorted) {
        if (e.empty()) throw Error(ErrorKind::irreparable, "hypergraph has an empty edge");
        if (std::none_of(minimal.begin(), minimal.end(), [&](const TidSet& m) { return is_subset(m, e); }))
            minimal.push_back(e);
    }
    std::sort(minimal.begin(), minimal.end());

    std::vector<Tid> universe;
    for (const auto& e : minimal) universe.insert(universe.end(), e.begin(), e.end());
    std::sort(universe.begin(), universe.end());
    universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
    auto index_of = [&](Tid t) {
        return static_cast<std::size_t>(std::lower_bound(universe.begin(), universe.end(), t) - universe.begin());
    };

    std::vector<std::vector<std::size_t>> indexed;
    for (const auto& e : minimal) {
        std::vector<std::size_t> row;
        for (Tid t : e) row.push_back(index_of(t));
        indexed.push_back(std::move(row));
    }

    std::vector<TidSet> out;
    for (const auto& hs : HittingSetSearch(std::move(indexed), universe.size()).run()) {
        TidSet s;
        for (std::size_t i : hs) s.insert(universe[i]);
        out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end(), size_then_lex);
    return out;
}

// ---------------------------------------------------------------------------
// Repairs

std::vector<Repair> s_repairs(const Instance& inst, const ConstraintSet& cs, const std::vector<HardConstraint>& hard) {
    std::vector<TidSet> edges;
    for (const auto& v : violations(inst, cs)) {
        TidSet endogenous;
        for (Tid t : v.tids)
            if (inst.tuple(t).is_endogenous()) endogenous.insert(t);
        if (endogenous.empty())
            throw Error(ErrorKind::irreparable, "violation of " + cs.dcs[v.constraint_index].label +
                                                    " involves only exogenous tuples " +
                                                    tuple_set_text(inst, v.tids));
        edges.push_back(std::move(endogenous));
    }

    const TidSet all = inst.tids();
    std::vector<Repair> out;
    for (auto& deleted : minimal_hitting_sets(edges)) {
        Repair r;
        std::set_difference(all.begin(), all.end(), deleted.begin(), deleted.end(),
                            std::inserter(r.retained, r.retained.end()));
        r.deleted = std::move(deleted);
        if (!hard.empty() && !satisfies_all(inst.restrict_to(r.retained), hard)) continue;
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<Repair> minimum_cardinality(const std::vector<Repair>& repairs) {
    if (repairs.empty()) return {};
    std::size_t best = repairs.front().deleted.size();
    for (const auto& r : repairs) best = std::min(best, r.deleted.size());
    std::vector<Repair> out;
    for (const auto& r : repairs)
        if (r.deleted.size() == best) out.push_back(r);
    return out;
}

std::vector<Repair> c_repairs(const Instance& inst, const ConstraintSet& cs, const std::vector<HardConstraint>& hard) {
    return minimum_cardinality(s_repairs(inst, cs, hard));
}

const char* to_string(SubsetClass c) {
    switch (c) {
    case SubsetClass::inconsistent: return "inconsistent";
    case SubsetClass::consistent_not_maximal: return "consistent_not_maximal";
    case SubsetClass::s_repair: return "s_repair";
    case SubsetClass::c_repair: return "c_repair";
    }
    return "?";
}

SubsetClass classify_subset(const Instance& inst, const ConstraintSet& cs, const TidSet& retained) {
    for (Tid t : retained) inst.tuple(t);
    if (!satisfies(inst.restrict_to(retained), cs)) return SubsetClass::inconsistent;

    TidSet deleted;
    for (const auto& t : inst.tuples()) {
        if (retained.count(t.tid)) continue;
        if (!t.is_endogenous()) return SubsetClass::consistent_not_maximal;
        deleted.insert(t.tid);
    }
    for (Tid t : deleted) {
        TidSet grown = retained;
        grown.insert(t);
        if (satisfies(inst.restrict_to(grown), cs)) return SubsetClass::consistent_not_maximal;
    }
    const auto repairs = c_repairs(inst, cs);
    if (!repairs.empty() && deleted.size() == repairs.front().deleted.size()) return SubsetClass::c_repair;
    return SubsetClass::s_repair;
}

} // namespace whydb
