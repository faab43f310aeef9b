#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace whydb {

/// Global tuple identifier. Positive and unique within an Instance.
struct Tid {
    std::uint32_t value = 0;

    friend auto operator<=>(const Tid&, const Tid&) = default;
};

std::ostream& operator<<(std::ostream& os, Tid tid);

using TidSet = std::set<Tid>;

enum class Genus { endogenous, exogenous };

/// A ground atom labelled with its tid and whether it may be intervened on.
struct Tuple {
    std::string predicate;
    std::vector<std::string> args;
    Tid tid;
    Genus genus = Genus::endogenous;

    bool is_endogenous() const noexcept { return genus == Genus::endogenous; }

    friend bool operator==(const Tuple&, const Tuple&) = default;
};

/// `Pred(c1,...,cn)`
std::string atom_text(const Tuple& t);
/// `Pred(c1,...,cn)#tid`
std::string labelled_text(const Tuple& t);

/// Predicate name to arity, as observed in an instance.
using Schema = std::map<std::string, std::size_t, std::less<>>;

/// Finite set of uniquely tid-labelled ground tuples.
///
/// Tuples are stored in ascending tid order. Construction validates the
/// invariants (distinct tids, set semantics on (predicate, args), one arity
/// per predicate); instances are immutable afterwards.
class Instance {
public:
    Instance() = default;
    explicit Instance(std::vector<Tuple> tuples);

    const std::vector<Tuple>& tuples() const noexcept { return tuples_; }
    std::size_t size() const noexcept { return tuples_.size(); }
    bool empty() const noexcept { return tuples_.empty(); }

    bool contains(Tid tid) const;
    const Tuple& tuple(Tid tid) const;

    /// Positions (into tuples()) of the tuples of one predicate, tid order.
    const std::vector<std::size_t>& of_predicate(std::string_view predicate) const;

    std::optional<std::size_t> arity(std::string_view predicate) const;
    const Schema& schema() const noexcept { return schema_; }

    TidSet tids() const;
    TidSet endogenous_tids() const;
    TidSet exogenous_tids() const;

    /// Sub-instance keeping exactly the given tids (unknown tids ignored).
    Instance restrict_to(const TidSet& keep) const;
    /// Sub-instance with the given tids removed.
    Instance without(const TidSet& removed) const;

    friend bool operator==(const Instance& a, const Instance& b) { return a.tuples_ == b.tuples_; }

private:
    std::vector<Tuple> tuples_;
    std::map<Tid, std::size_t> by_tid_;
    std::map<std::string, std::vector<std::size_t>, std::less<>> by_predicate_;
    Schema schema_;
};

/// Parses fact-file text.
///
/// Grammar, line oriented, `%` to end of line is a comment:
///
///     Pred(c1,...,cn).          endogenous, tid assigned in file order
///     @exo Pred(c1,...,cn).     exogenous
///     Pred[tid](c1,...,cn).     explicit tid
///
/// Either every fact carries an explicit tid or none does.
Instance load_instance(std::string_view text);

/// Reads a file and parses it with load_instance.
Instance load_instance_file(const std::string& path);

/// Serializes with explicit tids so that load_instance round-trips.
std::string to_fact_text(const Instance& inst);

/// The unique tuple with the given tid; throws unknown_tid.
const Tuple& tuple_by_tid(const Instance& inst, Tid t);

std::string tid_set_text(const TidSet& s);
std::string tuple_set_text(const Instance& inst, const TidSet& s);

bool is_subset(const TidSet& a, const TidSet& b);

} // namespace whydb
