#include "whydb/core.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "text_cursor.hpp"
#include "whydb/error.hpp"

namespace whydb {

std::ostream& operator<<(std::ostream& os, Tid tid) { return os << tid.value; }

std::string atom_text(const Tuple& t) {
    std::string out = t.predicate + "(";
    for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) out += ',';
        out += t.args[i];
    }
    return out + ")";
}

std::string labelled_text(const Tuple& t) { return atom_text(t) + "#" + std::to_string(t.tid.value); }

namespace {

bool constant_char(char c) {
    return !std::isspace(static_cast<unsigned char>(c)) && c != ',' && c != '(' && c != ')' && c != '%' &&
           c != '\0';
}

} // namespace

Instance::Instance(std::vector<Tuple> tuples) {
    std::map<std::pair<std::string, std::vector<std::string>>, Tid> seen;
    for (const auto& t : tuples) {
        if (t.tid.value == 0) throw Error(ErrorKind::duplicate_tid, "tid must be positive: " + atom_text(t));
        if (t.args.empty()) throw Error(ErrorKind::parse, "predicate needs at least one argument: " + t.predicate);
        for (const auto& a : t.args)
            if (a.empty() || !std::all_of(a.begin(), a.end(), [](char c) { return constant_char(c) && c != '"'; }))
                throw Error(ErrorKind::parse, "invalid constant '" + a + "' in " + t.predicate);
        if (!by_tid_.emplace(t.tid, 0).second)
            throw Error(ErrorKind::duplicate_tid, "duplicate tid " + std::to_string(t.tid.value));
        if (!seen.emplace(std::pair{t.predicate, t.args}, t.tid).second)
            throw Error(ErrorKind::duplicate_fact, "duplicate fact " + atom_text(t));
        auto [it, fresh] = schema_.emplace(t.predicate, t.args.size());
        if (!fresh && it->second != t.args.size())
            throw Error(ErrorKind::arity_clash, "predicate " + t.predicate + " used with arity " +
                                                    std::to_string(it->second) + " and " +
                                                    std::to_string(t.args.size()));
    }
    tuples_ = std::move(tuples);
    std::sort(tuples_.begin(), tuples_.end(), [](const Tuple& a, const Tuple& b) { return a.tid < b.tid; });
    for (std::size_t i = 0; i < tuples_.size(); ++i) {
        by_tid_[tuples_[i].tid] = i;
        by_predicate_[tuples_[i].predicate].push_back(i);
    }
}

bool Instance::contains(Tid tid) const { return by_tid_.count(tid) != 0; }

const Tuple& Instance::tuple(Tid tid) const {
    auto it = by_tid_.find(tid);
    if (it == by_tid_.end()) throw Error(ErrorKind::unknown_tid, "unknown tid " + std::to_string(tid.value));
    return tuples_[it->second];
}

const std::vector<std::size_t>& Instance::of_predicate(std::string_view predicate) const {
    static const std::vector<std::size_t> none;
    auto it = by_predicate_.find(predicate);
    return it == by_predicate_.end() ? none : it->second;
}

std::optional<std::size_t> Instance::arity(std::string_view predicate) const {
    auto it = schema_.find(predicate);
    if (it == schema_.end()) return std::nullopt;
    return it->second;
}

TidSet Instance::tids() const {
    TidSet out;
    for (const auto& t : tuples_) out.insert(out.end(), t.tid);
    return out;
}

TidSet Instance::endogenous_tids() const {
    TidSet out;
    for (const auto& t : tuples_)
        if (t.is_endogenous()) out.insert(out.end(), t.tid);
    return out;
}

TidSet Instance::exogenous_tids() const {
    TidSet out;
    for (const auto& t : tuples_)
        if (!t.is_endogenous()) out.insert(out.end(), t.tid);
    return out;
}

Instance Instance::restrict_to(const TidSet& keep) const {
    std::vector<Tuple> kept;
    for (const auto& t : tuples_)
        if (keep.count(t.tid)) kept.push_back(t);
    return Instance(std::move(kept));
}

Instance Instance::without(const TidSet& removed) const {
    std::vector<Tuple> kept;
    for (const auto& t : tuples_)
        if (!removed.count(t.tid)) kept.push_back(t);
    return Instance(std::move(kept));
}

Instance load_instance(std::string_view text) {
    detail::TextCursor in(text);
    std::vector<Tuple> tuples;
    std::optional<bool> explicit_mode;
    std::uint32_t next_tid = 1;
    std::set<Tid> tids_seen;
    std::set<std::pair<std::string, std::vector<std::string>>> facts_seen;
    std::map<std::string, std::size_t> arities;

    for (;;) {
        in.skip_space();
        if (in.at_end()) break;
        const std::size_t line = in.line(), col = in.column();

        Genus genus = Genus::endogenous;
        if (in.peek() == '@') {
            in.get();
            std::string kw = in.identifier("'exo'");
            if (kw != "exo") throw ParseError(line, col, "unknown annotation @" + kw);
            genus = Genus::exogenous;
        }

        Tuple t;
        t.genus = genus;
        t.predicate = in.identifier("predicate name");

        bool has_tid = false;
        if (in.accept("[")) {
            t.tid = Tid{static_cast<std::uint32_t>(in.positive_integer("tid"))};
            in.expect("]");
            has_tid = true;
        }
        if (explicit_mode && *explicit_mode != has_tid)
            throw ParseError(line, col, "explicit and implicit tids cannot be mixed");
        explicit_mode = has_tid;
        if (!has_tid) t.tid = Tid{next_tid++};

        in.expect("(");
        do {
            in.skip_space();
            std::string arg;
            const bool quoted = in.accept("\"");
            while (!in.at_end() && constant_char(in.peek()) && !(quoted && in.peek() == '"')) arg += in.get();
            if (arg.empty()) in.fail("expected constant" + in.found());
            if (quoted) in.expect("\"");
            t.args.push_back(std::move(arg));
        } while (in.accept(","));
        in.expect(")");
        in.expect(".");

        const std::string where = std::to_string(line) + ":" + std::to_string(col) + ": ";
        if (!tids_seen.insert(t.tid).second)
            throw Error(ErrorKind::duplicate_tid, where + "duplicate tid " + std::to_string(t.tid.value));
        if (!facts_seen.emplace(t.predicate, t.args).second)
            throw Error(ErrorKind::duplicate_fact, where + "duplicate fact " + atom_text(t));
        auto [arity, fresh] = arities.emplace(t.predicate, t.args.size());
        if (!fresh && arity->second != t.args.size())
            throw Error(ErrorKind::arity_clash, where + "arity clash for predicate " + t.predicate);
        tuples.push_back(std::move(t));
    }
    return Instance(std::move(tuples));
}

Instance load_instance_file(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw Error(ErrorKind::parse, "cannot read " + path);
    std::ostringstream buf;
    buf << file.rdbuf();
    return load_instance(buf.str());
}

std::string to_fact_text(const Instance& inst) {
    std::string out;
    for (const auto& t : inst.tuples()) {
        if (!t.is_endogenous()) out += "@exo ";
        out += t.predicate + "[" + std::to_string(t.tid.value) + "](";
        for (std::size_t i = 0; i < t.args.size(); ++i) {
            if (i) out += ',';
            out += t.args[i];
        }
        out += ").\n";
    }
    return out;
}

const Tuple& tuple_by_tid(const Instance& inst, Tid t) { return inst.tuple(t); }

std::string tid_set_text(const TidSet& s) {
    std::string out = "{";
    bool first = true;
    for (Tid t : s) {
        if (!first) out += ',';
        first = false;
        out += std::to_string(t.value);
    }
    return out + "}";
}

std::string tuple_set_text(const Instance& inst, const TidSet& s) {
    std::string out = "{";
    bool first = true;
    for (Tid t : s) {
        if (!first) out += ", ";
        first = false;
        out += labelled_text(inst.tuple(t));
    }
    return out + "}";
}

bool is_subset(const TidSet& a, const TidSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

} // namespace whydb
