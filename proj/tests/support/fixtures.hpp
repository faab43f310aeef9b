#pragma once

#include <string>

#include "whydb/core.hpp"
#include "whydb/query.hpp"

namespace whydb::testing {

// Running example: R(a4,a3) R(a2,a1) R(a3,a3) S(a4) S(a2) S(a3), tids 1..6.
inline const char* running_facts = "R(a4,a3). R(a2,a1). R(a3,a3). S(a4). S(a2). S(a3).";
inline const char* running_query = "q :- S(x), R(x,y), S(y).";

// Second example: P(a) P(e) Q(a,b) R(a,c), tids 1..4, with two denials.
inline const char* two_dc_facts = "P(a). P(e). Q(a,b). R(a,c).";
inline const char* two_dc_constraints = ":- P(x), Q(x,y).\n:- P(x), R(x,y).";
inline const char* two_dc_query = "q :- P(x), Q(x,y).\nq :- P(x), R(x,y).";

inline Instance running_instance() { return load_instance(running_facts); }
inline UnionQuery running_q() { return parse_query(running_query); }
inline Instance two_dc_instance() { return load_instance(two_dc_facts); }

inline TidSet tids(std::initializer_list<std::uint32_t> values) {
    TidSet out;
    for (auto v : values) out.insert(Tid{v});
    return out;
}

} // namespace whydb::testing
