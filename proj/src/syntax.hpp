#pragma once

#include <cstddef>

#include "text_cursor.hpp"
#include "whydb/query.hpp"

namespace whydb::detail {

Term read_term(TextCursor& in);

// Reads `item {, item} .` where an item is an atom or `t1 != t2`.
ConjunctiveQuery read_body(TextCursor& in);

// Reads what follows the `fd` keyword up to and including the final `.`.
DenialConstraint read_fd(TextCursor& in, const Schema& schema);

} // namespace whydb::detail
