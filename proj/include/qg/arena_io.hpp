#pragma once

#include <string>
#include <string_view>

#include "qg/arena.hpp"

namespace qg {

// Line format: `arena <name>`, `vertex <id> owner=<1|2>`,
// `edge <from> <to> weight=<w>`, `start <id>`; `#` starts a comment.
ExplicitArena parse_arena(std::string_view text);
std::string serialize_arena(const ExplicitArena& arena);

// Materializes everything reachable from the root; fails beyond `max_vertices`.
ExplicitArena materialize(const Arena& arena, std::size_t max_vertices);

} // namespace qg
