#pragma once

#include <string>

#include "contab/margins.hpp"

namespace contab {

// Shortest-faithful double formatting: %.{digits}g.  17 significant digits
// round-trips every double bit-exactly; smaller values trade fidelity for
// readability.
std::string format_double(double v, int digits = 17);

// Margins as JSON: {"rows": [...], "cols": [...]}.  Extra keys are ignored.
// Parsing validates the pair (same exceptions as validate()); malformed JSON
// throws InvalidMargins.
MarginPair margins_from_json(const std::string& text);
std::string margins_to_json(const MarginPair& mp);

// Margins as a single CSV record: m,n,r1,...,rm,c1,...,cn
MarginPair margins_from_record(const std::string& line);
std::string margins_to_record(const MarginPair& mp);

// Loads a margins file, sniffing the format: JSON if the first non-space
// character is '{', otherwise the one-line record form.
MarginPair load_margins_file(const std::string& path);

}  // namespace contab
