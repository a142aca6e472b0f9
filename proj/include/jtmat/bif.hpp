#ifndef JTMAT_BIF_HPP
#define JTMAT_BIF_HPP

#include <string>

#include "jtmat/network.hpp"

namespace jtmat {

// Parses the BIF subset described in docs/formats.md: `network`,
// `variable` (discrete only) and `probability` blocks with `table` or
// per-row parenthesized entries; properties are ignored. Variable order
// follows declaration order. CPT rows off by at most 1e-6 from unit sum
// are renormalized; anything worse raises ParseError listing the
// offending rows.
BayesianNetwork parse_bif(const std::string& text);

BayesianNetwork parse_bif_file(const std::string& path);

}  // namespace jtmat

#endif  // JTMAT_BIF_HPP
