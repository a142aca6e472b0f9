#ifndef JTMAT_NATIVE_IO_HPP
#define JTMAT_NATIVE_IO_HPP

#include <string>

#include "jtmat/junction_tree.hpp"
#include "jtmat/network.hpp"
#include "jtmat/shortcuts.hpp"

namespace jtmat {

// Native structured text formats, all versioned and bit-stable: values are
// printed with 17 significant digits so parse(serialize(x)) reproduces the
// exact doubles, and re-serialization is byte-identical. Layouts are
// documented in docs/formats.md.

// `jtmat-net v1`
std::string serialize_network(const BayesianNetwork& bn);
BayesianNetwork parse_network(const std::string& text);

// `jtmat-tree v1`
std::string serialize_tree(const JunctionTree& jt);
JunctionTree parse_tree(const std::string& text);

// `jtmat-cat v1`
std::string serialize_catalog(const Catalog& catalog);
Catalog parse_catalog(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Reads either format: native when the header matches, BIF otherwise.
BayesianNetwork read_network_auto(const std::string& path);

}  // namespace jtmat

#endif  // JTMAT_NATIVE_IO_HPP
