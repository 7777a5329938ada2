#pragma once

#include <iosfwd>
#include <string>

#include "cutplane/program.hpp"

namespace cutplane {

/// Model file schema identifier. Files carry it in a top-level "format"
/// field; loaders reject anything else.
inline constexpr const char* kModelFormat = "cutplane-sp/1";

/// Serializes a program to the cutplane-sp/1 text format (JSON). The
/// round trip parse -> serialize -> parse is lossless, including every
/// floating-point entry.
std::string serialize_program(const StochasticProgram& program);
StochasticProgram parse_program(const std::string& text);

void save_program(const std::string& path, const StochasticProgram& program);
StochasticProgram load_program(const std::string& path);

}  // namespace cutplane
