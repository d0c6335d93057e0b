#pragma once

#include <filesystem>
#include <iosfwd>

#include "phm/decay.hpp"

namespace phm {

/// Reads rows "x re [im]" separated by whitespace or commas. Blank lines and
/// text after '#' are ignored; a missing imaginary column reads as 0.
/// Throws std::runtime_error naming the offending line.
ComplexTable read_complex_table(std::istream& in);
ComplexTable read_complex_table(const std::filesystem::path& path);

/// Writes "# t re_A im_A" followed by one row per node, round-trip precision.
void write_complex_table(std::ostream& out, const ComplexTable& table, const char* header = "t re im");

}  // namespace phm
