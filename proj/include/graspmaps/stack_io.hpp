#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "graspmaps/mapbuild.hpp"

namespace graspmaps {

// Container: one line of UTF-8 JSON
//   {"height","width","bins","channels":[...],"dtype":"f32","layout":"row-major","version":1}
// then the planes as raw little-endian float32 in header channel order.
inline constexpr int kStackFormatVersion = 1;

std::string stack_header(const GraspMapStack& stack);

void write_stack(std::ostream& out, const GraspMapStack& stack);
void write_stack(const std::filesystem::path& path, const GraspMapStack& stack);

/// Throws FormatError naming the offending header field.
GraspMapStack read_stack(std::istream& in);
GraspMapStack read_stack(const std::filesystem::path& path);

}  // namespace graspmaps
