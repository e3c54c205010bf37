#pragma once

// Samples as CSV: a header row naming coordinate columns (x1..xd by
// convention) and an optional `weight` column; absent weights mean a
// uniform law. Comma separator, '.' decimal point, LF line endings.

#include <iosfwd>
#include <string>

#include "tscatter/model.hpp"

namespace tscatter {

/// Weights that do not sum to one within 1e-12 are normalized.
/// Throws Error with a line number on malformed input.
Sample read_csv(std::istream& in);
Sample read_csv_file(const std::string& path);

/// Writes 17 significant digits so read_csv(write_csv(s)) == s.
void write_csv(std::ostream& out, const Sample& s);

}  // namespace tscatter
