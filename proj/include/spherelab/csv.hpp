#pragma once

#include <string>

#include "spherelab/matrix.hpp"

namespace spherelab {

// Shortest decimal form that round-trips a 64-bit float exactly ("%.17g").
std::string format_g17(double v);

// Strict full-string double parse; throws Error(ConfigInvalid) on junk.
double parse_double(const std::string& text, const std::string& what);

// Plain numeric CSV, no header, one matrix row per line, 17 significant
// digits so values survive a round trip bit for bit.
void write_matrix_csv(const std::string& path, const Matrix& m);
Matrix read_matrix_csv(const std::string& path);

std::string render_matrix_csv(const Matrix& m);
Matrix parse_matrix_csv(const std::string& text, const std::string& origin);

} // namespace spherelab
