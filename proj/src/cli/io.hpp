#pragma once

#include <string>
#include <vector>

#include "locdens/types.hpp"

namespace locdens::cli {

//! Reads n rows of d numeric columns; an optional non-numeric first line is
//! taken as a header. Throws ParseError with the offending line number.
Dataset ingest_csv(const std::string& path);
Dataset parse_csv(const std::string& text);

//! Shortest round-trip representation.
std::string format_double(double v);

void write_csv(const std::string& path, const Dataset& data);
void write_text(const std::string& path, const std::string& text);

//! Query points from "grid:lo:hi:m[,lo:hi:m...]", "file:path" or
//! "point:x1,x2[;x1,x2...]".
RowMat parse_queries(const std::string& spec, int d);

//! "0.5,0.3" -> vector.
Vec parse_vector(const std::string& text);

//! "1e3:1e6" (decades) or "1000,5000,20000".
std::vector<std::int64_t> parse_sizes(const std::string& text);

//! "n^{-1/10}" -> d + offset = 10.
int parse_rate_denominator(const std::string& rule);

}  // namespace locdens::cli
