#pragma once

#include "sqg/fields.hpp"

#include <filesystem>
#include <string>

namespace sqg {

struct FieldDump {
    PhysicalField field;
    double t;
    double alpha;
};

/// Text dump: header `SQGFIELD v1 n=<int> L=<float> t=<float> alpha=<float>`,
/// then n^2 values in %.17g, row-major (x2 outer, x1 inner). Written to a
/// temporary file and renamed into place.
void dump_field(const PhysicalField& field, double t, double alpha, const std::filesystem::path& path);
std::string format_field(const PhysicalField& field, double t, double alpha);

/// Throws FormatError (with byte offset) on a malformed header or payload.
FieldDump parse_field(const std::string& text);
FieldDump load_field_dump(const std::filesystem::path& path);
PhysicalField load_field(const std::filesystem::path& path);

/// Writes text to path atomically (temp file in the same directory, then rename).
void write_atomically(const std::filesystem::path& path, const std::string& text);

}  // namespace sqg
