#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "evadopt/model.hpp"

namespace evadopt::io {

using Row = std::vector<std::string>;

/// RFC 4180 reader: quoted fields, doubled quotes, CRLF or LF, UTF-8 BOM.
std::vector<Row> read_csv(std::istream& in);
std::vector<Row> read_csv(const std::filesystem::path& path);

/// Writes one CSV line; fields containing separators or quotes are quoted.
void write_csv_row(std::ostream& out, const Row& row);

/// Shortest round-trip text for a double (17 significant digits at most).
std::string format_double(double v);

nlohmann::json to_json(const Vector& v);
Vector vector_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
void write_text(const std::filesystem::path& path, const std::string& text);

/// n x n matrix as CSV with a header row of flat ids.
std::string matrix_csv(const Matrix& m);

/// 64-bit FNV-1a, used for content-addressed run directories.
std::uint64_t fnv1a(const std::string& text);

}  // namespace evadopt::io
