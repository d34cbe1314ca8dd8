#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "boltzspec/collision_operator.hpp"

namespace boltzspec {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// printf("%.17g"), with ".0" appended to integral values; NaN and infinities are rejected.
std::string format_double(double x);

// JSON text with every floating-point number printed by format_double. Throws
// NumericalError naming the offending path when a value is not finite.
std::string dump_json(const Json& j, int indent = 2);

Json complex_json(cplx z);
Json complex_list(const CVector& v);
Json basis_spec_json(const BasisSpec& spec);
BasisSpec basis_spec_from_json(const Json& j);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(const std::vector<std::string>& cells);
  std::string str() const;

  static std::string cell(double x) { return format_double(x); }
  static std::string cell(int x) { return std::to_string(x); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Writes through a temporary file and a rename so readers never see partial output.
void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

std::uint64_t fnv1a64(const std::string& bytes, std::uint64_t seed = 14695981039346656037ull);
std::string hex64(std::uint64_t h);

// Binary layout: "BZSM", uint32 version, uint64 rows, uint64 cols, then the entries
// as (re, im) pairs of little-endian doubles in row-major order.
std::string matrix_blob(const CMatrix& m);
std::optional<CMatrix> parse_matrix_blob(const std::string& bytes);

struct CacheLookup {
  std::optional<OperatorMatrix> matrix;
  std::string status;  // "hit", "miss" or "corrupt: <reason>"
};

// Content-addressed cache of assembled matrices: <hash>.bin plus a <hash>.json sidecar
// holding the key, the blob hash, shape and assembly metadata.
class MatrixCache {
 public:
  explicit MatrixCache(std::filesystem::path dir);

  static std::string key_hash(const Json& key);
  CacheLookup load(const Json& key) const;
  void store(const Json& key, const OperatorMatrix& m) const;

  std::filesystem::path blob_path(const Json& key) const;
  std::filesystem::path sidecar_path(const Json& key) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

Json sidecar_json(const Json& key, const OperatorMatrix& m, const std::string& blob);

}  // namespace boltzspec
