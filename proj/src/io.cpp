#include "boltzspec/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace boltzspec {

std::string format_double(double x) {
  if (!std::isfinite(x)) throw NumericalError("refusing to serialize a non-finite number");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  // keep JSON readers from taking integral values for integers
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

namespace {

void dump_rec(const Json& j, int indent, int level, const std::string& path, std::string& out) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (level + 1)), ' ') : "";
  const std::string pad_end = indent > 0 ? std::string(static_cast<std::size_t>(indent * level), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += std::string(",") + nl;
        first = false;
        out += pad + Json(it.key()).dump() + (indent > 0 ? ": " : ":");
        dump_rec(it.value(), indent, level + 1, path + "/" + it.key(), out);
      }
      out += nl + pad_end + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[";
      out += nl;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += std::string(",") + nl;
        out += pad;
        dump_rec(j[i], indent, level + 1, path + "/" + std::to_string(i), out);
      }
      out += nl + pad_end + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      if (!std::isfinite(x)) throw NumericalError("non-finite number in JSON output at " + path);
      out += format_double(x);
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  dump_rec(j, indent, 0, "", out);
  out += "\n";
  return out;
}

Json complex_json(cplx z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

Json complex_list(const CVector& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(complex_json(v(i)));
  return a;
}

Json basis_spec_json(const BasisSpec& spec) {
  Json j{{"d", spec.dim}, {"N", spec.max_degree}};
  if (spec.weight.kind == WeightKind::Gaussian) {
    j["weight"] = "gaussian";
  } else {
    j["weight"] = "polynomial";
    j["k"] = spec.weight.k;
    j["p"] = spec.weight.p;
  }
  return j;
}

BasisSpec basis_spec_from_json(const Json& j) {
  try {
    BasisSpec s;
    s.dim = j.at("d").get<int>();
    s.max_degree = j.at("N").get<int>();
    const std::string w = j.value("weight", std::string("gaussian"));
    if (w == "gaussian") {
      s.weight = Weight::gaussian();
    } else if (w == "polynomial") {
      s.weight = Weight::polynomial(j.at("k").get<double>(), j.value("p", 0));
    } else {
      throw ConfigError("unknown weight tag '" + w + "'");
    }
    s.validate();
    return s;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed basis spec: ") + e.what());
  }
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size()) throw ConfigError("CSV row width does not match the header");
  rows_.push_back(cells);
}

std::string CsvTable::str() const {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& c) {
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
    os << "\n";
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write " + path.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw ConfigError("short write to " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read " + path.string());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::uint64_t fnv1a64(const std::string& bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

template <class T>
void put(std::string& s, T x) {
  char b[sizeof(T)];
  std::memcpy(b, &x, sizeof(T));
  s.append(b, sizeof(T));
}

template <class T>
bool get(const std::string& s, std::size_t& pos, T& x) {
  if (pos + sizeof(T) > s.size()) return false;
  std::memcpy(&x, s.data() + pos, sizeof(T));
  pos += sizeof(T);
  return true;
}

}  // namespace

std::string matrix_blob(const CMatrix& m) {
  std::string s = "BZSM";
  put<std::uint32_t>(s, 1);
  put<std::uint64_t>(s, static_cast<std::uint64_t>(m.rows()));
  put<std::uint64_t>(s, static_cast<std::uint64_t>(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      put<double>(s, m(i, j).real());
      put<double>(s, m(i, j).imag());
    }
  return s;
}

std::optional<CMatrix> parse_matrix_blob(const std::string& bytes) {
  if (bytes.size() < 24 || bytes.compare(0, 4, "BZSM") != 0) return std::nullopt;
  std::size_t pos = 4;
  std::uint32_t version = 0;
  std::uint64_t rows = 0, cols = 0;
  if (!get(bytes, pos, version) || version != 1 || !get(bytes, pos, rows) || !get(bytes, pos, cols))
    return std::nullopt;
  if (rows > 100000 || cols > 100000 || bytes.size() != pos + rows * cols * 16) return std::nullopt;
  CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      double re = 0.0, im = 0.0;
      get(bytes, pos, re);
      get(bytes, pos, im);
      if (!std::isfinite(re) || !std::isfinite(im)) return std::nullopt;
      m(i, j) = cplx(re, im);
    }
  return m;
}

Json sidecar_json(const Json& key, const OperatorMatrix& m, const std::string& blob) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["key"] = key;
  j["basis"] = basis_spec_json(m.basis);
  j["basis_hash"] = hex64(fnv1a64(dump_json(basis_spec_json(m.basis), 0)));
  j["content_hash"] = hex64(fnv1a64(blob));
  j["rows"] = m.values.rows();
  j["cols"] = m.values.cols();
  j["inner_product"] = m.tag == InnerProductTag::Gaussian ? "gaussian" : "polynomial";
  j["method"] = m.info.method;
  j["quad_order"] = m.info.quad_order;
  j["sphere_order"] = m.info.sphere_order;
  j["radial_order"] = m.info.radial_order;
  j["cutoff_radius"] = m.info.cutoff_radius;
  j["cutoff_width"] = m.info.cutoff_width;
  j["wall_seconds"] = m.info.wall_seconds;
  return j;
}

MatrixCache::MatrixCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string MatrixCache::key_hash(const Json& key) { return hex64(fnv1a64(dump_json(key, 0))); }

std::filesystem::path MatrixCache::blob_path(const Json& key) const { return dir_ / (key_hash(key) + ".bin"); }
std::filesystem::path MatrixCache::sidecar_path(const Json& key) const { return dir_ / (key_hash(key) + ".json"); }

CacheLookup MatrixCache::load(const Json& key) const {
  CacheLookup out;
  const auto bin = blob_path(key), side = sidecar_path(key);
  if (!std::filesystem::exists(bin) || !std::filesystem::exists(side)) {
    out.status = "miss";
    return out;
  }
  try {
    const Json meta = Json::parse(read_file(side));
    if (meta.at("key") != key) {
      out.status = "corrupt: key mismatch";
      return out;
    }
    const std::string blob = read_file(bin);
    if (meta.at("content_hash").get<std::string>() != hex64(fnv1a64(blob))) {
      out.status = "corrupt: content hash mismatch";
      return out;
    }
    auto m = parse_matrix_blob(blob);
    if (!m || m->rows() != meta.at("rows").get<long>() || m->cols() != meta.at("cols").get<long>()) {
      out.status = "corrupt: unreadable blob";
      return out;
    }
    OperatorMatrix op;
    op.values = *m;
    op.basis = basis_spec_from_json(meta.at("basis"));
    op.tag = meta.at("inner_product") == "gaussian" ? InnerProductTag::Gaussian : InnerProductTag::Polynomial;
    op.info.method = meta.at("method").get<std::string>();
    op.info.quad_order = meta.at("quad_order").get<int>();
    op.info.sphere_order = meta.at("sphere_order").get<int>();
    op.info.radial_order = meta.at("radial_order").get<int>();
    op.info.cutoff_radius = meta.at("cutoff_radius").get<double>();
    op.info.cutoff_width = meta.at("cutoff_width").get<double>();
    op.info.wall_seconds = meta.at("wall_seconds").get<double>();
    if (op.values.rows() != op.basis.size()) {
      out.status = "corrupt: size does not match the basis";
      return out;
    }
    out.matrix = std::move(op);
    out.status = "hit";
  } catch (const std::exception& e) {
    out.status = std::string("corrupt: ") + e.what();
  }
  return out;
}

void MatrixCache::store(const Json& key, const OperatorMatrix& m) const {
  const std::string blob = matrix_blob(m.values);
  write_file(blob_path(key), blob);
  write_file(sidecar_path(key), dump_json(sidecar_json(key, m, blob)));
}

}  // namespace boltzspec
