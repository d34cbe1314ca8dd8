#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>

#include "boltzspec/collision_operator.hpp"
#include "boltzspec/config.hpp"

using namespace boltzspec;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("boltzspec_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("doubles round-trip with 17 significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1.0");
  CHECK(format_double(-3.0) == "-3.0");
  CHECK(format_double(1e300) == "1.0000000000000001e+300");
  for (double x : {0.1, 1.0 / 3.0, -2.718281828459045, 6.02214076e23, 5e-324}) CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  CHECK_THROWS_AS(format_double(std::nan("")), NumericalError);
  CHECK_THROWS_AS(format_double(std::numeric_limits<double>::infinity()), NumericalError);
}

TEST_CASE("JSON output") {
  Json j{{"b", 0.5}, {"a", Json::array({1, 2.0, "x"})}, {"c", Json{{"re", 1.0}, {"im", -0.0}}}};
  const std::string s = dump_json(j, 0);
  // Keys keep insertion order, integers stay integers.
  CHECK(s == R"({"b":0.5,"a":[1,2.0,"x"],"c":{"re":1.0,"im":-0.0}})" "\n");
  CHECK(Json::parse(s)["a"][1].get<double>() == 2.0);

  Json bad{{"outer", Json{{"inner", Json::array({1.0, std::nan("")})}}}};
  try {
    dump_json(bad);
    FAIL("expected an error");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("outer") != std::string::npos);
  }

  BasisSpec spec{2, 5, Weight::polynomial(6.0, 8)};
  BasisSpec back = basis_spec_from_json(basis_spec_json(spec));
  CHECK(back.dim == 2);
  CHECK(back.max_degree == 5);
  CHECK(back.weight.kind == spec.weight.kind);
  CHECK(back.weight.k == 6.0);
  CHECK(back.weight.p == 8);
  CHECK_THROWS_AS(basis_spec_from_json(Json{{"d", 3}}), ConfigError);
}

TEST_CASE("CSV tables") {
  CsvTable t({"r", "branch", "re"});
  t.add_row({CsvTable::cell(0.1), "-1", CsvTable::cell(-2.0)});
  CHECK(t.str() == "r,branch,re\n0.10000000000000001,-1,-2.0\n");
  CHECK_THROWS_AS(t.add_row({"1"}), ConfigError);
}

TEST_CASE("matrix blobs") {
  CMatrix m(2, 3);
  m << cplx(1, 2), cplx(0.1, 0), cplx(-3, 1e-300), cplx(0, 0), cplx(5, -5), cplx(7, 0.25);
  const std::string blob = matrix_blob(m);
  CHECK(blob.size() == 4 + 4 + 16 + 16 * 6);
  auto back = parse_matrix_blob(blob);
  REQUIRE(back.has_value());
  CHECK(*back == m);
  CHECK_FALSE(parse_matrix_blob(blob.substr(0, blob.size() - 1)).has_value());
  std::string bad = blob;
  bad[0] = 'X';
  CHECK_FALSE(parse_matrix_blob(bad).has_value());
  CHECK(fnv1a64("") == 14695981039346656037ull);
  CHECK(hex64(fnv1a64("a")) == "af63dc4c8601ec8c");
}

TEST_CASE("matrix cache: miss, hit, corruption") {
  const fs::path dir = scratch_dir("cache");
  MatrixCache cache(dir);
  OrthonormalBasis basis = build_basis(BasisSpec{2, 3, Weight::gaussian()});
  OperatorMatrix L = assemble_L(basis, default_quad_order(3));
  Json key{{"operator", "L"}, {"basis", basis_spec_json(basis.spec())}, {"quad_order", default_quad_order(3)}};

  CacheLookup first = cache.load(key);
  CHECK(first.status == "miss");
  CHECK_FALSE(first.matrix.has_value());
  cache.store(key, L);
  CacheLookup hit = cache.load(key);
  CHECK(hit.status == "hit");
  REQUIRE(hit.matrix.has_value());
  CHECK(hit.matrix->values == L.values);
  const std::string bytes = read_file(cache.blob_path(key));

  // A different key misses.
  Json other = key;
  other["quad_order"] = default_quad_order(3) + 1;
  CHECK(cache.load(other).status == "miss");

  // Flipped payload byte: the content hash no longer matches.
  std::string flipped = bytes;
  flipped[flipped.size() - 3] ^= 0x5a;
  write_file(cache.blob_path(key), flipped);
  CacheLookup c1 = cache.load(key);
  CHECK(c1.status.rfind("corrupt", 0) == 0);
  CHECK_FALSE(c1.matrix.has_value());

  // Truncated blob.
  write_file(cache.blob_path(key), bytes.substr(0, 10));
  CHECK(cache.load(key).status.rfind("corrupt", 0) == 0);

  // Damaged sidecar.
  write_file(cache.blob_path(key), bytes);
  const std::string side = read_file(cache.sidecar_path(key));
  write_file(cache.sidecar_path(key), side.substr(0, side.size() / 2));
  CHECK(cache.load(key).status.rfind("corrupt", 0) == 0);

  // Storing again repairs the entry with identical bytes.
  cache.store(key, L);
  CHECK(cache.load(key).status == "hit");
  CHECK(read_file(cache.blob_path(key)) == bytes);
  fs::remove_all(dir);
}

TEST_CASE("grid and list parsing") {
  std::vector<double> g = parse_grid("0:1:5");
  REQUIRE(g.size() == 5);
  CHECK(g[2] == 0.5);
  CHECK(g.back() == 1.0);
  CHECK(parse_grid("0.3:0.3:1") == std::vector<double>{0.3});
  CHECK(parse_list("1,0,-2.5") == std::vector<double>{1.0, 0.0, -2.5});
  CHECK_THROWS_AS(parse_grid("0:1"), ConfigError);
  CHECK_THROWS_AS(parse_grid("1:0:3"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0:1:2.5"), ConfigError);
  CHECK_THROWS_AS(parse_list("1,x"), ConfigError);
  CHECK_THROWS_AS(parse_list("1,,2"), ConfigError);
  CHECK_THROWS_AS(parse_list("nan"), ConfigError);
}

TEST_CASE("run configuration") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.effective_quad_order() == default_quad_order(c.degree));
  CHECK(c.effective_poly_degree() == c.degree + 2);
  CHECK(c.unit_direction() == RVector::Unit(3, 0));

  RunConfig j = RunConfig::from_json(Json::parse(R"({"dim": 2, "degree": 4, "k": 7.5, "direction": [3, 4],
                                                     "r_grid": "0.01:0.2:4", "seed": 9})"));
  CHECK(j.dim == 2);
  CHECK(j.weight_k == 7.5);
  CHECK(j.r_grid.size() == 4);
  CHECK(std::abs(j.unit_direction()(1) - 0.8) < 1e-15);
  RunConfig round = RunConfig::from_json(j.to_json());
  CHECK(dump_json(round.to_json()) == dump_json(j.to_json()));

  CHECK_THROWS_AS(RunConfig::from_json(Json::parse(R"({"dimension": 3})")), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json(Json::parse(R"({"dim": "three"})")), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json(Json::parse("[1]")), ConfigError);

  auto invalid = [](auto mutate) {
    RunConfig r;
    mutate(r);
    return r;
  };
  CHECK_THROWS_AS(invalid([](RunConfig& r) { r.dim = 4; }).validate(), ConfigError);
  CHECK_THROWS_AS(invalid([](RunConfig& r) { r.quad_order = 3; }).validate(), ConfigError);
  CHECK_THROWS_AS(invalid([](RunConfig& r) { r.weight_k = 4.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(invalid([](RunConfig& r) { r.direction = {1.0, 0.0}; }).validate(), ConfigError);
  CHECK_THROWS_AS(invalid([](RunConfig& r) { r.r_grid = {0.0, 0.1}; }).validate(), ConfigError);
  CHECK_THROWS_AS(invalid([](RunConfig& r) { r.threads = 0; }).validate(), ConfigError);
}

TEST_CASE("threshold resolution") {
  RunConfig c;
  Thresholds t = resolve_thresholds(c, 14.0, 20.0);
  CHECK(t.a == 7.0);
  CHECK(t.contour_radius == 3.5);
  c.a = 10.0;
  CHECK(resolve_thresholds(c, 14.0, 20.0).a == 10.0);
  c.a = 15.0;
  CHECK_THROWS_AS(resolve_thresholds(c, 14.0, 20.0), ConfigError);
  c.a = 0.0;
  CHECK_THROWS_AS(resolve_thresholds(c, 0.0, 20.0), NumericalError);
}
