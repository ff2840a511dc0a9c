#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace twocenter;
using namespace twocenter::test;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("twocenter-io-" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

io::ParameterRecord sample_record() {
  io::ParameterRecord r;
  r.label = label("3psu");
  r.R = 4.0;
  r.params = seed_params(r.label, 4.0);
  r.params.xi0 = 1.589;
  r.energy = 0.0097808999;
  r.p = 1.6;
  r.A = -1.25;
  r.rule_N = 64;
  r.git_rev = "abc123";
  return r;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("doubles print with 17 significant digits") {
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(io::format_double(-1.20526842899) == "-1.20526842899");
  CHECK(io::format_double(1e-300) == "1e-300");
  CHECK(io::format_double(2.0) == "2");
  CHECK(io::format_double(std::nan("")) == "nan");
  CHECK(io::format_double(-INFINITY) == "-inf");
  CHECK(std::stod(io::format_double(1.0 / 3)) == 1.0 / 3);
}

TEST_CASE("label names never need quoting") {
  CHECK(io::label_name(label("3dpg")) == "3dpg");
  CHECK(io::label_name(StateLabel{2, 1, 1, Parity::Minus}) == "2.1.1.-");
}

TEST_CASE("parameter record round trip and schema") {
  const auto r = sample_record();
  const auto j = io::to_json(r);
  CHECK(j["label"] == "3psu");
  CHECK(j["params"].contains("xi0"));
  CHECK(j["meta"]["rule_N"] == 64);
  const std::vector<std::string> keys{"label", "R", "params", "energy", "p", "A", "meta"};
  std::vector<std::string> got;
  for (auto it = j.begin(); it != j.end(); ++it) got.push_back(it.key());
  CHECK(got == keys);

  const auto dir = scratch_dir("record");
  const auto file = io::store_path(dir, r.label, r.R);
  io::write_record(file, r);
  const auto back = io::read_record(file);
  CHECK(back.label == r.label);
  CHECK(back.R == r.R);
  CHECK(back.params.alpha == r.params.alpha);
  CHECK(back.params.b3 == r.params.b3);
  CHECK(back.params.xi0 == r.params.xi0);
  CHECK(back.energy == r.energy);
  CHECK(back.git_rev == "abc123");
  fs::remove_all(dir);
}

TEST_CASE("store location follows the environment") {
  setenv("TWOCENTER_DATA_DIR", "/tmp/somewhere", 1);
  CHECK(io::data_dir() == fs::path("/tmp/somewhere"));
  unsetenv("TWOCENTER_DATA_DIR");
  CHECK(io::data_dir() == fs::path("twocenter-data"));
  CHECK(io::store_path("d", label("1ssg"), 2.5).string() == "d/1ssg_R2.5.json");
}

TEST_CASE("malformed records raise IOError") {
  const auto dir = scratch_dir("bad");
  io::write_text(dir / "a.json", "{not json");
  CHECK_THROWS_AS(io::read_record(dir / "a.json"), io::IOError);
  io::write_text(dir / "b.json", R"({"label":"1ssg","R":2})");
  CHECK_THROWS_AS(io::read_record(dir / "b.json"), io::IOError);
  io::write_text(dir / "c.json", R"({"label":"zzz"})");
  CHECK_THROWS_AS(io::read_record(dir / "c.json"), io::IOError);
  CHECK_THROWS_AS(io::read_record(dir / "missing.json"), io::IOError);
  CHECK_THROWS_AS(io::read_csv(dir / "missing.csv"), io::IOError);
  io::write_text(dir / "d.csv", "a,b\n1,2,3\n");
  CHECK_THROWS_AS(io::read_csv(dir / "d.csv"), io::IOError);
  fs::remove_all(dir);
}

TEST_CASE("grid parsing") {
  const auto g = io::parse_grid("1:2:0.1");
  REQUIRE(g.size() == 11);
  CHECK(g[3] == 1.3);
  CHECK(g.back() == 2.0);
  CHECK(io::parse_grid("2:2:1") == std::vector<double>{2.0});
  CHECK_THROWS_AS(io::parse_grid("1:2"), DomainError);
  CHECK_THROWS_AS(io::parse_grid("2:1:0.1"), DomainError);
  CHECK_THROWS_AS(io::parse_grid("1:2:0"), DomainError);
  CHECK_THROWS_AS(io::parse_grid("1:x:1"), DomainError);
  CHECK_THROWS_AS(io::parse_number("2.0abc", "R"), DomainError);
}

TEST_CASE("golden files parse and carry provenance") {
  for (const auto& name : io::dataset_names()) {
    const auto t = io::read_csv(golden_dir() / (name + ".csv"));
    CHECK(t.header == std::vector<std::string>{"state", "R", "quantity", "value", "source", "sign"});
    CHECK_FALSE(t.rows.empty());
    for (const auto& row : t.rows) {
      CHECK(label_from_name(row[0]));
      const double v = std::stod(row[3]);
      if (row[5] == "negative") CHECK(v < 0);
      if (row[5] == "positive") CHECK(v > 0);
      if (row[5] == "ambiguous") CHECK(v > 0);
      CHECK_FALSE(row[4].empty());
    }
    CHECK_FALSE(io::reference_grid(golden_dir(), name).empty());
  }
}

TEST_CASE("diff tolerance follows the printed digits") {
  CHECK(io::diff_tolerance("E", "-1.20526842899") == doctest::Approx(5e-9));
  CHECK(io::diff_tolerance("E", "-1.0002") == doctest::Approx(5e-5));
  CHECK(io::diff_tolerance("f", "0.460187135") == doctest::Approx(5e-6 * 0.460187135));
  CHECK(io::diff_tolerance("f", "1.67e-07") == doctest::Approx(5e-10));
}

TEST_CASE("datasets are identical for any worker count") {
  const std::vector<double> grid{2.0, 4.0};
  io::Workspace one(io::RunOptions{64, Precision::Standard, 1});
  io::Workspace four(io::RunOptions{64, Precision::Standard, 4});
  for (auto [name, row] : {std::pair{"sigma-u", "2psu,2,E,"}, {"e1", "2ppu,2,f,"}}) {
    std::ostringstream a, b;
    io::dataset_csv(io::compute_dataset(one, name, grid)).write(a);
    io::dataset_csv(io::compute_dataset(four, name, grid)).write(b);
    CHECK(a.str() == b.str());
    CHECK(a.str().find(row) != std::string::npos);
  }
}

}
