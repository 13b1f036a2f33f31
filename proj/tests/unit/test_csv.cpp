#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "bornres/csv.hpp"

using namespace bornres;

TEST_CASE("numbers round-trip through their text form", "[csv]") {
  for (double v : {0.0, -0.0, 1.0, 1.0 / 3.0, 3.110526827213918, -9.561455878319966e-4, 1e-300, 6.02e23,
                   std::numeric_limits<double>::denorm_min(), std::numeric_limits<double>::max()}) {
    CHECK(parse_number(format_number(v)) == v);
  }
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(42) == "42");
  CHECK(format_number(std::size_t{7}) == "7");
  CHECK_THROWS(parse_number("abc"));
  CHECK_THROWS(parse_number("1.5x"));
  CHECK(parse_number(" 2.5") == 2.5);
}

TEST_CASE("table write and read", "[csv]") {
  CsvTable t({"k", "value", "tag"});
  t.set_meta("tool", "bornres test");
  t.set_meta("lambda", 100.0);
  t.set_meta("lambda", 200.0);  // overwrite keeps one entry
  t.add_row({"1", "0.25", "short"});
  t.add_row(std::vector<std::string>{"2", "", "long"});
  t.set_footer("total", 0.25);
  const std::string text = t.to_string();
  CHECK(text ==
        "# tool: bornres test\n# lambda: 200\nk,value,tag\n1,0.25,short\n2,,long\n# total: 0.25\n");

  std::istringstream in(text);
  const auto back = CsvTable::read(in);
  CHECK(back.columns() == t.columns());
  CHECK(back.rows() == t.rows());
  CHECK(back.meta() == t.meta());
  CHECK(back.footer() == t.footer());
  CHECK(back.meta_value("lambda") == "200");
  CHECK(back.meta_value("total") == "0.25");
  CHECK(back.column("value") == std::vector<double>{0.25, 0.0});
  CHECK(back.column_index("tag") == 2);
  CHECK_THROWS_AS(back.column("missing"), std::out_of_range);
  CHECK_THROWS_AS(back.meta_value("missing"), std::out_of_range);
  CHECK(back.to_string() == text);
}

TEST_CASE("malformed tables are rejected", "[csv]") {
  CsvTable t({"a", "b"});
  CHECK_THROWS_AS(t.add_row({"1"}), std::invalid_argument);
  std::istringstream header_only("# only: meta\n");
  CHECK_THROWS(CsvTable::read(header_only));
  std::istringstream ragged("a,b\n1,2,3\n");
  CHECK_THROWS(CsvTable::read(ragged));
  std::istringstream crlf("a,b\r\n1,2\r\n");
  const auto parsed = CsvTable::read(crlf);
  CHECK(parsed.column("b") == std::vector<double>{2.0});
}

TEST_CASE("numeric rows are written deterministically", "[csv]") {
  auto build = [] {
    CsvTable t({"x", "y"});
    for (int i = 0; i < 100; ++i) t.add_row(std::vector<double>{i * 0.1, std::sin(i * 0.1)});
    return t.to_string();
  };
  CHECK(build() == build());
}

TEST_CASE("atomic file write", "[csv]") {
  const auto dir = std::filesystem::temp_directory_path() / "bornres_csv_test";
  std::filesystem::remove_all(dir);
  const auto path = dir / "nested" / "table.csv";
  write_file_atomically(path, "a,b\n1,2\n");
  write_file_atomically(path, "a,b\n3,4\n");
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == "a,b\n3,4\n");
  CHECK_FALSE(std::filesystem::exists(dir / "nested" / "table.csv.tmp"));
  std::filesystem::remove_all(dir);
}
