#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "maxp1/mesh_io.hpp"
#include "test_helpers.hpp"

using namespace maxp1;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("mesh text round-trip is bitwise faithful", "[mesh_io]") {
  const SimplicialMesh disk = build_disk_mesh(3);
  const auto path = temp_path("maxp1_roundtrip.mesh");
  save_mesh(disk, path.string());
  const SimplicialMesh loaded = load_mesh(path.string());

  REQUIRE(loaded.dim == disk.dim);
  REQUIRE(loaded.coords.size() == disk.coords.size());
  for (std::size_t i = 0; i < disk.coords.size(); ++i)
    CHECK(loaded.coords[i] == disk.coords[i]);  // exact, %.17g round-trips doubles
  CHECK(loaded.cells == disk.cells);
  CHECK(loaded.facets == disk.facets);
  CHECK(loaded.facet_parent == disk.facet_parent);

  // saving the loaded mesh reproduces the file byte for byte
  const auto path2 = temp_path("maxp1_roundtrip2.mesh");
  save_mesh(loaded, path2.string());
  CHECK(slurp(path) == slurp(path2));
  std::filesystem::remove(path);
  std::filesystem::remove(path2);
}

TEST_CASE("truncated mesh files error with the offending line", "[mesh_io]") {
  const SimplicialMesh disk = build_disk_mesh(1);
  const auto path = temp_path("maxp1_truncated.mesh");
  save_mesh(disk, path.string());

  // drop the last 10 lines
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  in.close();
  std::ofstream out(path);
  for (std::size_t i = 0; i + 10 < lines.size(); ++i) out << lines[i] << "\n";
  out.close();

  try {
    load_mesh(path.string());
    FAIL("expected MeshIoError");
  } catch (const MeshIoError& e) {
    const std::string what = e.what();
    CHECK(what.find("line " + std::to_string(lines.size() - 10 + 1)) != std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST_CASE("malformed cell line errors with its line number", "[mesh_io]") {
  const auto path = temp_path("maxp1_malformed.mesh");
  std::ofstream out(path);
  out << "2 3 1 3\n0 0\n1 0\n0 1\n0 1 oops\n0 1 0\n1 2 0\n2 0 0\n";
  out.close();
  try {
    load_mesh(path.string());
    FAIL("expected MeshIoError");
  } catch (const MeshIoError& e) {
    CHECK(std::string(e.what()).find("line 5") != std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST_CASE("vtk export carries the table counts", "[mesh_io]") {
  const SimplicialMesh disk = build_disk_mesh(1);
  NodalVectorField field(disk);
  const auto path = temp_path("maxp1_export.vtk");
  export_vtk(disk, &field, path.string());
  const std::string text = slurp(path);
  CHECK(text.find("POINTS 25 double") != std::string::npos);
  CHECK(text.find("CELLS 32 128") != std::string::npos);
  CHECK(text.find("CELL_TYPES 32") != std::string::npos);
  CHECK(text.find("VECTORS e double") != std::string::npos);
  std::filesystem::remove(path);
}
