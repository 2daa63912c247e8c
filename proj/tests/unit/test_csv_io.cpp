#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fosr/csv_io.hpp"
#include "fosr/errors.hpp"
#include "fosr/simulation.hpp"

using namespace fosr;
namespace fs = std::filesystem;

TEST_CASE("doubles round-trip through text") {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 123456789.125, 0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("dataset round-trips through CSV") {
  const auto dir = fs::temp_directory_path() / "fosr_csv_roundtrip";
  fs::remove_all(dir);
  SimulationSpec spec;
  spec.seed = 4;
  const auto sim = make_design(spec);
  save_dataset(sim.data, dir);
  LoadOptions raw;
  raw.standardize = false;
  const FunctionalDataset back = load_dataset(dir / "Y.csv", dir / "W.csv", dir / "X.csv", raw);
  CHECK(back.Y == sim.data.Y);
  CHECK(back.X == sim.data.X);
  CHECK(back.W == sim.data.W);
  CHECK(back.grid == sim.data.grid);
  CHECK(back.cluster_names == sim.data.cluster_names);
  CHECK(back.free_names == sim.data.free_names);

  Standardization st;
  const FunctionalDataset z = load_dataset(dir / "Y.csv", dir / "W.csv", dir / "X.csv", LoadOptions{}, &st);
  CHECK(std::abs(z.X.col(3).mean()) < 1e-12);
  CHECK(z.W.col(0) == Eigen::VectorXd::Ones(z.W.rows()));
  CHECK(st.cluster_scale.size() == 15);
  fs::remove_all(dir);
}

TEST_CASE("schema errors name the problem") {
  const auto dir = fs::temp_directory_path() / "fosr_csv_schema";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "Y.csv") << "0,0.5,1\n1,2,3\n4,5,6\n";
  std::ofstream(dir / "X.csv") << "x1\n1\n2\n3\n";
  try {
    load_dataset(dir / "Y.csv", std::nullopt, dir / "X.csv", LoadOptions{});
    FAIL("expected a schema error");
  } catch (const SchemaError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("X.csv") != std::string::npos);
    CHECK(msg.find("3") != std::string::npos);
  }
  std::ofstream(dir / "Y.csv") << "0,1,0.5\n1,2,3\n";
  std::ofstream(dir / "X.csv") << "x1\n1\n";
  CHECK_THROWS_AS(load_dataset(dir / "Y.csv", std::nullopt, dir / "X.csv", LoadOptions{}), SchemaError);
  std::ofstream(dir / "Y.csv") << "0,1\n1,abc\n";
  CHECK_THROWS_AS(read_csv(dir / "Y.csv"), SchemaError);
  CHECK_THROWS_AS(read_csv(dir / "missing.csv"), SchemaError);
  fs::remove_all(dir);
}
