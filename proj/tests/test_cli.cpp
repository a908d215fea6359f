#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmdvar/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "mmdvar");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = mmdvar::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path write_file(const std::string& name, const std::string& body) {
  const fs::path p = fs::temp_directory_path() / ("mmdvar_cli_" + name);
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST_CASE("estimate with both paths") {
  const auto x = write_file("x.csv", "0.1\n1.3\n-0.4\n2.2\n0.9\n");
  const auto y = write_file("y.csv", "1.1\n2.5\n0.4\n3.0\n1.9\n2.0\n");
  const Outcome fast = invoke({"estimate", "--x", x, "--y", y, "--sigma", "1", "--path", "fast"});
  const Outcome full = invoke({"estimate", "--x", x, "--y", y, "--sigma", "1", "--path", "matrix"});
  REQUIRE(fast.code == 0);
  REQUIRE(full.code == 0);
  const auto a = nlohmann::json::parse(fast.out), b = nlohmann::json::parse(full.out);
  CHECK(a["path"] == "fast");
  CHECK(b["path"] == "matrix");
  CHECK(a["n"] == 5);
  CHECK(a["m"] == 6);
  CHECK(a["family"] == "laplacian");
  for (const char* key : {"mmd2", "var_t1", "var_t2", "var_total"}) {
    CHECK(a[key].get<double>() == doctest::Approx(b[key].get<double>()).epsilon(1e-9));
  }

  // Repeated invocations are byte-identical.
  CHECK(invoke({"estimate", "--x", x, "--y", y, "--sigma", "1", "--path", "fast"}).out == fast.out);

  const Outcome csv = invoke({"estimate", "--x", x, "--y", y, "--format", "csv", "--kernel", "gaussian"});
  REQUIRE(csv.code == 0);
  CHECK(csv.out.rfind("n,m,sigma,family,path,mmd2,var_t1,var_t2,var_total\n5,6,", 0) == 0);
  CHECK(csv.out.find(",gaussian,matrix,") != std::string::npos);
}

TEST_CASE("estimate small samples and the median bandwidth") {
  const auto x = write_file("x2.csv", "0\n1\n");
  const auto y = write_file("y2.csv", "2\n3\n");
  const Outcome refused = invoke({"estimate", "--x", x, "--y", y, "--sigma", "1"});
  CHECK(refused.code == 2);
  CHECK(refused.out.empty());
  const auto diag = nlohmann::json::parse(refused.err);
  CHECK(diag["error"] == "insufficient_sample_for_variance");
  CHECK(diag["exit_code"] == 2);

  const Outcome mean = invoke({"estimate", "--x", x, "--y", y, "--sigma", "1", "--mean-only"});
  REQUIRE(mean.code == 0);
  const auto j = nlohmann::json::parse(mean.out);
  CHECK(j["mmd2"].get<double>() == doctest::Approx(0.3915903443366188).epsilon(1e-14));
  CHECK(j["var_total"].is_null());

  const auto a = write_file("a.csv", "0\n0\n");
  const auto b = write_file("b.csv", "2\n2\n");
  const Outcome med = invoke({"estimate", "--x", a, "--y", b, "--mean-only"});
  REQUIRE(med.code == 0);
  CHECK(nlohmann::json::parse(med.out)["sigma"] == 2.0);
}

TEST_CASE("estimate error paths") {
  const auto x = write_file("x3.csv", "0\n1\n2\n3\n");
  const auto ragged = write_file("ragged.csv", "0,1\n2\n");
  const Outcome bad = invoke({"estimate", "--x", ragged, "--y", x});
  CHECK(bad.code == 3);
  CHECK(bad.err.find("line 2") != std::string::npos);

  CHECK(invoke({"estimate", "--x", x}).code == 4);
  CHECK(invoke({"estimate", "--x", x, "--y", x, "--sigma", "abc"}).code == 4);
  CHECK(invoke({"estimate", "--x", x, "--y", x, "--sigma", "-1"}).code == 2);
  CHECK(invoke({"estimate", "--x", x, "--y", x, "--kernel", "gaussian", "--path", "fast"}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 4);
  CHECK(invoke({}).code == 4);

  const Outcome help = invoke({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("estimate") != std::string::npos);
}

TEST_CASE("accumulator dump") {
  const auto x = write_file("x4.csv", "0\n2\n1\n3\n");
  const fs::path dump = fs::temp_directory_path() / "mmdvar_cli_dump.txt";
  REQUIRE(invoke({"estimate", "--x", x, "--y", x, "--sigma", "1", "--dump-accumulators", dump}).code == 0);
  std::ifstream in(dump);
  std::string first;
  std::getline(in, first);
  CHECK(first == "# X within");
}

TEST_CASE("sweep and bench") {
  const Outcome sw = invoke({"sweep", "--n", "12", "--deltas", "0,1", "--replicates", "100", "--format", "csv"});
  REQUIRE(sw.code == 0);
  CHECK(std::count(sw.out.begin(), sw.out.end(), '\n') == 3);
  CHECK(invoke({"sweep", "--n", "12", "--deltas", "0,1", "--replicates", "100", "--format", "csv"}).out == sw.out);
  CHECK(invoke({"sweep", "--n", "2", "--deltas", "0"}).code == 4);

  const Outcome bn = invoke({"bench", "--sizes", "100,200", "--paths", "fast", "--runs", "2"});
  REQUIRE(bn.code == 0);
  CHECK(nlohmann::json::parse(bn.out).size() == 2);
}

TEST_CASE("selftest") {
  const auto start = std::chrono::steady_clock::now();
  const Outcome ok = invoke({"selftest", "--quick"});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(ok.code == 0);
  CHECK(secs < 10.0);
  CHECK(ok.out.find("FAIL") == std::string::npos);

  const Outcome broken = invoke({"selftest", "--quick", "--inject-fault", "half-bandwidth"});
  CHECK(broken.code == 1);
  const auto line = broken.out.find("squared-kernel");
  REQUIRE(line != std::string::npos);
  CHECK(broken.out.substr(line, broken.out.find('\n', line) - line).find("FAIL") != std::string::npos);
}
