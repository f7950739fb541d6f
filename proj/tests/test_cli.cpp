#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace {

struct result {
  int code;
  std::string out, err;
};

result run(std::vector<std::string> args) {
  args.insert(args.begin(), "shimura");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = shimura::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const std::string kDb = std::string(SHIMURA_TEST_DATA) + "/ecdb_test.csv";

}  // namespace

TEST_CASE("cli genus") {
  auto r = run({"genus", "-D", "6", "-N", "1"});
  CHECK(r.code == 0);
  CHECK(r.out == "0\n");
  CHECK(run({"genus", "-D", "51", "-N", "2", "-W", "51"}).out == "2\n");
  CHECK(run({"genus", "-D", "6", "-N", "1", "--json"}).out == "{\"D\":6,\"N\":1,\"W\":[],\"genus\":0}\n");
}

TEST_CASE("cli usage errors exit 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"genus", "-N", "1"}).code == 2);
  CHECK(run({"genus", "-D", "7"}).code == 2);
  CHECK(run({"genus", "-D", "6", "-N", "3"}).code == 2);
  CHECK(run({"genus", "-D", "6", "-W", "4"}).code == 2);
  CHECK(run({"genus", "-D", "six"}).code == 2);
  CHECK(run({"kodaira", "-D", "51", "-N", "2", "-W", "51"}).code == 2);  // genus 2
  CHECK(run({"local-points", "-D", "15", "-N", "7", "-p", "7"}).code == 2);
  CHECK(run({"genus", "-D", "6", "--json", "--csv"}).code == 2);
  CHECK(run({"resolve-class", "-D", "15", "-N", "7", "-W", "3", "--class", "105a", "--ecdb", "/nonexistent.csv"}).code == 2);
}

TEST_CASE("cli computational failures exit 1") {
  auto r = run({"twist-quartics", "--curve", "1,2", "--twist", "-4", "--point", "0,1"});
  CHECK(r.code == 1);
  CHECK(r.err.find("error") == 0);
  CHECK(run({"resolve-class", "-D", "15", "-N", "7", "-W", "3", "--class", "21a", "--ecdb", kDb}).code == 1);
}

TEST_CASE("cli kodaira") {
  auto r = run({"kodaira", "-D", "210", "-N", "11", "-W", "2,5,7,33"});
  CHECK(r.code == 0);
  CHECK(r.out == "p=2 I4\np=3 I2\np=5 I2\np=7 I4\n");
  auto c = run({"kodaira", "-D", "15", "-N", "7", "-W", "3", "-p", "5", "--csv"});
  CHECK(c.out == "p,n\n5,2\n");
}

TEST_CASE("cli local points, fixed points, graphs") {
  CHECK(run({"local-points", "-D", "21", "-N", "5", "-W", "3,5"}).out == "p=3 true\np=7 false\n");
  CHECK(run({"fixed-points", "-D", "6", "-N", "1"}).out == "w2 2\nw3 2\nw6 2\n");
  auto d = run({"dual-graph", "-D", "15", "-N", "7", "-p", "3", "--stage", "base", "--dot"});
  CHECK(d.code == 0);
  CHECK(d.out.find("graph") != std::string::npos);
  auto t = run({"dual-graph", "-D", "51", "-N", "2", "-p", "17", "--stage", "base"});
  CHECK(t.out.rfind("vertices 2\nedges 10\n", 0) == 0);
  CHECK(run({"dual-graph", "-D", "15", "-N", "7", "-p", "3", "--stage", "bogus"}).code == 2);
}

TEST_CASE("cli equations") {
  auto t = run({"twist-quartics", "--curve", "1,0,0,-784,-8515", "--twist", "-4", "--point", "2364,3024", "--point",
                "3624,-117936"});
  CHECK(t.code == 0);
  CHECK(t.out ==
        "y^2 = -4x^4 + 56736x^2 - 96768x - 193057344\n"
        "y^2 = -4x^4 + 86976x^2 + 3773952x - 102518784\n");
  auto b = run({"bielliptic", "--e1", "1,0,0,-34,68", "--e2", "1,1,0,-2,0"});
  CHECK(b.code == 0);
  CHECK(b.out.find("y^2 = -216x^6 + 225x^4 + 126x^2 + 9\n") != std::string::npos);
}

TEST_CASE("cli resolve-class") {
  auto r = run({"resolve-class", "-D", "15", "-N", "7", "-W", "3", "--class", "105a", "--ecdb", kDb});
  CHECK(r.code == 0);
  CHECK(r.out == "105a2\n");
  setenv("SHIMURA_ECDB", kDb.c_str(), 1);
  auto a = run({"resolve-class", "-D", "6", "-N", "17", "-W", "2,3", "--class", "102b", "--json"});
  unsetenv("SHIMURA_ECDB");
  CHECK(a.out == "{\"class\":\"102b\",\"symbols\":{\"2\":1,\"3\":2},\"unique\":false,\"labels\":[\"102b5\",\"102b6\"]}\n");
  CHECK(run({"resolve-class", "-D", "6", "-N", "17", "-W", "2,3", "--class", "102b"}).code == 2);
}

TEST_CASE("cli enumerate is deterministic and resumable") {
  std::vector<std::string> base{"enumerate", "--bound", "200000", "--max-genus", "2"};
  auto one = run(base);
  auto more = base;
  more.insert(more.end(), {"--jobs", "3"});
  auto three = run(more);
  CHECK(one.code == 0);
  CHECK(one.out == three.out);
  auto counts = run({"enumerate", "--bound", "200000", "--count-only"});
  CHECK(counts.out ==
        "genus 0: 779 records, 271 star levels\n"
        "genus 1: 1352 records, 276 star levels\n"
        "genus 2: 1580 records, 289 star levels\n");

  auto dir = std::filesystem::temp_directory_path() / "shimura_cli_resume";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  auto ck = (dir / "ck.json").string();
  auto withck = base;
  withck.insert(withck.end(), {"--resume", ck});
  auto first = run(withck);
  CHECK(first.out == one.out);
  // second run has nothing left to scan and replays the stored rows
  auto second = run(withck);
  CHECK(second.out == one.out);
  auto other = run({"enumerate", "--bound", "1000", "--resume", ck});
  CHECK(other.code == 2);
  std::filesystem::remove_all(dir);
}
