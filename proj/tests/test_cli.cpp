#include "lowdisc/cli.hpp"

#include "doctest.h"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using lowdisc::cli::run;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  return out;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("lowdisc_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

nlohmann::json last_failure(const std::string& err) {
  const auto ls = lines(err);
  REQUIRE_FALSE(ls.empty());
  return nlohmann::json::parse(ls.back());
}

}  // namespace

TEST_CASE("dist") {
  const auto r = call({"dist", "--q", "2", "--j", "4"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 6);
  CHECK(ls[0] == "q,j,k,count,gaussian_main");
  const std::vector<std::string> counts{"1", "4", "6", "4", "1"};
  for (std::size_t k = 0; k < 5; ++k) CHECK(fields(ls[k + 1])[3] == counts[k]);
}

TEST_CASE("disc") {
  const auto r = call({"disc", "--spec", "vdc:2", "--N", "4", "--mode", "extreme"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 2);
  CHECK(ls[0].rfind("N,value_num,value_den,method,witness", 0) == 0);
  const auto f = fields(ls[1]);
  CHECK(f[0] == "4");
  CHECK(f[1] == "1");
  CHECK(f[2] == "4");
  CHECK(f[3] == "exact-1d");
  const auto grid = call({"disc", "--spec", "halton:2,3", "--N", "9"});
  CHECK(fields(lines(grid.out)[1])[1] == "11");
  CHECK(fields(lines(grid.out)[1])[2] == "36");
  const auto star = call({"disc", "--spec", "vdc:2", "--N", "1:4", "--mode", "star"});
  CHECK(lines(star.out).size() == 5);
  CHECK(fields(lines(star.out)[4])[3] == "star-only");
}

TEST_CASE("other subcommands run") {
  CHECK(call({"gen", "--spec", "halton:2,3", "--N", "5"}).code == 0);
  CHECK(call({"transform", "--transform", "pow:1/2", "--what", "F", "--K", "10"}).code == 0);
  CHECK(call({"transform", "--transform", "sod:2", "--what", "profile", "--d", "5"}).code == 0);
  CHECK(call({"udisc", "--spec", "vdc:2", "--N", "1:16", "--k-max", "32"}).code == 0);
  CHECK(call({"expsum", "--b", "2", "--q", "3", "--k", "1:5", "--N", "10,100"}).code == 0);
  CHECK(call({"hkbound", "--spec", "vdc:2", "--N", "64", "--g", "3"}).code == 0);
  CHECK(call({"genbound", "--spec", "vdc:2", "--transform", "sod:2", "--dmax", "8",
              "--envelope", "measured"})
            .code == 0);
  CHECK(call({"monocheck", "--spec", "vdc:2", "--transform", "pow:1/2", "--N", "1:512"}).code == 0);
  CHECK(call({"monocheck", "--spec", "vdc:2", "--transform", "pow:1/2", "--N", "2:512", "--what",
              "alpha"})
            .code == 0);
  CHECK(call({"ubound", "--spec", "vdc:2", "--N", "64", "--k-max", "256"}).code == 0);
  CHECK(call({"netcheck", "--spec", "faure:3:2", "--m", "3", "--blocks", "4"}).code == 0);
}

TEST_CASE("sodcheck end to end") {
  const auto r = call({"sodcheck", "--spec", "vdc:2", "--q", "2", "--dmax", "14"});
  CHECK(r.code == 0);
  CHECK(lines(r.out).size() == 15);
}

TEST_CASE("usage errors exit 2 with a failure record") {
  auto r = call({"bogus"});
  CHECK(r.code == 2);
  CHECK(last_failure(r.err)["status"] == "fail");
  r = call({"disc", "--spec", "vdc:1", "--N", "4"});
  CHECK(r.code == 2);
  CHECK(last_failure(r.err)["code"] == "invalid-base");
  r = call({"disc", "--spec", "vdc:2"});
  CHECK(r.code == 2);
  r = call({"disc", "--spec", "vdc:2", "--N", "4:2:0"});
  CHECK(r.code == 2);
  r = call({});
  CHECK(r.code == 2);
}

TEST_CASE("verification failures exit 1") {
  auto r = call({"netcheck", "--spec", "halton:2,3", "--m", "3"});
  CHECK(r.code == 1);
  CHECK(last_failure(r.err)["code"] == "unsupported");
  // Eight copies of the origin are not a (0,3,1)-net.
  const auto dir = scratch("table");
  {
    std::ofstream f(dir / "zeros.txt");
    f << "0 0 0 0 0 0 0 0\n";
  }
  r = call({"disc", "--spec", "vdc:2", "--transform", "table:" + (dir / "zeros.txt").string(),
            "--N", "8"});
  CHECK(r.code == 0);
  CHECK(fields(lines(r.out)[1])[1] == "1");
  r = call({"genbound", "--spec", "vdc:2", "--transform", "sod:2", "--dmax", "6", "--envelope",
            "constant:0.01"});
  CHECK(r.code == 1);
  CHECK(last_failure(r.err)["code"] == "verification-failed");
  fs::remove_all(dir);
  r = call({"monocheck", "--spec", "vdc:2", "--transform", "pow:2/3", "--N", "1:4096"});
  CHECK(r.code == 1);
  CHECK(last_failure(r.err)["code"] == "hypothesis-failed");
}

TEST_CASE("config files") {
  const auto dir = scratch("config");
  const auto cfg = dir / "run.cfg";
  {
    std::ofstream f(cfg);
    f << "# demo\nspec = halton:2,3\nN = 9\nmode=star\n";
  }
  auto r = call({"disc", "--config", cfg.string()});
  REQUIRE(r.code == 0);
  CHECK(fields(lines(r.out)[1])[3] == "star-only");
  r = call({"disc", "--config", cfg.string(), "--mode", "extreme"});
  CHECK(fields(lines(r.out)[1])[1] == "11");
  {
    std::ofstream f(cfg);
    f << "spec = vdc:2\nseed = 4\n";
  }
  r = call({"disc", "--config", cfg.string(), "--N", "4"});
  CHECK(r.code == 2);
  CHECK(last_failure(r.err)["code"] == "usage");
  fs::remove_all(dir);
}

TEST_CASE("output file") {
  const auto dir = scratch("out");
  const auto path = dir / "d.csv";
  const auto r = call({"dist", "--q", "3", "--j", "2", "--out", path.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str() == call({"dist", "--q", "3", "--j", "2"}).out);
  fs::remove_all(dir);
}

TEST_CASE("report") {
  const auto dir = scratch("report");
  auto r = call({"report", "--spec", "vdc:2", "--out-dir", dir.string(), "--dmax", "10",
                 "--alpha", "1/2,1/3", "--n-max", "64"});
  REQUIRE(r.code == 0);
  std::ifstream mf(dir / "manifest.json");
  const auto manifest = nlohmann::json::parse(mf);
  CHECK(manifest["tool"] == "lowdisc");
  CHECK(manifest["version"] == "0.1.0");
  CHECK(manifest["config_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
  REQUIRE(manifest["files"].size() == 5);
  CHECK(manifest["files"][0]["name"] == "sod_q2.csv");
  CHECK(manifest["files"][0]["rows"] == 10);
  std::ifstream alpha(dir / "alpha_1_2.csv");
  std::string header;
  std::getline(alpha, header);
  CHECK(header == "x,y");

  const auto empty = scratch("report_empty");
  r = call({"report", "--spec", "vdc:2", "--out-dir", empty.string(), "--dmax", "0", "--alpha",
            "1/2", "--n-max", "0"});
  REQUIRE(r.code == 0);
  std::ifstream sod(empty / "sod_q2.csv");
  std::stringstream text;
  text << sod.rdbuf();
  CHECK(text.str() == "x,y\n");
  fs::remove_all(dir);
  fs::remove_all(empty);
}

TEST_CASE("thread count does not change output") {
  const std::vector<std::vector<std::string>> commands{
      {"disc", "--spec", "halton:2,3", "--N", "1:20"},
      {"udisc", "--spec", "vdc:3", "--N", "1:40", "--k-max", "100"},
      {"expsum", "--b", "3", "--q", "2", "--k", "0:20", "--N", "5000,100000"},
      {"hkbound", "--spec", "vdc:2", "--N", "200", "--g", "5"},
      {"sodcheck", "--spec", "vdc:2", "--q", "2", "--dmax", "12"},
      {"ubound", "--spec", "vdc:2", "--N", "128", "--k-max", "512"},
  };
  for (const auto& cmd : commands) {
    auto one = cmd, many = cmd;
    one.insert(one.end(), {"--threads", "1"});
    many.insert(many.end(), {"--threads", "4"});
    const auto a = call(one), b = call(many);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("fnv1a") {
  CHECK(lowdisc::cli::fnv1a("") == 0xcbf29ce484222325ull);
  CHECK(lowdisc::cli::fnv1a("a") == 0xaf63dc4c8601ec8cull);
}
