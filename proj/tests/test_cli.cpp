#include <sys/wait.h>

#include <array>
#include <cstdlib>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

struct Run {
  int status = -1;
  std::string out;
};

// Runs the CLI with stderr discarded unless keep_stderr is set.
Run cli(const std::string& args, bool keep_stderr = false) {
  std::string cmd = std::string(CUBAR_CLI_PATH) + " " + args + (keep_stderr ? " 2>&1" : " 2>/dev/null");
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int raw = pclose(p);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string golden(const std::string& name) {
  std::ifstream in(std::string(CUBAR_GOLDEN_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp_file(const std::string& name, const std::string& text) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_CASE("cli golden outputs") {
  const std::pair<const char*, const char*> cases[] = {
      {"homology --model point --weight 1,4 --variant raw --degrees 0..6 --text", "homology_point_raw.txt"},
      {"homology --model s1 --degrees 0..2", "homology_s1_normalized.json"},
      {"normalize --model point --weight 1,4 --beta 7 --degrees 0..9", "normalize_point_beta7.json"},
      {"verify lemma2 --weight 2,4", "verify_lemma2_unconstructible.json"},
      {"point-table --weight 1,4 --degrees 0..6 --text", "point_table_raw.txt"},
      {"cw-predict --weight 1,4 --input s2 --degrees 0..4 --text", "cw_predict_s2.txt"},
      {"verify les --text", "verify_les.txt"},
  };
  for (const auto& [args, file] : cases) {
    CAPTURE(args);
    Run r = cli(args);
    CHECK(r.status == 0);
    CHECK(r.out == golden(file));
  }
}

TEST_CASE("cli reports are byte-stable for a fixed seed") {
  for (const char* args : {"verify thm1 --cases 40 --seed 7", "verify eq7 --cases 6 --seed 3", "homology --model t2 --weight 2,3 --degrees 0..2"}) {
    CAPTURE(args);
    Run a = cli(args), b = cli(args);
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
  }
  CHECK(cli("verify thm1 --cases 40 --seed 7").out != cli("verify thm1 --cases 40 --seed 8").out);
}

TEST_CASE("cli timing is opt-in") {
  CHECK(cli("homology --model s1").out.find("timing_ms") == std::string::npos);
  CHECK(cli("homology --model s1 --timing").out.find("timing_ms") != std::string::npos);
}

TEST_CASE("cli json reports parse and carry the verdict") {
  auto j = nlohmann::ordered_json::parse(cli("verify thm1 --cases 25").out);
  CHECK(j["suite"] == "thm1");
  CHECK(j["ok"] == true);
  CHECK(j["cases"] == 25);
  auto h = nlohmann::ordered_json::parse(cli("homology --model d2-pair --relative --degrees 0..3").out);
  CHECK(h["degrees"][2]["homology"]["rank"] == 1);
}

TEST_CASE("cli exit codes for invalid input") {
  CHECK(cli("").status == 2);
  CHECK(cli("bogus").status == 2);
  CHECK(cli("homology --model s1 --weight 1,x").status == 2);
  CHECK(cli("homology --model s1 --weight 1,2 --L 2").status == 2);
  CHECK(cli("homology --model klein").status == 2);
  CHECK(cli("homology --model no-such-model").status == 2);
  CHECK(cli("homology --model s1 --degrees 3..1").status == 2);
  CHECK(cli("homology --model s1 --relative").status == 2);
  CHECK(cli("homology --model s1 --text --json").status == 2);
  CHECK(cli("verify lemma9").status == 2);
  CHECK(cli("verify les --ring Z/4").status == 2);
  CHECK(cli("cw-predict --weight 2,4 --input point").status == 2);
  CHECK(cli("normalize --model point").status == 2);
  CHECK(cli("point-table --ring R").status == 2);
}

TEST_CASE("cli model validation names the offending field") {
  auto bad = temp_file("cubar_bad_model.json", R"({"dim":2,"top_cells":[{"base":[0,0],"extent":[2,0]}]})");
  Run r = cli("homology --model " + bad, true);
  CHECK(r.status == 2);
  CHECK(r.out.find("top_cells[0].extent[0]") != std::string::npos);
  auto broken = temp_file("cubar_broken_model.json", "{\"dim\":");
  CHECK(cli("homology --model " + broken).status == 2);
}

TEST_CASE("cli accepts user models and homology files") {
  auto edge = temp_file("cubar_edge.json", R"({"name":"edge","dim":1,"top_cells":[{"base":[0],"extent":[1]}]})");
  Run r = cli("homology --model " + edge + " --degrees 0..1 --text");
  CHECK(r.status == 0);
  CHECK(r.out == "H_0 = Z\nH_1 = 0\n");
  auto rp2 = temp_file("cubar_rp2.json", R"({"name":"rp2","homology":[{"rank":1,"torsion":[]},{"rank":0,"torsion":[2]}]})");
  Run p = cli("cw-predict --weight 1,1 --input " + rp2 + " --degrees 2 --text");
  CHECK(p.status == 0);
  CHECK(p.out == "H_2 = Z/2 + Z/2\n");
  Run u = cli("cw-predict --weight 2,-1 --input s1 --degrees 1 --text");
  CHECK(u.status == 0);
  CHECK(u.out.find("warning") != std::string::npos);
}

TEST_CASE("cli output does not depend on the thread cap") {
  const std::string args = "homology --model t2 --weight 2,3,-1 --degrees 0..2";
  setenv("CUBAR_THREADS", "1", 1);
  Run one = cli(args);
  setenv("CUBAR_THREADS", "3", 1);
  Run capped = cli(args);
  unsetenv("CUBAR_THREADS");
  CHECK(one.status == 0);
  CHECK(one.out == capped.out);
}
