#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "l12cli/cli.hpp"
#include "l12cli/instance_file.hpp"
#include "l12cli/run_record.hpp"

using namespace l12;
using namespace l12::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;

  nlohmann::json result() const {
    const auto pos = out.rfind("RESULT ");
    REQUIRE(pos != std::string::npos);
    return nlohmann::json::parse(out.substr(pos + 7, out.find('\n', pos) - pos - 7));
  }
};

Run l12lab(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("l12lab-test-" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

}  // namespace

TEST_CASE("integer lists") {
  CHECK(parse_integer_list("1,2,3") == std::vector<std::int64_t>{1, 2, 3});
  CHECK(parse_integer_list(" 4, -5 ,+6") == std::vector<std::int64_t>{4, -5, 6});
  CHECK_THROWS(parse_integer_list(""));
  CHECK_THROWS(parse_integer_list("1,,2"));
  CHECK_THROWS(parse_integer_list("1,x"));
  CHECK_THROWS(parse_integer_list("1.5"));
}

TEST_CASE("instance file round trip") {
  InstanceFile f;
  f.kind = ProblemKind::NUP;
  f.multiset = PartitionInstance({1, 2, 3});
  f.lambda = 1.0;
  const std::string text = serialize(f);
  CHECK(serialize(parse_instance(text)) == text);

  InstanceFile g;
  g.kind = ProblemKind::GENERIC;
  g.A = Matrix{{0.1, 1.0 / 3.0}, {-2.5e-17, 7.0}};
  g.b = Vector{{1.0 / 7.0, 0.0}};
  g.tau = 0.7071067811865476;
  g.nonneg = true;
  const std::string gt = serialize(g);
  const auto back = parse_instance(gt);
  CHECK(*back.A == *g.A);
  CHECK(*back.b == *g.b);
  CHECK(*back.tau == *g.tau);
  CHECK(back.nonneg);
  CHECK(serialize(back) == gt);
  CHECK(back.to_instance().form() == ObjectiveForm::ConstrainedL1L2);
}

TEST_CASE("instance file errors") {
  const auto bad = [](const std::string& text) {
    CHECK_THROWS_AS(parse_instance(text), InstanceFormatError);
  };
  bad("not json");
  bad("[]");
  bad(R"({"kind":"cp","multiset":[1],"tau":1})");
  bad(R"({"format_version":"2","kind":"cp","multiset":[1],"tau":1})");
  bad(R"({"format_version":"1","kind":"lasso","multiset":[1],"tau":1})");
  bad(R"({"format_version":"1","kind":"cp","multiset":[1],"tau":1,"extra":0})");
  bad(R"({"format_version":"1","kind":"cp","multiset":[1.5],"tau":1})");
  bad(R"({"format_version":"1","kind":"cp","multiset":[],"tau":1})");
  bad(R"({"format_version":"1","kind":"cp","multiset":[1]})");
  bad(R"({"format_version":"1","kind":"pqp","multiset":[1],"tau":1})");
  bad(R"({"format_version":"1","kind":"nup","multiset":[1],"lambda":1,"nonneg":true})");
  bad(R"({"format_version":"1","kind":"cp","multiset":[1],"A":[[1]],"b":[1],"tau":1})");
  bad(R"({"format_version":"1","kind":"generic","A":[[1,2],[3]],"b":[1,2],"tau":1})");
  bad(R"({"format_version":"1","kind":"generic","A":[[1,2]],"b":[1,2],"tau":1})");
  bad(R"({"format_version":"1","kind":"generic","A":[[1,2]],"b":[1],"tau":1,"lambda":1})");
  CHECK_NOTHROW(parse_instance(R"({"format_version":"1","kind":"generic","A":[[1,2]],"b":[1],"lambda":1})"));
}

TEST_CASE("sha256") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("gen") {
  TempDir dir;
  const auto path = dir.file("nup123.json");
  auto r = l12lab({"gen", "--set", "1,2,3", "--kind", "nup", "--lambda", "1.0", "--out", path});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("target value = 1.133974596\n") != std::string::npos);
  CHECK(r.result()["target_value"].get<double>() == doctest::Approx(1.1339745962155614).epsilon(1e-15));
  const auto file = parse_instance(read_text_file(path));
  CHECK(file.multiset->elements() == std::vector<std::int64_t>{1, 2, 3});
  CHECK(serialize(file) == read_text_file(path));

  r = l12lab({"gen", "--set", "5", "--kind", "cp", "--tau", "1.0", "--out", dir.file("cp5.json")});
  CHECK(r.code == kExitOk);
  CHECK(r.result()["target_value"].get<double>() == 0.0);

  CHECK(l12lab({"gen", "--set", "", "--kind", "cp", "--tau", "1"}).code == kExitError);
  CHECK(l12lab({"gen", "--set", "1,2", "--kind", "cp"}).code == kExitError);
  CHECK(l12lab({"gen", "--set", "1,2", "--kind", "up", "--tau", "1"}).code == kExitError);
  CHECK(l12lab({"gen", "--set", "1,2", "--kind", "generic", "--tau", "1"}).code == kExitError);

  r = l12lab({"gen", "--set", "1,2", "--kind", "up", "--lambda", "3", "--out", dir.file("w.json")});
  CHECK(r.code == kExitOk);
  CHECK(r.err.find("warning") != std::string::npos);
}

TEST_CASE("solve") {
  TempDir dir;
  const auto path = dir.file("nup123.json");
  REQUIRE(l12lab({"gen", "--set", "1,2,3", "--kind", "nup", "--lambda", "1", "--out", path}).code == 0);

  auto r = l12lab({"solve", "--in", path, "--method", "pattern"});
  CHECK(r.code == kExitOk);
  CHECK(r.result()["argmin_count"] == 2);
  CHECK(r.result()["best_value"].get<double>() == doctest::Approx(1.1339745962155614).epsilon(1e-14));
  CHECK(r.out.find("pattern minimum = 1.133974596, 2 argmins") != std::string::npos);

  r = l12lab({"solve", "--in", path, "--method", "dca", "--starts", "50", "--seed", "7"});
  CHECK(r.code == kExitOk);
  CHECK(r.result()["best_value"].get<double>() <= 1.1340745962);

  r = l12lab({"solve", "--in", path});
  CHECK(r.code == kExitOk);
  CHECK(r.result()["method"] == "dca");

  CHECK(l12lab({"solve", "--in", path, "--method", "penalty"}).code == kExitError);
  CHECK(l12lab({"solve", "--in", path, "--method", "newton"}).code == kExitError);
  CHECK(l12lab({"solve", "--in", dir.file("missing.json")}).code == kExitError);

  const auto generic = dir.file("generic.json");
  write_text_file(generic,
                  R"({"format_version":"1","kind":"generic","A":[[1,0],[0,1]],"b":[1,0],"lambda":1})");
  CHECK(l12lab({"solve", "--in", generic, "--method", "pattern"}).code == kExitError);
  r = l12lab({"solve", "--in", generic, "--starts", "4", "--init", "random_box"});
  CHECK(r.code == kExitOk);
  CHECK(r.result()["best_value"].get<double>() < 1e-10);
  r = l12lab({"solve", "--in", generic, "--method", "grid", "--box", "2", "--step", "0.5"});
  CHECK(r.code == kExitOk);
  CHECK(r.result()["best_value"].get<double>() == 0.0);

  const auto ncp = dir.file("ncp.json");
  REQUIRE(l12lab({"gen", "--set", "1,1", "--kind", "ncp", "--tau", "1", "--out", ncp}).code == 0);
  r = l12lab({"solve", "--in", ncp, "--starts", "10"});
  CHECK(r.code == kExitOk);
  CHECK(r.result()["method"] == "penalty");
  CHECK(r.result()["equality_residual"].get<double>() <= 1e-6);
  CHECK(l12lab({"solve", "--in", ncp, "--method", "grid"}).code == kExitError);
}

TEST_CASE("decide") {
  auto r = l12lab({"decide", "--set", "1,2,3", "--kind", "nup", "--lambda", "1", "--method", "pattern"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("answer YES") != std::string::npos);
  CHECK(r.out.find("{1,2}|{3}") != std::string::npos);

  r = l12lab({"decide", "--set", "1,1,3", "--kind", "nup", "--lambda", "1", "--method", "pattern"});
  CHECK(r.code == kExitNo);
  CHECK(r.out.find("answer NO") != std::string::npos);
  CHECK(r.result()["gap"].get<double>() == doctest::Approx(0.6220084679281462).epsilon(1e-12));

  CHECK(l12lab({"decide", "--set", "2,2", "--kind", "cp", "--tau", "1", "--method", "pattern"}).code == kExitOk);
  CHECK(l12lab({"decide", "--set", "2,2", "--kind", "pqp"}).code == kExitOk);
  CHECK(l12lab({"decide", "--set", "2,2", "--kind", "cp", "--tau", "1", "--method", "solver",
                "--starts", "10"})
            .code == kExitOk);
  CHECK(l12lab({"decide", "--set", "2,2", "--kind", "cp", "--lambda", "1"}).code == kExitError);
  CHECK(l12lab({"decide", "--set", "2,2", "--kind", "cp", "--tau", "1", "--method", "magic"}).code ==
        kExitError);
  CHECK(l12lab({"decide", "--set", "a", "--kind", "cp", "--tau", "1"}).code == kExitError);
}

TEST_CASE("oracle") {
  auto r = l12lab({"oracle", "partition", "--set", "1,2,3"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("certificate {1,2}|{3}") != std::string::npos);

  r = l12lab({"oracle", "partition", "--set", "1,1,3"});
  CHECK(r.code == kExitOk);
  CHECK(r.result()["certificate"].is_null());

  r = l12lab({"oracle", "gw", "--tau", "1", "--m", "3", "--k", "2"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("unique minimizer at origin: PASS") != std::string::npos);

  r = l12lab({"oracle", "kkt", "--lambda", "1", "--m", "4"});
  CHECK(r.code == kExitOk);
  CHECK(r.result()["residual"].get<double>() == 0.0);
  CHECK(r.result()["c"].get<double>() == 0.75);

  r = l12lab({"oracle", "grid", "--lambda", "1", "--m", "1", "--step", "0.01"});
  CHECK(r.code == kExitOk);
  CHECK(std::abs(r.result()["value"].get<double>()) < 1e-3);

  CHECK(l12lab({"oracle"}).code == kExitError);
  CHECK(l12lab({"oracle", "kkt", "--lambda", "1", "--m", "0"}).code == kExitError);
}

TEST_CASE("verify") {
  auto r = l12lab({"verify", "--suite", "lemma33"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.result()["passed"] == r.result()["total"]);

  r = l12lab({"verify", "--suite", "thm-nup", "--seed", "1"});
  CHECK(r.code == kExitOk);
  CHECK(l12lab({"verify", "--suite", "nope"}).code == kExitError);
}

TEST_CASE("usage errors") {
  CHECK(l12lab({}).code == kExitError);
  CHECK(l12lab({"frobnicate"}).code == kExitError);
  CHECK(l12lab({"decide", "--kind", "cp"}).code == kExitError);
  CHECK(l12lab({"--help"}).code == kExitOk);
  CHECK(l12lab({"solve", "--help"}).code == kExitOk);
}

TEST_CASE("run log") {
  TempDir dir;
  const auto log = dir.file("runs.ndjson");
  const auto path = dir.file("nup.json");
  REQUIRE(l12lab({"gen", "--set", "1,2,3", "--kind", "nup", "--lambda", "1", "--out", path, "--log", log})
              .code == 0);
  for (int i = 0; i < 2; ++i) {
    REQUIRE(l12lab({"solve", "--in", path, "--starts", "5", "--seed", "3", "--log", log}).code == 0);
  }
  REQUIRE(l12lab({"decide", "--set", "1,1,3", "--kind", "nup", "--lambda", "1", "--log", log}).code == 1);

  std::ifstream in(log);
  std::vector<nlohmann::json> records;
  for (std::string line; std::getline(in, line);) records.push_back(nlohmann::json::parse(line));
  REQUIRE(records.size() == 4);
  CHECK(records[0]["command"] == "gen");
  CHECK(records[1]["command"] == "solve");
  CHECK(records[1]["instance_digest"] == records[0]["instance_digest"]);
  CHECK(records[1]["instance_digest"] == sha256_hex(read_text_file(path)));
  CHECK(records[1]["seed"] == 3);
  CHECK(records[1]["results"] == records[2]["results"]);
  CHECK(records[1]["options"] == records[2]["options"]);
  CHECK(records[1].contains("wall_seconds"));
  CHECK(records[3]["results"]["answer"] == "NO");
}
