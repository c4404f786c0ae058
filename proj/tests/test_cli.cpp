// Copyright 2026 The firstint Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "doctest.h"

#include "firstint/dataset.hpp"
#include "firstint/eval.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

using namespace firstint;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

// Runs the CLI with stderr discarded; returns exit status and stdout.
Run cli(const std::string& args) {
  const std::string cmd = std::string("\"") + FIRSTINT_CLI + "\" " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
  const int raw = pclose(p);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("firstint_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("verify") {
  Run ok = cli("verify --system y \"- 0 x\" --integral \"+ ^ x 2 ^ y 2\"");
  CHECK(ok.status == 0);
  CHECK(ok.out.rfind("true", 0) == 0);

  Run wrong = cli("verify --system y \"- 0 x\" --integral \"* x y\"");
  CHECK(wrong.status == 0);
  CHECK(wrong.out.rfind("false", 0) == 0);
  CHECK(cli("verify --strict --system y \"- 0 x\" --integral \"* x y\"").status == 2);
  CHECK(cli("verify --system y \"- 0 x\" --integral \"+ x\"").status == 1);
  CHECK(cli("verify --system y").status == 1);
  CHECK(cli("").status == 1);
}

TEST_CASE("generate, dedup, split, eval") {
  TempDir dir;
  const std::string a = dir / "a.jsonl", b = dir / "b.jsonl";
  REQUIRE(cli("generate --seed 9 --count 40 --workers 1 --out " + a).status == 0);
  REQUIRE(cli("generate --seed 9 --count 40 --workers 3 --out " + b).status == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(fs::exists(manifest_path(a)));
  const Json manifest = Json::parse(slurp(manifest_path(a).string()));
  CHECK(manifest["seed"] == 9);
  CHECK(manifest["records"] == 40);
  CHECK(manifest.contains("rejections"));

  const auto records = read_records(fs::path(a));
  CHECK(records.size() == 40);
  for (const auto& r : records) CHECK_FALSE(r.meta.contains("workers"));

  const std::string test = dir / "test.jsonl";
  REQUIRE(cli("testset --kind hard --seed 4 --count 10 --out " + test).status == 0);
  // Put the test records into the training pool; split must still drop them.
  auto pool = records;
  for (const auto& r : read_records(fs::path(test))) pool.push_back(r);
  const std::string pool_path = dir / "pool.jsonl";
  write_records(fs::path(pool_path), pool);
  REQUIRE(cli("split --seed 1 --in " + pool_path + " --out-dir " + (dir / "sp") + " --exclude " + test).status == 0);
  std::set<std::string> test_ids;
  for (const auto& r : read_records(fs::path(test))) test_ids.insert(r.id);
  std::size_t total = 0;
  for (const char* part : {"train.jsonl", "valid.jsonl"})
    for (const auto& r : read_records(dir.path / "sp" / part)) {
      CHECK_FALSE(test_ids.contains(r.id));
      ++total;
    }
  CHECK(total == 40);

  REQUIRE(cli("dedup --in " + pool_path + " --out " + (dir / "d.jsonl")).status == 0);
  CHECK(read_records(fs::path(dir / "d.jsonl")).size() == 50);

  Run ev = cli("eval --dataset " + a + " --ground-truth --report " + (dir / "rep.json"));
  CHECK(ev.status == 0);
  CHECK(Json::parse(slurp(dir / "rep.json"))["accuracy"] == 1.0);

  std::ofstream(dir / "bad.jsonl") << "{\"id\": 1}\n";
  CHECK(cli("dedup --in " + (dir / "bad.jsonl") + " --out " + (dir / "x.jsonl")).status == 1);
}

TEST_CASE("reward") {
  const std::string sys = "--system y \"- 0 x\" --reference \"+ ^ x 2 ^ y 2\" ";
  Run bin = cli("reward --mode bin " + sys + "--candidate \"* x y\"");
  REQUIRE(bin.status == 0);
  Json j = Json::parse(bin.out);
  CHECK(j["scores"][0]["reward"] == 0.0);
  CHECK(j["scores"][0]["branch"] == "shaped");

  Run ld = cli("reward " + sys + "--candidate \"+ ^ x 2 ^ y 2\" --candidate \"+ x w\"");
  j = Json::parse(ld.out);
  CHECK(j["scores"][0]["reward"] == 100.0);
  CHECK(j["scores"][1]["reward"] == -1.0);
  CHECK(j["group_reward"] == 100.0);
  CHECK(cli("reward --omega 500 " + sys + "--candidate x").status == 1);
}

TEST_CASE("invert and enumerate") {
  TempDir dir;
  std::ofstream(dir / "ints.txt") << "+ ^ x 2 ^ y 2\n# comment\n* x y\n";
  REQUIRE(cli("invert --seed 2 --integrals " + (dir / "ints.txt") + " --out " + (dir / "inv.jsonl")).status == 0);
  const auto inv = read_records(fs::path(dir / "inv.jsonl"));
  REQUIRE(inv.size() == 2);
  CHECK(inv[0].system[0] == "y");
  CHECK(inv[0].source_tag == SourceTag::BwdSyn);
  CHECK(cli("verify --strict --in " + (dir / "inv.jsonl")).status == 0);

  Run en = cli("enumerate --system y \"- 0 x\" --max-ops 3 --max-results 1");
  CHECK(en.status == 0);
  CHECK_FALSE(en.out.empty());

  REQUIRE(cli("enumerate --dataset " + (dir / "inv.jsonl") + " --max-ops 2 --out " + (dir / "c.jsonl")).status == 0);
  const auto cands = read_candidates(fs::path(dir / "c.jsonl"));
  CHECK_FALSE(cands.empty());
  Run ev = cli("eval --dataset " + (dir / "inv.jsonl") + " --candidates " + (dir / "c.jsonl"));
  CHECK(ev.status == 0);
  CHECK(ev.out.find("accuracy") != std::string::npos);
}

TEST_CASE("family and blend") {
  TempDir dir;
  REQUIRE(cli("generate --family --seed 5 --count 20 --out " + (dir / "fwd.jsonl")).status == 0);
  for (const auto& r : read_records(fs::path(dir / "fwd.jsonl"))) {
    CHECK(r.source_tag == SourceTag::Fwd);
    CHECK(r.integrals.empty());
  }
  REQUIRE(cli("generate --seed 6 --count 30 --out " + (dir / "base.jsonl")).status == 0);
  REQUIRE(cli("blend --seed 1 --base " + (dir / "base.jsonl") + " --extra " + (dir / "fwd.jsonl") +
              " --fraction 0.1 --out " + (dir / "mix.jsonl"))
              .status == 0);
  std::size_t fwd = 0;
  const auto mix = read_records(fs::path(dir / "mix.jsonl"));
  for (const auto& r : mix) fwd += r.source_tag == SourceTag::Fwd;
  CHECK(mix.size() == 30);
  CHECK(fwd == 3);
  CHECK(cli("blend --seed 1 --base " + (dir / "base.jsonl") + " --extra " + (dir / "fwd.jsonl") +
            " --fraction 0.9 --out " + (dir / "mix2.jsonl"))
            .status == 1);
}
