#include <mapface/configmodel.hpp>
#include <mapface/io.hpp>

#include <gtest/gtest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Result {
  int status = -1;
  std::string out;
};

Result run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + MAPFACE_BIN + std::string(" ") + args + " 2>/dev/null";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string l;
  while (std::getline(in, l)) out.push_back(l);
  return out;
}

// Splits a CSV document into body and manifest JSON.
std::pair<std::string, nlohmann::json> split_manifest(const std::string& doc) {
  const std::string tag = "# manifest: ";
  const auto pos = doc.rfind(tag);
  if (pos == std::string::npos) return {doc, nullptr};
  return {doc.substr(0, pos), nlohmann::json::parse(doc.substr(pos + tag.size()))};
}

}  // namespace

TEST(Cli, EnumerateK5Rows) {
  const Result r = run("enumerate --graph kn:5 --out csv");
  ASSERT_EQ(r.status, 0);
  const auto ls = lines(r.out);
  ASSERT_GE(ls.size(), 5u);
  EXPECT_EQ(ls[0], "faces,genus,count");
  EXPECT_NE(r.out.find("\n1,3,2340\n"), std::string::npos);
  EXPECT_NE(r.out.find("\n3,2,4974\n"), std::string::npos);
  EXPECT_NE(r.out.find("\n5,1,462\n"), std::string::npos);
  EXPECT_NE(r.out.find("expected_faces=1631/648"), std::string::npos);
}

TEST(Cli, EveryCsvHasHeaderAndManifestWithDigest) {
  for (const std::string args : {"enumerate --graph kn:4", "sample --graph kn:5 --trials 1000 --seed 3",
                                 "bounds --mode logsq --n-min 10 --n-max 20", "configmodel exact --degrees 3,3",
                                 "gnp --n 8 --p 0.5 --trials 200 --seed 2"}) {
    const Result r = run(args);
    ASSERT_EQ(r.status, 0) << args;
    const auto [body, manifest] = split_manifest(r.out);
    ASSERT_FALSE(manifest.is_null()) << args;
    EXPECT_EQ(manifest["digest"], mapface::digest(body)) << args;
    EXPECT_EQ(manifest["version"], mapface::kVersion);
    EXPECT_TRUE(r.out.back() == '\n');
    EXPECT_NE(lines(r.out)[0][0], '#') << args;
  }
}

TEST(Cli, ByteReproducibleAcrossThreadCounts) {
  for (const std::string args :
       {"sample --graph kn:6 --trials 20000 --seed 42", "sample --graph kn:5 --trials 5000 --seed 42 --process B",
        "sample --graph kn:5 --trials 300 --seed 7 --per-trial", "sample --graph kn:6 --trials 5000 --seed 1 --histogram",
        "sample --graph gnp:12:0.4 --trials 2000 --seed 5", "configmodel sample --degrees 3,3,3,3 --trials 5000 --seed 8",
        "configmodel sample --degrees 3,3,3,3,3,3 --trials 500 --seed 8 --simple",
        "gnp --n 10 --p 0.3 --trials 2000 --seed 4 --connected-only", "enumerate --graph kn:5 --shard 1/3"}) {
    const Result a = run(args + " --threads 1");
    const Result b = run(args + " --threads 4");
    ASSERT_EQ(a.status, 0) << args;
    EXPECT_EQ(a.out, b.out) << args;
    EXPECT_EQ(run(args + " --threads 1").out, a.out) << args;
  }
}

TEST(Cli, PerTrialRows) {
  const Result r = run("sample --graph kn:4 --trials 50 --seed 1 --per-trial");
  ASSERT_EQ(r.status, 0);
  const auto ls = lines(r.out);
  EXPECT_EQ(ls[0], "trial,faces,genus");
  EXPECT_EQ(ls.size(), 1u + 50u + 2u);  // header, rows, summary comment, manifest
  for (std::size_t i = 1; i <= 50; ++i) {
    const bool ok = ls[i] == std::to_string(i - 1) + ",2,1" || ls[i] == std::to_string(i - 1) + ",4,0";
    EXPECT_TRUE(ok) << ls[i];
  }
  EXPECT_EQ(ls[51].rfind("# summary: mean=", 0), 0u);
}

TEST(Cli, JsonOutput) {
  const Result r = run("enumerate --graph kn:4 --out json");
  ASSERT_EQ(r.status, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.contains("result"));
  EXPECT_EQ(j["manifest"]["digest"], mapface::digest(j["result"].dump()));
  EXPECT_EQ(j["manifest"]["subcommand"], "enumerate");
}

TEST(Cli, GraphFile) {
  const Result r = run(std::string("enumerate --graph file:") + MAPFACE_DATA + "/k4.edges");
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("expected_faces=9/4"), std::string::npos);
  EXPECT_EQ(run("enumerate --graph file:/nonexistent/graph.txt").status, 2);
}

TEST(Cli, FixFirstAndShortFaces) {
  const Result r = run("enumerate --graph kn:5 --fix-first");
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("\n1,3,2340\n"), std::string::npos);
  const Result s = run("enumerate --graph kn:5 --short-faces 3");
  ASSERT_EQ(s.status, 0);
  EXPECT_NE(s.out.find("20/27"), std::string::npos);
}

TEST(Cli, Configmodel) {
  for (const std::string degrees : {"3,3", "3,3,3,3", "2,2,3,3"}) {
    const mapface::FixedRotation R(mapface::parse_degrees(degrees));
    const std::string want = "expected_faces=" + mapface::to_string(mapface::expected_faces_exact_cm(R));
    const Result r = run("configmodel exact --degrees " + degrees);
    ASSERT_EQ(r.status, 0);
    EXPECT_NE(r.out.find(want), std::string::npos) << degrees;
    const Result f = run("configmodel formula --degrees " + degrees);
    ASSERT_EQ(f.status, 0);
    EXPECT_NE(f.out.find(want), std::string::npos) << degrees;
  }
}

TEST(Cli, BoundsEnvelopeColumns) {
  const Result r = run("bounds --mode envelope --n-min 240 --n-max 250");
  ASSERT_EQ(r.status, 0) << r.out;
  const auto ls = lines(r.out);
  EXPECT_EQ(ls[0], "n,bound,mode,source,nu,mu,five_ln_n,five_ln_n_plus_5,half_ln_n_minus_2");
  EXPECT_EQ(ls.size(), 1u + 11u + 1u);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("enumerate").status, 2);
  EXPECT_EQ(run("enumerate --graph kn:4 --bogus").status, 2);
  EXPECT_EQ(run("frobnicate").status, 2);
  EXPECT_EQ(run("enumerate --graph xx:4").status, 2);
  EXPECT_EQ(run("sample --graph kn:4 --out xml").status, 2);
  EXPECT_EQ(run("configmodel exact --degrees 3").status, 2);
  EXPECT_EQ(run("enumerate --graph kn:9").status, 1);
  EXPECT_EQ(run("enumerate --graph kn:5", "MAPFACE_BUDGET=100").status, 1);
  EXPECT_EQ(run("enumerate --graph kn:5", "MAPFACE_BUDGET=100000").status, 0);
  EXPECT_EQ(run("sample --graph kn:5 --trials 0").status, 1);
  EXPECT_EQ(run("sample --graph degrees:3,3 --process A").status, 1);
  EXPECT_EQ(run("bounds --mode beta --n-max 5000").status, 1);
  EXPECT_EQ(run("enumerate --graph degrees:3,3 --fix-first").status, 1);
  EXPECT_EQ(run("enumerate --graph kn:4 --help").status, 0);
}
