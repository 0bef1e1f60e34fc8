#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "meanlb/cli.hpp"
#include "meanlb/harness.hpp"

using namespace meanlb;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "meanlb");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("meanlb_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::string file(const std::string& name, const std::string& content) {
    const std::string p = (dir_ / name).string();
    write_file(p, content);
    return p;
  }
  std::filesystem::path dir_;
};

}  // namespace

TEST(SampleText, ParsesSeparatorsCommentsAndHeader) {
  EXPECT_EQ(parse_sample_text("value\n1, 2\n3\t4 # note\n\n-5e-1\n"),
            (std::vector<double>{1, 2, 3, 4, -0.5}));
  EXPECT_EQ(parse_sample_text("# only\n7\n"), (std::vector<double>{7}));
  try {
    parse_sample_text("1\n2 x3\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 3u);
  }
  EXPECT_THROW(parse_sample_text("1\nfoo\n"), ConfigError);  // header only on the first line
  EXPECT_THROW(read_sample_file("/nonexistent/meanlb/sample.txt"), IoError);
}

TEST(Cli, BoundCsvAndText) {
  const CliRun r = cli({"bound", "--class", "gaussian", "--n", "10", "--delta", "0.01", "--output", "csv"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out.rfind("# meanlb-csv v1\nclass,n,delta,value,kind,residual,feasible,clamped\n", 0), 0u);
  EXPECT_NE(r.out.find("gaussian,10,0.01,"), std::string::npos);
  const CliRun t = cli({"bound", "--class", "gaussian", "--n", "10", "--delta", "0.01"});
  EXPECT_EQ(t.code, kExitOk);
  EXPECT_NE(t.out.find("kind:"), std::string::npos);
}

TEST(Cli, BoundSweep) {
  const CliRun r = cli({"bound", "--class", "finite_variance_2", "--n", "50", "--sweep",
                     "delta=1e-6:0.1:logsteps=5", "--output", "csv"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 7);
  EXPECT_NE(r.out.find(",1e-06,"), std::string::npos);
  EXPECT_NE(r.out.find(",0.1,"), std::string::npos);
}

TEST(Cli, ConfigErrorsExitTwo) {
  EXPECT_EQ(cli({}).code, kExitConfig);
  EXPECT_EQ(cli({"nosuch"}).code, kExitConfig);
  EXPECT_EQ(cli({"bound"}).code, kExitConfig);
  EXPECT_EQ(cli({"bound", "--class", "nosuch"}).code, kExitConfig);
  EXPECT_EQ(cli({"bound", "--class", "gaussian", "--n", "0"}).code, kExitConfig);
  EXPECT_EQ(cli({"bound", "--class", "gaussian", "--delta", "1.5"}).code, kExitConfig);
  EXPECT_EQ(cli({"bound", "--class", "gaussian", "--output", "xml"}).code, kExitConfig);
  EXPECT_EQ(cli({"div", "--kind", "kl", "--p", "discrete[(0,1)", "--q", "discrete[(1,1)]"}).code,
            kExitConfig);
  EXPECT_EQ(cli({"fisher", "--family", "huber", "--eps", "2"}).code, kExitConfig);
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
}

TEST(Cli, Div) {
  const CliRun r = cli({"div", "--kind", "kl", "--p", "discrete[(0,0.5),(1,0.5)]", "--q", "discrete[(0,0.75),(1,0.25)]",
                     "--output", "csv"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("kind,alpha,value,residual,exact"), std::string::npos);
  const CliRun h = cli({"div", "--kind", "hellinger", "--p", "gaussian(0,1)", "--q", "gaussian(1,1)"});
  EXPECT_EQ(h.code, kExitOk) << h.err;
}

TEST(Cli, Fisher) {
  EXPECT_EQ(cli({"fisher", "--family", "interval_mass", "--eps", "0.2"}).code, kExitOk);
  EXPECT_EQ(cli({"fisher", "--family", "huber", "--eps", "0.2", "--output", "csv"}).code, kExitOk);
  EXPECT_EQ(cli({"fisher", "--family", "bounded", "--a", "0", "--b", "2"}).code, kExitOk);
  EXPECT_EQ(cli({"fisher", "--family", "semibounded", "--variance", "2"}).code, kExitOk);
  // a root below the representable range is a numeric failure
  EXPECT_EQ(cli({"fisher", "--family", "huber", "--eps", "1e-320"}).code, kExitNumeric);
}

TEST_F(CliFiles, KinfAndEstimate) {
  const std::string s = file("s.txt", "x\n1\n2\n3,4\n");
  const CliRun k = cli({"kinf", "--sample", s, "--mean-at-most", "1", "--second-moment", "1",
                     "--output", "csv"});
  ASSERT_EQ(k.code, kExitOk) << k.err;
  EXPECT_NE(k.out.find("n,value,lambda1,lambda2,residual,iterations"), std::string::npos);
  const CliRun e = cli({"estimate", "--sample", s, "--delta", "0.1", "--output", "csv"});
  ASSERT_EQ(e.code, kExitOk) << e.err;
  EXPECT_NE(e.out.find("\nminkl,4,0.1,"), std::string::npos);
  EXPECT_EQ(cli({"estimate", "--spec", "mean", "--sample", s}).code, kExitOk);
  EXPECT_EQ(cli({"kinf", "--sample", s, "--mean-at-most", "1"}).code, kExitConfig);
  EXPECT_EQ(cli({"kinf", "--sample", s, "--mean-at-most", "1", "--mean-at-least", "0",
                 "--second-moment", "1"})
                .code,
            kExitConfig);
  // an unattainable tolerance leaves Newton unconverged
  EXPECT_EQ(cli({"kinf", "--sample", s, "--mean-equal", "2", "--second-moment", "0.5", "--tol",
                 "1e-300"})
                .code,
            kExitNumeric);
  EXPECT_EQ(cli({"kinf", "--sample", (dir_ / "missing").string(), "--mean-at-most", "1",
                 "--second-moment", "1"})
                .code,
            kExitIo);
  const CliRun bad = cli({"estimate", "--sample", file("b.txt", "1\n2 x\n")});
  EXPECT_EQ(bad.code, kExitConfig);
  EXPECT_NE(bad.err.find("line 2"), std::string::npos);
}

TEST_F(CliFiles, Simulate) {
  const std::string cfg = file("c.cfg",
                               "distribution = gaussian(0,1)\nestimators = mean, mom(4)\nn = 20\n"
                               "deltas = 0.1, 0.01\ntrials = 100\nseed = 5\n");
  const CliRun a = cli({"simulate", "--config", cfg, "--workers", "1", "--output", "csv"});
  const CliRun b = cli({"simulate", "--config", cfg, "--workers", "3", "--output", "csv"});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.rfind("# meanlb-csv v1\nestimator,n,delta,", 0), 0u);
  const CliRun q = cli({"simulate", "--config", cfg, "--quantiles", "0.5,0.9", "--output", "csv"});
  ASSERT_EQ(q.code, kExitOk) << q.err;
  EXPECT_NE(q.out.find("estimator,delta,q,quantile"), std::string::npos);

  const std::string out = (dir_ / "out.csv").string();
  const std::string cfg2 = file("d.cfg", read_file(cfg) + "output = " + out + "\n");
  ASSERT_EQ(cli({"simulate", "--config", cfg2, "--output", "csv"}).code, kExitOk);
  EXPECT_EQ(read_file(out), a.out);

  const std::string bad = file("e.cfg", "distribution = gaussian(0,1)\nn = 20\nn = 30\n");
  const CliRun e = cli({"simulate", "--config", bad});
  EXPECT_EQ(e.code, kExitConfig);
  EXPECT_NE(e.err.find("line 3"), std::string::npos);
  EXPECT_EQ(cli({"simulate", "--config", (dir_ / "none.cfg").string()}).code, kExitIo);
  const std::string unwritable =
      file("f.cfg", read_file(cfg) + "output = " + (dir_ / "no/such/dir.csv").string() + "\n");
  EXPECT_EQ(cli({"simulate", "--config", unwritable}).code, kExitIo);
}

TEST(Cli, Verify) {
  const CliRun r = cli({"verify", "--output", "csv", "--trials", "100"});
  ASSERT_EQ(r.code, kExitOk) << r.out << r.err;
  EXPECT_NE(r.out.find("check,instance,lhs,relation,rhs,slack,holds"), std::string::npos);
  EXPECT_EQ(r.out.find(",false\n"), std::string::npos);
  EXPECT_EQ(cli({"verify", "--check", "chernoff"}).code, kExitOk);
  EXPECT_EQ(cli({"verify", "--check", "nosuch"}).code, kExitConfig);
}
