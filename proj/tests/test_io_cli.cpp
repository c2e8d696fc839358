#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qpd/amplifier.hpp"
#include "qpd/cli.hpp"
#include "qpd/states.hpp"

using namespace qpd;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

QuasiDistribution sample_distribution() {
    const LadderConvention conv{0.5, 1.25};
    PhaseGrid g = PhaseGrid::square(3.0, 17);
    g.p_min = -2.0;
    g.np = 13;
    QuasiDistribution d = husimi_direct_grid(coherent_state(cplx(0.3, 0.1), FockSpace(20)).density(), g, conv);
    d.diagnostics.set("example", 0.25);
    d.diagnostics.warn("note");
    return d;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "qpd_tests";
    fs::create_directories(dir);
    return dir / name;
}

struct ProcessResult {
    int status;
    std::string out;
};

ProcessResult run_qpd(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + std::string(QPD_EXE) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    std::string out;
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), buf.size(), p)) out += buf.data();
    const int raw = pclose(p);
    return {WEXITSTATUS(raw), out};
}

}  // namespace

TEST(GridIo, CsvRoundTrip) {
    const QuasiDistribution d = sample_distribution();
    std::stringstream ss;
    write_csv(d, ss);
    const QuasiDistribution r = read_csv(ss);
    EXPECT_EQ(r.kind, d.kind);
    EXPECT_EQ(r.convention, d.convention);
    EXPECT_EQ(r.grid.nq, d.grid.nq);
    EXPECT_EQ(r.grid.np, d.grid.np);
    EXPECT_NEAR(r.grid.p_min, -2.0, 1e-15);
    EXPECT_LT((r.values - d.values).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(GridIo, JsonRoundTrip) {
    const QuasiDistribution d = sample_distribution();
    const QuasiDistribution r = distribution_from_json(json::parse(to_json(d).dump()));
    EXPECT_EQ(r.kind, d.kind);
    EXPECT_EQ(r.convention, d.convention);
    EXPECT_LT((r.values - d.values).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(r.diagnostics.get("example"), 0.25);
    ASSERT_EQ(r.diagnostics.warnings.size(), 1u);
}

TEST(GridIo, KindsSurviveJson) {
    for (const DistributionKind& k : {DistributionKind::s_param(0.5), DistributionKind::cohen("gaussian:0.7"),
                                      DistributionKind::symbol(Ordering::antinormal), DistributionKind::smoothed(2.0)})
        EXPECT_EQ(kind_from_json(to_json(k)), k) << k.describe();
}

TEST(GridIo, FilesByExtension) {
    const QuasiDistribution d = sample_distribution();
    const fs::path csv = scratch("rt.csv"), js = scratch("rt.json");
    save(d, csv.string(), GridFormat::csv);
    save(d, js.string(), GridFormat::json);
    EXPECT_LT((load(csv.string()).values - d.values).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((load(js.string()).values - d.values).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(GridIo, RejectsMalformedCsv) {
    std::stringstream ragged("p\\q,0,1\n0,1,2\n1,3\n");
    EXPECT_THROW(read_csv(ragged), ValidationError);
    std::stringstream uneven("p\\q,0,1,3\n0,1,2,3\n1,1,2,3\n");
    EXPECT_THROW(read_csv(uneven), ValidationError);
    EXPECT_THROW(parse_grid_format("xml"), ValidationError);
}

TEST(Tolerances, UnknownNameIsRejected) {
    ToleranceSet t;
    EXPECT_THROW(t.set("bogus", 1.0), ValidationError);
    t.set("moment", 1e-9);
    EXPECT_EQ(t.get("moment"), 1e-9);
    cli::RunConfig cfg;
    EXPECT_THROW(cli::apply_tolerance(cfg, "moment"), ValidationError);
    EXPECT_THROW(cli::apply_tolerance(cfg, "bogus=1"), ValidationError);
    cli::apply_tolerance(cfg, "normalization=0.01");
    EXPECT_EQ(cfg.tolerances.get("normalization"), 0.01);
}

TEST(Config, TextKeys) {
    cli::RunConfig cfg;
    cli::apply_config_text(cfg, "# comment\ndim = 32\nhbar=0.5\nlambda = 2 # trailing\ngrid=-4:4:33,-3:3:25\n"
                                "format=json\nout=x.json\ntol.mean=0.5\n");
    EXPECT_EQ(cfg.dim, 32);
    EXPECT_EQ(cfg.convention.hbar, 0.5);
    EXPECT_EQ(cfg.convention.lambda, 2.0);
    ASSERT_TRUE(cfg.grid);
    EXPECT_EQ(cfg.grid->np, 25);
    EXPECT_EQ(cfg.format, GridFormat::json);
    EXPECT_EQ(cfg.out, "x.json");
    EXPECT_EQ(cfg.tolerances.get("mean"), 0.5);
    EXPECT_THROW(cli::apply_config_text(cfg, "colour = red\n"), ValidationError);
    EXPECT_THROW(cli::parse_grid("1:2:3"), ValidationError);
}

TEST(Verify, SuitesPass) {
    for (const std::string& s : verify_suites()) {
        const VerifyReport r = run_verify(s);
        EXPECT_TRUE(r.all_pass()) << r.to_json().dump(1);
        EXPECT_FALSE(r.checks.empty()) << s;
    }
    EXPECT_THROW(run_verify("nonsense"), ValidationError);
}

TEST(Verify, ChecksCarryResidualsAndTolerances) {
    VerifyConfig cfg;
    cfg.tolerances.set("algebraic", 1e-300);
    const VerifyReport r = run_verify("algebra", cfg);
    EXPECT_FALSE(r.all_pass());
    const json j = r.to_json();
    ASSERT_TRUE(j.contains("checks"));
    for (const auto& c : j["checks"]) {
        EXPECT_TRUE(c.contains("residual"));
        EXPECT_TRUE(c.contains("tolerance"));
    }
}

TEST(Commands, GuardedMapsErrorsToStatusTwo) {
    std::stringstream os;
    const int st = cli::guarded(os, [] () -> int { throw SupportOverflow("too small", 7.5); });
    EXPECT_EQ(st, 2);
    const json j = json::parse(os.str());
    EXPECT_EQ(j["type"], "support_overflow");
    EXPECT_EQ(j["suggested_extent"], 7.5);
}

TEST(Commands, MomentReportsBothRoutes) {
    cli::RunConfig cfg;
    std::stringstream os;
    EXPECT_EQ(cli::cmd_moment("2,1,0.5+0.5i,1.5,0.7", cfg, os), 0);
    const json j = json::parse(os.str());
    EXPECT_LT(j["relative_difference"].get<double>(), 1e-12);
    const cplx ref = moment_integral(2, 1, cplx(0.5, 0.5), 1.5, 0.7);
    EXPECT_NEAR(j["closed_form"]["value"]["re"].get<double>(), ref.real(), 1e-14);
}

TEST(Commands, StateTailControlsStatus) {
    cli::RunConfig cfg;
    cfg.dim = 12;
    std::stringstream a, b;
    EXPECT_EQ(cli::cmd_state("coherent:1.5", cfg, a), 1);
    cfg.dim = 64;
    EXPECT_EQ(cli::cmd_state("coherent:1.5", cfg, b), 0);
}

TEST(Executable, ExitCodes) {
    EXPECT_EQ(run_qpd("moment 1,1,1,2,1").status, 0);
    EXPECT_EQ(run_qpd("state fock:70 --dim 64").status, 2);
    EXPECT_EQ(run_qpd("dist fock:1 --s 1 --dim 32 --grid -4:4:33,-4:4:33").status, 2);
    EXPECT_EQ(run_qpd("state coherent:1.5 --dim 12").status, 1);
    EXPECT_NE(run_qpd("frobnicate").status, 0);
}

TEST(Executable, ConfigPrecedence) {
    const fs::path env_cfg = scratch("env.cfg"), file_cfg = scratch("file.cfg");
    std::ofstream(env_cfg) << "dim = 20\n";
    std::ofstream(file_cfg) << "dim = 24\n";
    const std::string env = "QPD_CONFIG=" + env_cfg.string();
    auto dim_of = [](const ProcessResult& r) { return json::parse(r.out)["dim"].get<int>(); };
    EXPECT_EQ(dim_of(run_qpd("state vacuum")), 64);
    EXPECT_EQ(dim_of(run_qpd("state vacuum", env)), 20);
    EXPECT_EQ(dim_of(run_qpd("--config " + file_cfg.string() + " state vacuum", env)), 24);
    EXPECT_EQ(dim_of(run_qpd("--config " + file_cfg.string() + " --dim 30 state vacuum", env)), 30);
}

TEST(Executable, AmplifyWritesBothGrids) {
    const fs::path out = scratch("amp.csv");
    const ProcessResult r = run_qpd("amplify coherent:0.5 --dim 30 --grid -6:6:81,-6:6:81 --channel gamma=0.1,n0=0,n1=1,t=1 --out " +
                          out.string());
    ASSERT_EQ(r.status, 0) << r.out;
    const QuasiDistribution in = load(scratch("amp_in.csv").string());
    const QuasiDistribution outd = load(scratch("amp_out.csv").string());
    EXPECT_NEAR(outd.grid.q_max / in.grid.q_max, std::exp(0.2), 1e-12);
    EXPECT_NEAR(outd.integral(), 1.0, 1e-6);
}
