#include "ifed/bench/registry.hpp"
#include "ifed/bench/checks.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

using namespace ifed;
using namespace ifed::bench;

namespace {

std::string results_csv(const BenchmarkReport& r)
{
    std::ostringstream os;
    write_results_csv(os, r);
    return os.str();
}

Parameters tiny_block()
{
    Parameters p;
    p.set("elements=4");
    p.set("t_final=0.5");
    p.set("load_time=0.25");
    p.set("dt_factor=0.01");
    return p;
}

Parameters tiny_channel(double mfac)
{
    Parameters p;
    p.set("n=32");
    p.set("t_final=0.05");
    p.set("mfac", mfac);
    return p;
}

} // namespace

TEST(Report, EmptyReportIsHeaderOnly)
{
    EXPECT_EQ(results_csv({}), std::string(results_header) + "\n");
    std::ostringstream os;
    write_timings_csv(os, {});
    EXPECT_EQ(os.str(), std::string(timings_header) + "\n");
}

TEST(Report, QuotesFieldsAndLeavesNanEmpty)
{
    BenchmarkRow r;
    r.benchmark = "x";
    r.status = "error: a, \"b\"";
    const std::string csv = results_csv({r});
    EXPECT_NE(csv.find("\"error: a, \"\"b\"\"\""), std::string::npos);
    EXPECT_NE(csv.find(",,,,"), std::string::npos); // error norms, qoi and reference are NaN
}

TEST(Parameters, OverridesAndRecording)
{
    Parameters p;
    p.set("channel_flow.n=32");
    p.set("mu", 0.5);
    EXPECT_EQ(p.integer("n", 64), 32);
    EXPECT_DOUBLE_EQ(p.number("mu", 0.01), 0.5);
    EXPECT_DOUBLE_EQ(p.number("rho", 2.0), 2.0); // default is recorded too
    EXPECT_EQ(p.canonical(), "mu=0.5;n=32;rho=2");
    EXPECT_NO_THROW(p.require_all_used());
    p.set("typo=1");
    EXPECT_THROW(p.require_all_used(), UnsupportedConfiguration);
    p.set("bad=abc");
    EXPECT_THROW(p.number("bad", 0.0), UnsupportedConfiguration);
    p.set("frac=1.5");
    EXPECT_THROW(p.integer("frac", 0), ContractViolation);
    EXPECT_THROW(p.set("no_equals"), ContractViolation);
}

TEST(Parameters, ShippedConfigsLoadEveryKey)
{
    for (const auto& b : benchmarks())
        for (const char* profile : {"desk", "full"})
        {
            Parameters p = Parameters::from_ini(default_config_path(b.name, IFED_CONFIG_DIR), profile);
            // a zero final time makes every benchmark return right after setup
            p.set("t_final=0");
            if (p.has("load_time"))
            {
                p.set("load_time=0");
                p.set("elements=4");
            }
            else
                p.set("n=32");
            EXPECT_NO_THROW(run_benchmark(b.name, p)) << b.name << " " << profile;
        }
}

TEST(GridSize, QuasiStaticFormulas)
{
    // block: N = ceil(2 M E_FAC M_FAC)
    EXPECT_EQ(static_grid_size(2.0, 8, ElementKind::Q1, 1.0), 16);
    EXPECT_EQ(static_grid_size(2.0, 8, ElementKind::Q2, 0.75), 24);
    EXPECT_EQ(static_grid_size(2.0, 12, ElementKind::Q1, 0.5), 12);
    // Cook: N = ceil(M E_FAC M_FAC 10 / 6.5)
    EXPECT_EQ(static_grid_size(10.0 / 6.5, 8, ElementKind::Q1, 1.0), 13);
    EXPECT_EQ(static_grid_size(10.0 / 6.5, 4, ElementKind::Q2, 1.5), 19);
    EXPECT_EQ(static_grid_size(10.0 / 6.5, 13, ElementKind::Q1, 1.0), 20); // exact product, no round-up
}

TEST(GridSize, StepCount)
{
    EXPECT_EQ(step_count(1.0, 0.1), 10u);
    EXPECT_EQ(step_count(1.0, 0.3), 4u);
    EXPECT_EQ(step_count(0.0, 0.1), 0u);
}

TEST(Benchmarks, ResultsAreByteIdenticalAcrossReruns)
{
    const auto a = run_sweep({{"compressed_block", tiny_block()}});
    const auto b = run_sweep({{"compressed_block", tiny_block()}});
    ASSERT_TRUE(a[0].row.ok()) << a[0].row.status;
    EXPECT_EQ(results_csv(rows_of(a)), results_csv(rows_of(b)));
    EXPECT_NE(a[0].row.qoi, 0.0);
}

TEST(Benchmarks, ZeroTractionGivesZeroDisplacement)
{
    Parameters p = tiny_block();
    p.set("traction=0");
    const RunOutput out = run_benchmark("compressed_block", p);
    EXPECT_EQ(out.row.qoi, 0.0);
}

TEST(Sweep, NineMeshFactorsPlusControl)
{
    std::vector<SweepJob> jobs;
    for (double m : {1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0, 4.0, 5.0}) jobs.push_back({"channel_flow", tiny_channel(m)});
    Parameters control;
    control.set("n=32");
    control.set("t_final=0.05");
    control.set("scheme=none");
    jobs.push_back({"channel_flow", control});
    const auto runs = run_sweep(jobs, 2);
    ASSERT_EQ(runs.size(), 10u);
    for (std::size_t k = 0; k < 9; ++k) EXPECT_TRUE(runs[k].row.ok()) << runs[k].row.status;
    EXPECT_DOUBLE_EQ(runs[0].row.mfac, 1.0);
    EXPECT_DOUBLE_EQ(runs[8].row.mfac, 5.0);
    EXPECT_EQ(runs[9].row.scheme, "none");
    std::string csv = results_csv(rows_of(runs));
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 11);
}

TEST(Sweep, FailuresBecomeRowsInOrder)
{
    Parameters bad = tiny_block();
    bad.set("elements=2"); // no facet inside the loaded width
    Parameters typo = tiny_block();
    typo.set("tracton=1");
    const auto runs = run_sweep({{"compressed_block", bad}, {"compressed_block", tiny_block()}, {"compressed_block", typo},
                                 {"no_such_benchmark", Parameters{}}});
    ASSERT_EQ(runs.size(), 4u);
    EXPECT_NE(runs[0].row.status.find("loaded width"), std::string::npos);
    EXPECT_TRUE(runs[1].row.ok());
    EXPECT_NE(runs[2].row.status.find("tracton"), std::string::npos);
    EXPECT_NE(runs[3].row.status.find("unknown benchmark"), std::string::npos);
    EXPECT_EQ(runs[3].row.benchmark, "no_such_benchmark");
}

TEST(Checks, SuitePassesWithDefaultSeed)
{
    for (const auto& c : run_property_checks()) EXPECT_TRUE(c.passed) << c.name << " value " << c.value;
}

TEST(Checks, TruncatedKernelBreaksMoments)
{
    std::mt19937_64 rng(1);
    EXPECT_LE(kernel_moment_error(KernelKind::BSpline3, rng, 64), 1e-13);
    EXPECT_GT(kernel_moment_error(KernelKind::BSpline3, rng, 64, true), 1e-3);
    EXPECT_GT(kernel_moment_error(KernelKind::PiecewiseLinear, rng, 64, true), 1e-3);
}

TEST(Checks, ForceProjectionStudyHalvesSpacing)
{
    const auto study = force_projection_study(4, 3);
    ASSERT_EQ(study.size(), 3u);
    EXPECT_EQ(study[2].n, 16);
    EXPECT_TRUE(std::isnan(study[0].order));
    EXPECT_GE(study[2].order, 0.9);
}
