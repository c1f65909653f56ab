#pragma once

#include "ifed/bench/channel_flow.hpp"
#include "ifed/bench/elastic_band.hpp"
#include "ifed/bench/static_benchmarks.hpp"

#include <array>
#include <atomic>
#include <exception>
#include <span>
#include <string_view>
#include <thread>

namespace ifed::bench {

struct BenchmarkInfo
{
    std::string_view name;
    RunOutput (*run)(Parameters);
    std::string_view summary;
};

inline std::span<const BenchmarkInfo> benchmarks()
{
    static constexpr std::array<BenchmarkInfo, 4> list{{
        {"channel_flow", run_channel_flow, "slanted channel between rigid tethered plates"},
        {"elastic_band", run_elastic_band, "pressure-loaded elastic band at rest"},
        {"compressed_block", run_compressed_block, "quasi-static compressed block"},
        {"cooks_membrane", run_cooks_membrane, "quasi-static Cook's membrane"},
    }};
    return list;
}

inline const BenchmarkInfo& find_benchmark(std::string_view name)
{
    for (const auto& b : benchmarks())
        if (b.name == name) return b;
    throw UnsupportedConfiguration("unknown benchmark '" + std::string(name) + "'");
}

inline RunOutput run_benchmark(std::string_view name, Parameters p) { return find_benchmark(name).run(std::move(p)); }

/// Default config file of a benchmark in the given directory.
inline std::string default_config_path(std::string_view name, const std::string& dir)
{
    return dir + "/" + std::string(name) + ".ini";
}

struct SweepJob
{
    std::string benchmark;
    Parameters params;
};

namespace detail {

/// Row for a run that threw: identifies the job and carries the error message.
inline RunOutput failed_run(const SweepJob& job, const std::string& message)
{
    Parameters p = job.params;
    RunOutput out;
    BenchmarkRow& r = out.row;
    r.benchmark = job.benchmark;
    r.scheme = p.text("scheme", "nodal");
    if (p.has("element")) r.element = p.text("element", "");
    if (p.has("kernel")) r.kernel = p.text("kernel", "");
    if (p.has("mfac")) r.mfac = p.number("mfac", 0.0);
    r.status = "error: " + message;
    r.config = p.canonical();
    return out;
}

} // namespace detail

/// Runs independent jobs on up to `workers` threads. Results come back in job
/// order; a job that throws yields a row whose status holds the message.
inline std::vector<RunOutput> run_sweep(const std::vector<SweepJob>& jobs, unsigned workers = 1)
{
    std::vector<RunOutput> out(jobs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k; (k = next++) < jobs.size();)
        {
            try
            {
                out[k] = run_benchmark(jobs[k].benchmark, jobs[k].params);
            }
            catch (const std::exception& e)
            {
                out[k] = detail::failed_run(jobs[k], e.what());
            }
        }
    };
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(jobs.size())));
    if (workers == 1)
    {
        work();
        return out;
    }
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    pool.clear();
    return out;
}

inline BenchmarkReport rows_of(const std::vector<RunOutput>& runs)
{
    BenchmarkReport r;
    r.reserve(runs.size());
    for (const auto& o : runs) r.push_back(o.row);
    return r;
}

} // namespace ifed::bench
