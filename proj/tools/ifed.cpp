#include "ifed/bench/registry.hpp"
#include "ifed/bench/checks.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

using namespace ifed;
using namespace ifed::bench;
namespace fs = std::filesystem;

namespace {

struct RunFlags
{
    std::string benchmark;
    std::string profile = "desk";
    std::string config;
    std::string scheme, element, kernel;
    double mfac = 0.0;
    int n = 0;
    std::vector<std::string> overrides;
    std::string out;
    bool binary_snapshot = false;
    unsigned jobs = 1;
};

bool is_quasi_static(std::string_view b) { return b == "compressed_block" || b == "cooks_membrane"; }

/// Config section, then the explicit flags, then --set overrides.
Parameters load_parameters(const RunFlags& f)
{
    find_benchmark(f.benchmark);
    const std::string path = f.config.empty() ? default_config_path(f.benchmark, IFED_CONFIG_DIR) : f.config;
    Parameters p;
    if (fs::exists(path))
        p = Parameters::from_ini(path, f.profile);
    else if (!f.config.empty())
        throw Error("config file '" + path + "' does not exist");
    if (!f.scheme.empty()) p.set("scheme", f.scheme);
    if (!f.element.empty()) p.set("element", f.element);
    if (!f.kernel.empty()) p.set("kernel", f.kernel);
    if (f.mfac > 0.0) p.set("mfac", f.mfac);
    // the quasi-static grids follow from the element count
    if (f.n > 0) p.set(is_quasi_static(f.benchmark) ? "elements" : "n", double(f.n));
    for (const auto& s : f.overrides) p.set(s);
    return p;
}

void add_common(CLI::App* cmd, RunFlags& f)
{
    cmd->add_option("benchmark", f.benchmark, "channel_flow | elastic_band | compressed_block | cooks_membrane")
        ->required();
    cmd->add_option("--profile", f.profile, "config section (desk or full)")->capture_default_str();
    cmd->add_option("--config", f.config, "INI file (default: the shipped config of the benchmark)");
    cmd->add_option("--scheme", f.scheme, "nodal | elemental | none (channel control)");
    cmd->add_option("--elem", f.element, "p1 | q1 | p2 | q2");
    cmd->add_option("--kernel", f.kernel, "bspline3 | piecewise_linear");
    cmd->add_option("--n", f.n, "grid cells across L (channel, band) or elements M (block, Cook)");
    cmd->add_option("--set", f.overrides, "extra key=value parameter, repeatable");
    cmd->add_option("--out", f.out, "output directory for CSV files");
}

void print_row(const BenchmarkRow& r)
{
    std::printf("%-16s %-9s %-4s mfac=%-5s n=%-4d dofs=%-6zu steps=%-7zu l1=%-11.4e l2=%-11.4e linf=%-11.4e qoi=%-12.6g "
                "t=%.1fs %s\n",
                r.benchmark.c_str(), r.scheme.c_str(), r.element.c_str(), format_number(r.mfac).c_str(), r.n, r.dofs,
                r.steps, r.error.l1, r.error.l2, r.error.linf, r.qoi, r.timings.total(), r.status.c_str());
}

void write_outputs(const std::string& dir, const std::string& stem, const std::vector<RunOutput>& runs,
                   bool binary_snapshot)
{
    if (dir.empty()) return;
    fs::create_directories(dir);
    const BenchmarkReport report = rows_of(runs);
    write_csv_file(dir + "/" + stem + "_results.csv", report, false);
    write_csv_file(dir + "/" + stem + "_timings.csv", report, true);
    for (std::size_t k = 0; k < runs.size(); ++k)
    {
        const std::string tag = runs.size() == 1 ? stem : stem + "_" + std::to_string(k);
        if (!runs[k].history.empty()) write_history_csv(dir + "/" + tag + "_history.csv", runs[k].history);
        if (const auto& s = runs[k].snapshot)
            write_snapshot_file(dir + "/" + tag + (binary_snapshot ? ".snap" : ".snap.txt"), s->grid, s->time, s->u,
                                s->p, binary_snapshot);
    }
}

std::vector<double> parse_list(const std::string& s)
{
    std::vector<double> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(std::stod(item));
    return out;
}

std::vector<std::string> split(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(item);
    return out;
}

int run_one(const RunFlags& f)
{
    const Parameters p = load_parameters(f);
    const auto runs = run_sweep({{f.benchmark, p}});
    print_row(runs[0].row);
    write_outputs(f.out, f.benchmark, runs, f.binary_snapshot);
    return runs[0].row.ok() ? 0 : 1;
}

int run_many(const RunFlags& f, const std::string& mfacs, const std::string& schemes, const std::string& sizes,
             bool control)
{
    const Parameters base = load_parameters(f);
    std::vector<double> mlist = parse_list(mfacs);
    std::vector<double> nlist = parse_list(sizes);
    std::vector<std::string> slist = split(schemes);
    if (mlist.empty()) mlist.push_back(0.0);
    if (nlist.empty()) nlist.push_back(0.0);
    if (slist.empty()) slist.push_back("");

    std::vector<SweepJob> jobs;
    const std::string size_key = is_quasi_static(f.benchmark) ? "elements" : "n";
    for (const auto& scheme : slist)
        for (double n : nlist)
            for (double m : mlist)
            {
                Parameters p = base;
                if (!scheme.empty()) p.set("scheme", scheme);
                if (n > 0.0) p.set(size_key, n);
                if (m > 0.0) p.set("mfac", m);
                jobs.push_back({f.benchmark, p});
            }
    if (control && f.benchmark == "channel_flow")
        for (double n : nlist)
        {
            Parameters p = base;
            p.set("scheme", "none");
            if (n > 0.0) p.set("n", n);
            for (const char* k : {"mfac", "element", "kernel", "c_a"}) p.erase(k);
            jobs.push_back({f.benchmark, p});
        }

    const auto runs = run_sweep(jobs, f.jobs);
    bool ok = true;
    for (const auto& r : runs)
    {
        print_row(r.row);
        ok = ok && r.row.ok();
    }
    write_outputs(f.out, f.benchmark + "_sweep", runs, f.binary_snapshot);
    return ok ? 0 : 1;
}

int verify(std::uint64_t seed)
{
    const CheckReport report = run_property_checks(seed);
    for (const auto& c : report)
        std::printf("%s  %-32s value=%-12.4e bound=%-8.1e %.3fs  %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                    c.value, c.threshold, c.seconds, c.detail.c_str());
    return all_passed(report) ? 0 : 1;
}

int convergence(int n0, int levels, const std::string& out)
{
    const auto study = force_projection_study(n0, levels);
    std::printf("%6s %10s %8s %14s %8s\n", "n", "h", "nodes", "max_error", "order");
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& lv : study)
    {
        std::printf("%6d %10.4g %8zu %14.6e %8.3f\n", lv.n, lv.h, lv.nodes, lv.error, lv.order);
        if (!std::isnan(lv.order)) worst = std::min(worst, lv.order);
    }
    if (!out.empty())
    {
        fs::create_directories(out);
        std::ofstream csv(out + "/force_projection.csv", std::ios::binary);
        csv << "schema,n,h,nodes,max_error,order\n";
        for (const auto& lv : study)
            csv << csv_schema << ',' << lv.n << ',' << format_number(lv.h) << ',' << lv.nodes << ','
                << format_number(lv.error) << ',' << (std::isnan(lv.order) ? std::string() : format_number(lv.order))
                << '\n';
    }
    return worst >= 0.9 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"2D immersed finite element / finite difference benchmarks"};
    app.require_subcommand(1);

    app.add_subcommand("list", "list the benchmarks");

    RunFlags run;
    auto* run_cmd = app.add_subcommand("run", "run one benchmark configuration");
    add_common(run_cmd, run);
    run_cmd->add_option("--mfac", run.mfac, "mesh factor M_FAC");
    run_cmd->add_flag("--binary-snapshot", run.binary_snapshot, "write the final grid state in binary");

    RunFlags sweep;
    std::string mfac_list, scheme_list, n_list;
    bool no_control = false;
    auto* sweep_cmd = app.add_subcommand("sweep", "run a grid of configurations");
    add_common(sweep_cmd, sweep);
    sweep_cmd->add_option("--mfac-list", mfac_list, "comma-separated M_FAC values");
    sweep_cmd->add_option("--schemes", scheme_list, "comma-separated schemes (default: config value)");
    sweep_cmd->add_option("--n-list", n_list, "comma-separated --n values");
    sweep_cmd->add_option("--jobs", sweep.jobs, "worker threads")->capture_default_str();
    sweep_cmd->add_flag("--no-control", no_control, "skip the fluid-only channel control row");
    sweep_cmd->add_flag("--binary-snapshot", sweep.binary_snapshot, "write final grid states in binary");

    std::uint64_t seed = default_check_seed;
    auto* verify_cmd = app.add_subcommand("verify", "run the discrete property checks");
    verify_cmd->add_option("--seed", seed, "random seed")->capture_default_str();

    std::string study;
    int n0 = 8, levels = 3;
    std::string conv_out;
    auto* conv_cmd = app.add_subcommand("convergence", "refinement studies");
    conv_cmd->add_option("study", study, "force-projection")->required()->check(CLI::IsMember({"force-projection"}));
    conv_cmd->add_option("--n0", n0, "coarsest elements per side")->capture_default_str();
    conv_cmd->add_option("--levels", levels, "number of meshes")->capture_default_str();
    conv_cmd->add_option("--out", conv_out, "output directory for the CSV");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (app.got_subcommand("list"))
        {
            for (const auto& b : benchmarks())
                std::printf("%-18s %s\n", std::string(b.name).c_str(), std::string(b.summary).c_str());
            return 0;
        }
        if (app.got_subcommand(run_cmd)) return run_one(run);
        if (app.got_subcommand(sweep_cmd)) return run_many(sweep, mfac_list, scheme_list, n_list, !no_control);
        if (app.got_subcommand(verify_cmd)) return verify(seed);
        if (app.got_subcommand(conv_cmd)) return convergence(n0, levels, conv_out);
    }
    catch (const std::exception& e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}
