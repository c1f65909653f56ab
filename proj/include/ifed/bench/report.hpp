#pragma once

#include "ifed/bench/config.hpp"
#include "ifed/fsi/timestepper.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace ifed::bench {

inline constexpr const char* csv_schema = "ifed.v1";

/// Area-weighted velocity error norms.
struct ErrorNorms
{
    double l1 = 0.0;
    double l2 = 0.0;
    double linf = 0.0;
};

/// One benchmark run. Everything except `timings`, `mass_solves` and
/// `mass_iterations` is deterministic for a given configuration.
struct BenchmarkRow
{
    std::string benchmark;
    std::string scheme;  // nodal | elemental | none
    std::string kernel;
    std::string element; // empty when there is no structure
    double mfac = 0.0;
    int n = 0;
    int nx = 0, ny = 0;
    double dx = 0.0, dt = 0.0, t_final = 0.0;
    std::size_t steps = 0;
    std::size_t dofs = 0; // structural nodes m
    std::size_t elements = 0;
    std::size_t interaction_points = 0; // at the final configuration
    ErrorNorms error{nan(), nan(), nan()};
    double qoi = nan();
    double reference = nan();
    std::string status = "ok";
    std::string config;

    PhaseTimings timings;
    std::size_t mass_solves = 0;
    std::size_t mass_iterations = 0;

    static double nan() { return std::numeric_limits<double>::quiet_NaN(); }
    bool ok() const { return status == "ok"; }
};

using BenchmarkReport = std::vector<BenchmarkRow>;

namespace detail {

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s)
    {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

inline std::string csv_number(double v) { return std::isnan(v) ? std::string() : format_number(v); }

template <class... T>
void csv_line(std::ostream& out, const T&... fields)
{
    bool first = true;
    ((out << (first ? "" : ",") << fields, first = false), ...);
    out << '\n';
}

} // namespace detail

inline constexpr const char* results_header = "schema,benchmark,scheme,kernel,element,mfac,n,nx,ny,dx,dt,t_final,steps,"
                                              "dofs,elements,interaction_points,l1,l2,linf,qoi,reference,status,config";

inline constexpr const char* timings_header = "schema,benchmark,scheme,element,mfac,n,steps,assembly,rule_update,"
                                              "projection,spreading,interpolation,fluid,coupling,total,"
                                              "mass_solves,mass_iterations";

inline void write_results_csv(std::ostream& out, const BenchmarkReport& report)
{
    using detail::csv_field, detail::csv_number;
    out << results_header << '\n';
    for (const auto& r : report)
        detail::csv_line(out, csv_schema, csv_field(r.benchmark), csv_field(r.scheme), csv_field(r.kernel),
                         csv_field(r.element), csv_number(r.mfac), r.n, r.nx, r.ny, csv_number(r.dx), csv_number(r.dt),
                         csv_number(r.t_final), r.steps, r.dofs, r.elements, r.interaction_points,
                         csv_number(r.error.l1), csv_number(r.error.l2), csv_number(r.error.linf), csv_number(r.qoi),
                         csv_number(r.reference), csv_field(r.status), csv_field(r.config));
}

/// Wall-clock timings live in their own file so the results file stays
/// byte-identical across reruns.
inline void write_timings_csv(std::ostream& out, const BenchmarkReport& report)
{
    using detail::csv_field, detail::csv_number;
    out << timings_header << '\n';
    for (const auto& r : report)
    {
        const PhaseTimings& t = r.timings;
        detail::csv_line(out, csv_schema, csv_field(r.benchmark), csv_field(r.scheme), csv_field(r.element),
                         csv_number(r.mfac), r.n, r.steps, csv_number(t.assembly), csv_number(t.rule_update),
                         csv_number(t.projection), csv_number(t.spreading), csv_number(t.interpolation),
                         csv_number(t.fluid), csv_number(t.coupling()), csv_number(t.total()), r.mass_solves,
                         r.mass_iterations);
    }
}

inline void write_csv_file(const std::string& path, const BenchmarkReport& report, bool timings)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    if (timings)
        write_timings_csv(out, report);
    else
        write_results_csv(out, report);
    if (!out) throw Error("write to '" + path + "' failed");
}

} // namespace ifed::bench
