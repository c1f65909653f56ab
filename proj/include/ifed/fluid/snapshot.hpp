#pragma once

#include "ifed/fluid/mac_grid.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace ifed {

/// Grid snapshot: header (nx, ny, dx, origin, time) followed by u, v and p
/// interiors, each row-major with i fastest.
///
/// Text layout:
///   IFEDSNAP 1
///   nx ny dx ox oy time
///   u <(nx+1)*ny values>  one row per line
///   v <nx*(ny+1) values>
///   p <nx*ny values>
///
/// Binary layout (all little-endian): 8-byte magic "IFEDSNAP", uint32 version,
/// uint32 nx, uint32 ny, float64 dx, ox, oy, time, then float64 arrays u, v, p.
struct Snapshot
{
    MACGrid grid;
    double time = 0.0;
    StaggeredField u;
    CellField p;
};

namespace detail {

inline void write_array(std::ostream& os, const GridArray& a, int nx, int ny)
{
    for (int j = 0; j < ny; ++j)
    {
        for (int i = 0; i < nx; ++i) os << (i ? " " : "") << a(i, j);
        os << '\n';
    }
}

inline void read_array(std::istream& is, GridArray& a, int nx, int ny)
{
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            if (!(is >> a(i, j))) throw Error("truncated snapshot array");
}

template<class T>
void put_le(std::ostream& os, T v)
{
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template<class T>
T get_le(std::istream& is)
{
    unsigned char b[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) throw Error("truncated binary snapshot");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

} // namespace detail

inline void write_snapshot_text(std::ostream& os, const MACGrid& g, double t, const StaggeredField& u, const CellField& p)
{
    os << std::setprecision(17);
    os << "IFEDSNAP 1\n" << g.nx << ' ' << g.ny << ' ' << g.dx << ' ' << g.origin.x << ' ' << g.origin.y << ' ' << t << '\n';
    os << "u\n";
    detail::write_array(os, u[0], g.nx + 1, g.ny);
    os << "v\n";
    detail::write_array(os, u[1], g.nx, g.ny + 1);
    os << "p\n";
    detail::write_array(os, p, g.nx, g.ny);
}

inline Snapshot read_snapshot_text(std::istream& is)
{
    std::string magic, tag;
    int version = 0;
    is >> magic >> version;
    if (magic != "IFEDSNAP" || version != 1) throw Error("not an IFEDSNAP v1 text snapshot");
    int nx, ny;
    double dx, ox, oy, t;
    if (!(is >> nx >> ny >> dx >> ox >> oy >> t)) throw Error("bad snapshot header");
    Snapshot s{MACGrid(nx, ny, dx, {ox, oy}), t, {}, {}};
    s.u = StaggeredField(s.grid);
    s.p = make_cell_field(s.grid);
    const auto expect = [&](const char* name) {
        if (!(is >> tag) || tag != name) throw Error(std::string("expected snapshot block ") + name);
    };
    expect("u");
    detail::read_array(is, s.u[0], nx + 1, ny);
    expect("v");
    detail::read_array(is, s.u[1], nx, ny + 1);
    expect("p");
    detail::read_array(is, s.p, nx, ny);
    return s;
}

inline void write_snapshot_binary(std::ostream& os, const MACGrid& g, double t, const StaggeredField& u, const CellField& p)
{
    os.write("IFEDSNAP", 8);
    detail::put_le<std::uint32_t>(os, 1);
    detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.nx));
    detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.ny));
    for (double v : {g.dx, g.origin.x, g.origin.y, t}) detail::put_le(os, v);
    const auto dump = [&](const GridArray& a, int nx, int ny) {
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) detail::put_le(os, a(i, j));
    };
    dump(u[0], g.nx + 1, g.ny);
    dump(u[1], g.nx, g.ny + 1);
    dump(p, g.nx, g.ny);
}

inline Snapshot read_snapshot_binary(std::istream& is)
{
    char magic[8];
    if (!is.read(magic, 8) || std::string(magic, 8) != "IFEDSNAP") throw Error("not an IFEDSNAP binary snapshot");
    if (detail::get_le<std::uint32_t>(is) != 1) throw Error("unsupported snapshot version");
    const int nx = static_cast<int>(detail::get_le<std::uint32_t>(is));
    const int ny = static_cast<int>(detail::get_le<std::uint32_t>(is));
    const double dx = detail::get_le<double>(is), ox = detail::get_le<double>(is), oy = detail::get_le<double>(is);
    const double t = detail::get_le<double>(is);
    Snapshot s{MACGrid(nx, ny, dx, {ox, oy}), t, {}, {}};
    s.u = StaggeredField(s.grid);
    s.p = make_cell_field(s.grid);
    const auto load = [&](GridArray& a, int mx, int my) {
        for (int j = 0; j < my; ++j)
            for (int i = 0; i < mx; ++i) a(i, j) = detail::get_le<double>(is);
    };
    load(s.u[0], nx + 1, ny);
    load(s.u[1], nx, ny + 1);
    load(s.p, nx, ny);
    return s;
}

inline void write_snapshot_file(const std::string& path, const MACGrid& g, double t, const StaggeredField& u,
                                const CellField& p, bool binary)
{
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
    if (!os) throw Error("cannot open snapshot file " + path);
    if (binary)
        write_snapshot_binary(os, g, t, u, p);
    else
        write_snapshot_text(os, g, t, u, p);
    if (!os) throw Error("failed writing snapshot " + path);
}

} // namespace ifed
