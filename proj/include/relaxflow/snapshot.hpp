#pragma once

// State snapshot container. Layout (little-endian, documented in README):
//   bytes 0..7   magic "RFSNAP01"
//   u32          n            grid points per dimension
//   u8           has_U        1 if the tensor flux is stored
//   u8           friction
//   u16          reserved (0)
//   f64          t, epsilon, delta, a
//   f64[n*n]     p            row-major samples, x1 outer
//   f64[2*n*n]   u1, u2
//   f64[4*n*n]   U11, U12, U21, U22   (only if has_U)

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "relaxflow/model.hpp"

namespace relaxflow {

namespace detail {
inline constexpr char kSnapMagic[8] = {'R', 'F', 'S', 'N', 'A', 'P', '0', '1'};
}

inline void write_snapshot(const std::string& path, const SystemState& s,
                           const RelaxParams& params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open snapshot for writing: " + path);
    out.write(detail::kSnapMagic, 8);
    const uint32_t n = static_cast<uint32_t>(s.grid().n());
    const uint8_t has_U = s.U ? 1 : 0;
    const uint8_t fric = params.friction ? 1 : 0;
    const uint16_t reserved = 0;
    out.write(reinterpret_cast<const char*>(&n), 4);
    out.write(reinterpret_cast<const char*>(&has_U), 1);
    out.write(reinterpret_cast<const char*>(&fric), 1);
    out.write(reinterpret_cast<const char*>(&reserved), 2);
    const double header[4] = {s.t, params.epsilon, params.delta, params.a};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    auto dump = [&](const double* d, size_t count) {
        out.write(reinterpret_cast<const char*>(d), static_cast<std::streamsize>(count * 8));
    };
    dump(s.p.values(0), s.grid().npoints());
    for (int c = 0; c < 2; ++c) dump(s.u.values(c), s.grid().npoints());
    if (s.U)
        for (int c = 0; c < 4; ++c) dump(s.U->values(c), s.grid().npoints());
    if (!out) throw std::runtime_error("snapshot write failed: " + path);
}

struct Snapshot {
    SystemState state;
    RelaxParams params;
};

inline Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open snapshot: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, detail::kSnapMagic, 8) != 0)
        throw std::runtime_error("not a relaxflow snapshot: " + path);
    uint32_t n = 0;
    uint8_t has_U = 0, fric = 0;
    uint16_t reserved = 0;
    in.read(reinterpret_cast<char*>(&n), 4);
    in.read(reinterpret_cast<char*>(&has_U), 1);
    in.read(reinterpret_cast<char*>(&fric), 1);
    in.read(reinterpret_cast<char*>(&reserved), 2);
    double header[4];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!in) throw std::runtime_error("truncated snapshot header: " + path);
    TorusGrid grid(static_cast<int>(n));
    auto load = [&](int nc) {
        std::vector<double> v(static_cast<size_t>(nc) * grid.npoints());
        in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * 8));
        if (!in) throw std::runtime_error("truncated snapshot data: " + path);
        return v;
    };
    Snapshot snap;
    snap.state.t = header[0];
    snap.params.epsilon = header[1];
    snap.params.delta = header[2];
    snap.params.a = header[3];
    snap.params.friction = fric != 0;
    snap.state.p = ScalarField::from_values(grid, load(1));
    snap.state.u = VectorField::from_values(grid, load(2));
    if (has_U) snap.state.U = TensorField::from_values(grid, load(4));
    return snap;
}

}  // namespace relaxflow
