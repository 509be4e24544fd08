#include "nscert/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace nscert {

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian; byte swapping not implemented");

namespace {

constexpr char kMagic[4] = {'N', 'S', 'C', 'F'};

struct Header {
    std::uint32_t version;
    std::uint32_t n;
    double box_length;
    double time;
    std::uint32_t components;
};

void write_header(std::ofstream& out, const Header& h) {
    out.write(kMagic, 4);
    out.write(reinterpret_cast<const char*>(&h.version), 4);
    out.write(reinterpret_cast<const char*>(&h.n), 4);
    out.write(reinterpret_cast<const char*>(&h.box_length), 8);
    out.write(reinterpret_cast<const char*>(&h.time), 8);
    out.write(reinterpret_cast<const char*>(&h.components), 4);
}

Header read_header(std::ifstream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("snapshot: bad magic");
    Header h{};
    in.read(reinterpret_cast<char*>(&h.version), 4);
    in.read(reinterpret_cast<char*>(&h.n), 4);
    in.read(reinterpret_cast<char*>(&h.box_length), 8);
    in.read(reinterpret_cast<char*>(&h.time), 8);
    in.read(reinterpret_cast<char*>(&h.components), 4);
    if (!in) throw std::runtime_error("snapshot: truncated header");
    if (h.version != kSnapshotVersion) throw std::runtime_error("snapshot: unsupported version");
    return h;
}

void write_component(std::ofstream& out, const SpectralArray& a) {
    out.write(reinterpret_cast<const char*>(a.data()),
              std::streamsize(a.size() * sizeof(Complex)));
}

void read_component(std::ifstream& in, SpectralArray& a) {
    in.read(reinterpret_cast<char*>(a.data()), std::streamsize(a.size() * sizeof(Complex)));
    if (!in) throw std::runtime_error("snapshot: truncated payload");
}

} // namespace

void write_snapshot(const std::string& path, const SpectralVelocityField& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("snapshot: cannot open " + path);
    write_header(out, {kSnapshotVersion, std::uint32_t(f.grid.n), f.grid.box_length, f.time_tag, 3});
    for (const auto& c : f.coeffs) write_component(out, c);
    if (!out) throw std::runtime_error("snapshot: write failed for " + path);
}

SpectralVelocityField read_velocity_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("snapshot: cannot open " + path);
    const Header h = read_header(in);
    if (h.components != 3) throw std::runtime_error("snapshot: expected 3 components");
    SpectralVelocityField f(Grid(int(h.n), h.box_length));
    f.time_tag = h.time;
    for (auto& c : f.coeffs) read_component(in, c);
    return f;
}

void write_snapshot(const std::string& path, const ScalarField& f, double time) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("snapshot: cannot open " + path);
    write_header(out, {kSnapshotVersion, std::uint32_t(f.grid.n), f.grid.box_length, time, 1});
    write_component(out, f.coeffs);
    if (!out) throw std::runtime_error("snapshot: write failed for " + path);
}

ScalarField read_scalar_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("snapshot: cannot open " + path);
    const Header h = read_header(in);
    if (h.components != 1) throw std::runtime_error("snapshot: expected 1 component");
    ScalarField f(Grid(int(h.n), h.box_length));
    read_component(in, f.coeffs);
    return f;
}

} // namespace nscert
