#include "magschro/snapshot.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>

namespace magschro {

namespace {

void put_le(std::ostream& os, double v) {
    std::uint64_t b;
    std::memcpy(&b, &v, 8);
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(b >> (8 * i));
    os.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_le(std::istream& is) {
    unsigned char bytes[8];
    is.read(reinterpret_cast<char*>(bytes), 8);
    if (!is) throw InvalidArgument("snapshot truncated");
    std::uint64_t b = 0;
    for (int i = 0; i < 8; ++i) b |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    double v;
    std::memcpy(&v, &b, 8);
    return v;
}

}  // namespace

void write_snapshot(const std::string& path, const SnapshotHeader& h, std::span<const cplx> data) {
    if (data.size() != h.grid.size()) throw InvalidArgument("snapshot data does not match grid");
    nlohmann::json j;
    j["format"] = "magschro-field-1";
    j["n"] = h.grid.dim;
    j["N"] = h.grid.points;
    j["L"] = h.grid.length;
    j["dt"] = h.grid.dt;
    j["T"] = h.grid.final_time;
    j["slice"] = h.slice;
    j["t"] = h.time;
    j["extra"] = nlohmann::json::parse(h.extra);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidArgument("cannot open snapshot for writing: " + path);
    os << j.dump() << '\n';
    for (auto z : data) {
        put_le(os, z.real());
        put_le(os, z.imag());
    }
}

ComplexField read_snapshot(const std::string& path, SnapshotHeader* out) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidArgument("cannot open snapshot: " + path);
    std::string line;
    std::getline(is, line);
    auto j = nlohmann::json::parse(line);
    if (j.value("format", "") != "magschro-field-1") throw InvalidArgument("not a field snapshot: " + path);
    SnapshotHeader h;
    h.grid = Grid{j["n"].get<int>(), j["N"].get<int>(), j["L"].get<double>(), j["dt"].get<double>(),
                  j["T"].get<double>()};
    h.slice = j["slice"].get<std::size_t>();
    h.time = j["t"].get<double>();
    h.extra = j["extra"].dump();
    ComplexField data(h.grid.size());
    for (auto& z : data) {
        double re = get_le(is);
        double im = get_le(is);
        z = {re, im};
    }
    if (out) *out = h;
    return data;
}

}  // namespace magschro
