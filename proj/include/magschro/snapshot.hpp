#pragma once

#include "magschro/grid.hpp"

#include <string>

namespace magschro {

// One JSON header line, then size() pairs of little-endian doubles (re, im).
struct SnapshotHeader {
    Grid grid;
    std::size_t slice = 0;
    double time = 0.0;
    // Free-form JSON object text, e.g. {"xi":[1.0,0.0]} for phase fields.
    std::string extra = "{}";
};

void write_snapshot(const std::string& path, const SnapshotHeader& header, std::span<const cplx> data);
ComplexField read_snapshot(const std::string& path, SnapshotHeader* header = nullptr);

}  // namespace magschro
