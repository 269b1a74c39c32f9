#pragma once

// Field snapshot format (text, bit-exact round trip):
//   # L=<decimal>
//   # K=<int>
//   # version=1
//   j,<17-significant-digit decimal>    (one line per coefficient)

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sks/field.hpp"

namespace sks {

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_snapshot(std::ostream& os, const SpectralField& f, double L) {
    os << "# L=" << format_g17(L) << "\n";
    os << "# K=" << f.pairs() << "\n";
    os << "# version=1\n";
    for (int j = 1; j <= f.size(); ++j) os << j << "," << format_g17(f.coeff(j)) << "\n";
}

struct Snapshot {
    SpectralField field;
    double L = 0.0;
};

inline Snapshot read_snapshot(std::istream& is) {
    std::string line;
    double L = 0.0;
    int K = 0;
    int version = 0;
    for (int i = 0; i < 3; ++i) {
        if (!std::getline(is, line)) throw std::runtime_error("snapshot: truncated header");
        if (line.rfind("# L=", 0) == 0) L = std::stod(line.substr(4));
        else if (line.rfind("# K=", 0) == 0) K = std::stoi(line.substr(4));
        else if (line.rfind("# version=", 0) == 0) version = std::stoi(line.substr(10));
        else throw std::runtime_error("snapshot: unexpected header line: " + line);
    }
    if (version != 1) throw std::runtime_error("snapshot: unsupported version");
    if (K < 1 || !(L > 0.0)) throw std::runtime_error("snapshot: invalid header");
    SpectralField f(K);
    for (int j = 1; j <= 2 * K; ++j) {
        if (!std::getline(is, line)) throw std::runtime_error("snapshot: truncated body");
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("snapshot: malformed line: " + line);
        if (std::stoi(line.substr(0, comma)) != j)
            throw std::runtime_error("snapshot: out-of-order coefficient index");
        f.coeff(j) = std::stod(line.substr(comma + 1));
    }
    return {f, L};
}

}  // namespace sks
