#include "dbar/grid_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dbar/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "GRID writer assumes a little-endian host");

namespace dbar {

namespace {
constexpr char kMagic[4] = {'D', 'B', 'G', 'R'};

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v;
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw IoError("GRID file truncated");
    return v;
}
}  // namespace

void write_grid(const std::filesystem::path& path, const ComplexGrid& g) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os.write(kMagic, 4);
    put<std::uint32_t>(os, 1);
    put<std::uint32_t>(os, std::uint32_t(g.nx()));
    put<std::uint32_t>(os, std::uint32_t(g.nx()));
    put<double>(os, g.L());
    for (const cplx& v : g.samples()) {
        put<double>(os, v.real());
        put<double>(os, v.imag());
    }
    if (!os) throw IoError("write failed on " + path.string());
}

ComplexGrid read_grid(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError(path.string() + ": not a GRID file");
    const auto version = get<std::uint32_t>(is);
    if (version != 1) throw IoError(path.string() + ": unsupported GRID version");
    const auto nx = get<std::uint32_t>(is);
    const auto ny = get<std::uint32_t>(is);
    if (nx != ny) throw IoError(path.string() + ": GRID must be square");
    const double L = get<double>(is);
    ComplexGrid g(int(nx), L);
    for (cplx& v : g.samples()) {
        const double re = get<double>(is);
        const double im = get<double>(is);
        v = {re, im};
    }
    return g;
}

void write_boundary_csv(const std::filesystem::path& path, const std::vector<cplx>& values) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << "theta,re,im\n";
    os.precision(17);
    const std::size_t m = values.size();
    for (std::size_t j = 0; j < m; ++j) {
        const double theta = 2.0 * std::numbers::pi * double(j) / double(m);
        os << theta << ',' << values[j].real() << ',' << values[j].imag() << '\n';
    }
}

std::vector<cplx> read_boundary_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(is, line) || line.rfind("theta,re,im", 0) != 0)
        throw IoError(path.string() + ": missing theta,re,im header");
    std::vector<cplx> values;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        double theta, re, im;
        char c1, c2;
        if (!(ss >> theta >> c1 >> re >> c2 >> im) || c1 != ',' || c2 != ',')
            throw IoError(path.string() + ": malformed row '" + line + "'");
        values.push_back({re, im});
    }
    if (values.empty()) throw IoError(path.string() + ": no samples");
    return values;
}

}  // namespace dbar
