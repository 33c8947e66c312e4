#include "dissipwave/snapshot.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace dissipwave {

namespace {

constexpr std::array<char, 4> kMagic{'D', 'W', 'F', '1'};

template <typename T>
void put_le(std::ostream& out, T value) {
    static_assert(sizeof(T) == 4 || sizeof(T) == 8);
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    U bits;
    std::memcpy(&bits, &value, sizeof(T));
    std::array<char, sizeof(T)> bytes;
    for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
    out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    std::array<unsigned char, sizeof(T)> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (!in) throw std::runtime_error("snapshot: truncated file");
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(bytes[i]) << (8 * i);
    T value;
    std::memcpy(&value, &bits, sizeof(T));
    return value;
}

}  // namespace

void write_snapshot(std::ostream& out, const Field& field, double time) {
    const Grid& g = field.grid();
    out.write(kMagic.data(), kMagic.size());
    put_le(out, static_cast<std::uint32_t>(g.n_dims()));
    put_le(out, static_cast<std::uint32_t>(g.points_per_dim()));
    put_le(out, g.half_width());
    put_le(out, time);
    for (double v : field.values()) put_le(out, v);
    if (!out) throw std::runtime_error("snapshot: write failed");
}

void write_snapshot(const std::filesystem::path& path, const Field& field, double time) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("snapshot: cannot open " + path.string());
    write_snapshot(out, field, time);
}

Snapshot read_snapshot(std::istream& in) {
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw std::runtime_error("snapshot: bad magic");
    const auto n_dims = get_le<std::uint32_t>(in);
    const auto points = get_le<std::uint32_t>(in);
    const auto half_width = get_le<double>(in);
    const auto time = get_le<double>(in);
    Grid grid = [&] {
        try {
            return make_grid(static_cast<int>(n_dims), static_cast<int>(points), half_width);
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(std::string("snapshot: invalid grid header: ") + e.what());
        }
    }();
    std::vector<double> values(grid.size());
    for (auto& v : values) v = get_le<double>(in);
    return Snapshot{Field(grid, std::move(values)), time};
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("snapshot: cannot open " + path.string());
    return read_snapshot(in);
}

}  // namespace dissipwave
