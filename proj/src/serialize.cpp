#include "ttkry/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace ttkry {

namespace {

constexpr char kMagic[8] = {'T', 'T', 'K', 'R', 'Y', 'B', 'I', 'N'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint8_t kKindTensor = 0;
constexpr std::uint8_t kKindMatrix = 1;

template <class T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        auto bytes = std::bit_cast<std::array<std::uint8_t, sizeof(T)>>(v);
        std::reverse(bytes.begin(), bytes.end());
        return std::bit_cast<T>(bytes);
    }
}

template <class T>
void write_scalar(std::ostream& os, T v) {
    const T le = to_little(v);
    os.write(reinterpret_cast<const char*>(&le), sizeof(T));
}

template <class T>
T read_scalar(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("tt load: truncated stream");
    return to_little(v);
}

void write_doubles(std::ostream& os, const std::vector<double>& data) {
    if constexpr (std::endian::native == std::endian::little) {
        os.write(reinterpret_cast<const char*>(data.data()),
                 static_cast<std::streamsize>(data.size() * sizeof(double)));
    } else {
        for (double v : data) write_scalar(os, std::bit_cast<std::uint64_t>(v));
    }
}

void read_doubles(std::istream& is, std::vector<double>& data) {
    if constexpr (std::endian::native == std::endian::little) {
        is.read(reinterpret_cast<char*>(data.data()),
                static_cast<std::streamsize>(data.size() * sizeof(double)));
        if (!is) throw std::runtime_error("tt load: truncated stream");
    } else {
        for (auto& v : data) v = std::bit_cast<double>(read_scalar<std::uint64_t>(is));
    }
}

void write_header(std::ostream& os, std::uint8_t kind, Index d) {
    os.write(kMagic, sizeof(kMagic));
    write_scalar<std::uint32_t>(os, kVersion);
    write_scalar<std::uint8_t>(os, kind);
    write_scalar<std::uint32_t>(os, static_cast<std::uint32_t>(d));
}

std::pair<std::uint8_t, Index> read_header(std::istream& is) {
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("tt load: bad magic");
    const auto version = read_scalar<std::uint32_t>(is);
    if (version != kVersion)
        throw std::runtime_error("tt load: unsupported version " + std::to_string(version));
    const auto kind = read_scalar<std::uint8_t>(is);
    const auto d = read_scalar<std::uint32_t>(is);
    if (d == 0) throw std::runtime_error("tt load: zero dimension");
    return {kind, static_cast<Index>(d)};
}

}  // namespace

void save_tt(std::ostream& os, const TTTensor& t) {
    if (auto err = validate(t)) throw std::invalid_argument("save_tt: " + *err);
    write_header(os, kKindTensor, t.dim());
    for (const auto& c : t.cores) write_scalar<std::uint64_t>(os, static_cast<std::uint64_t>(c.n));
    write_scalar<std::uint64_t>(os, 1);
    for (const auto& c : t.cores)
        write_scalar<std::uint64_t>(os, static_cast<std::uint64_t>(c.r_right));
    for (const auto& c : t.cores) write_doubles(os, c.data);
    if (!os) throw std::runtime_error("save_tt: write failed");
}

TTTensor load_tt(std::istream& is) {
    auto [kind, d] = read_header(is);
    if (kind != kKindTensor) throw std::runtime_error("load_tt: not a tensor file");
    std::vector<Index> sizes(static_cast<std::size_t>(d));
    for (auto& n : sizes) n = static_cast<Index>(read_scalar<std::uint64_t>(is));
    std::vector<Index> ranks(static_cast<std::size_t>(d) + 1);
    for (auto& r : ranks) r = static_cast<Index>(read_scalar<std::uint64_t>(is));
    std::vector<Core3> cores;
    cores.reserve(static_cast<std::size_t>(d));
    for (Index k = 0; k < d; ++k) {
        Core3 c(ranks[static_cast<std::size_t>(k)], sizes[static_cast<std::size_t>(k)],
                ranks[static_cast<std::size_t>(k) + 1]);
        read_doubles(is, c.data);
        cores.push_back(std::move(c));
    }
    TTTensor t(std::move(cores));
    if (auto err = validate(t)) throw std::runtime_error("load_tt: invalid data: " + *err);
    return t;
}

void save_tt_matrix(std::ostream& os, const TTMatrix& a) {
    if (auto err = validate(a)) throw std::invalid_argument("save_tt_matrix: " + *err);
    write_header(os, kKindMatrix, a.dim());
    for (const auto& c : a.cores) write_scalar<std::uint64_t>(os, static_cast<std::uint64_t>(c.m));
    for (const auto& c : a.cores) write_scalar<std::uint64_t>(os, static_cast<std::uint64_t>(c.n));
    write_scalar<std::uint64_t>(os, 1);
    for (const auto& c : a.cores)
        write_scalar<std::uint64_t>(os, static_cast<std::uint64_t>(c.r_right));
    for (const auto& c : a.cores) write_doubles(os, c.data);
    if (!os) throw std::runtime_error("save_tt_matrix: write failed");
}

TTMatrix load_tt_matrix(std::istream& is) {
    auto [kind, d] = read_header(is);
    if (kind != kKindMatrix) throw std::runtime_error("load_tt_matrix: not an operator file");
    std::vector<Index> rows(static_cast<std::size_t>(d)), cols(static_cast<std::size_t>(d));
    for (auto& n : rows) n = static_cast<Index>(read_scalar<std::uint64_t>(is));
    for (auto& n : cols) n = static_cast<Index>(read_scalar<std::uint64_t>(is));
    std::vector<Index> ranks(static_cast<std::size_t>(d) + 1);
    for (auto& r : ranks) r = static_cast<Index>(read_scalar<std::uint64_t>(is));
    std::vector<Core4> cores;
    cores.reserve(static_cast<std::size_t>(d));
    for (Index k = 0; k < d; ++k) {
        Core4 c(ranks[static_cast<std::size_t>(k)], rows[static_cast<std::size_t>(k)],
                cols[static_cast<std::size_t>(k)], ranks[static_cast<std::size_t>(k) + 1]);
        read_doubles(is, c.data);
        cores.push_back(std::move(c));
    }
    TTMatrix a(std::move(cores));
    if (auto err = validate(a)) throw std::runtime_error("load_tt_matrix: invalid data: " + *err);
    return a;
}

namespace {
std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    return os;
}
std::ifstream open_in(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    return is;
}
}  // namespace

void save_tt(const std::string& path, const TTTensor& t) {
    auto os = open_out(path);
    save_tt(os, t);
}

TTTensor load_tt_file(const std::string& path) {
    auto is = open_in(path);
    return load_tt(is);
}

void save_tt_matrix(const std::string& path, const TTMatrix& a) {
    auto os = open_out(path);
    save_tt_matrix(os, a);
}

TTMatrix load_tt_matrix_file(const std::string& path) {
    auto is = open_in(path);
    return load_tt_matrix(is);
}

}  // namespace ttkry
