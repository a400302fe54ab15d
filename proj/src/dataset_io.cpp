#include "robsub/dataset_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>

namespace robsub {

static_assert(std::endian::native == std::endian::little, "dataset I/O assumes a little-endian host");

namespace {

std::runtime_error io_error(const std::filesystem::path& path, const std::string& what) {
    return std::runtime_error(path.string() + ": " + what);
}

template <class T>
void put(std::ofstream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::ifstream& in, const std::filesystem::path& path) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw io_error(path, "truncated header");
    return value;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, mode | std::ios::trunc);
    if (!out) throw io_error(path, "cannot open for writing");
    return out;
}

} // namespace

void write_dataset(const std::filesystem::path& path, const SnapshotMatrix& X, std::uint64_t seed,
                   const std::string& descriptor) {
    std::ofstream out = open_out(path, std::ios::out | std::ios::binary);
    out.write(kDatasetMagic, sizeof(kDatasetMagic));
    put<std::uint32_t>(out, kDatasetVersion);
    put<std::uint32_t>(out, 0);
    put<std::uint64_t>(out, static_cast<std::uint64_t>(X.m()));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(X.n()));
    put<std::uint64_t>(out, seed);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(descriptor.size()));
    out.write(descriptor.data(), static_cast<std::streamsize>(descriptor.size()));
    // Column-major complex<double> is exactly interleaved (re, im) float64 pairs.
    const auto bytes = static_cast<std::streamsize>(X.data().size() * sizeof(std::complex<double>));
    out.write(reinterpret_cast<const char*>(X.data().data()), bytes);
    if (!out) throw io_error(path, "write failed");
}

LoadedDataset read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error(path, "cannot open for reading");
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kDatasetMagic, sizeof(magic)) != 0) throw io_error(path, "not a dataset file");
    const auto version = get<std::uint32_t>(in, path);
    if (version != kDatasetVersion) throw io_error(path, "unsupported dataset version " + std::to_string(version));
    (void)get<std::uint32_t>(in, path);
    DatasetHeader header;
    header.m = get<std::uint64_t>(in, path);
    header.n = get<std::uint64_t>(in, path);
    header.seed = get<std::uint64_t>(in, path);
    const auto len = get<std::uint32_t>(in, path);
    header.descriptor.resize(len);
    in.read(header.descriptor.data(), len);
    if (!in) throw io_error(path, "truncated descriptor");
    if (header.m == 0 || header.n == 0) throw io_error(path, "empty dataset");

    Eigen::MatrixXcd data(static_cast<Index>(header.m), static_cast<Index>(header.n));
    const auto bytes = static_cast<std::streamsize>(data.size() * sizeof(std::complex<double>));
    in.read(reinterpret_cast<char*>(data.data()), bytes);
    if (in.gcount() != bytes) throw io_error(path, "truncated sample data");
    return {std::move(header), SnapshotMatrix(std::move(data))};
}

void write_labels(const std::filesystem::path& path, const std::vector<bool>& flags) {
    std::ofstream out = open_out(path);
    for (bool f : flags) out << (f ? '1' : '0') << '\n';
    if (!out) throw io_error(path, "write failed");
}

std::vector<bool> read_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error(path, "cannot open for reading");
    std::vector<bool> flags;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line == "0") flags.push_back(false);
        else if (line == "1") flags.push_back(true);
        else throw io_error(path, "label lines must be 0 or 1, got '" + line + "'");
    }
    return flags;
}

void write_values(const std::filesystem::path& path, const std::vector<double>& values) {
    std::ofstream out = open_out(path);
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (double v : values) out << v << '\n';
    if (!out) throw io_error(path, "write failed");
}

std::vector<double> read_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error(path, "cannot open for reading");
    std::vector<double> values;
    double v;
    while (in >> v) values.push_back(v);
    if (!in.eof()) throw io_error(path, "malformed numeric value");
    return values;
}

} // namespace robsub
