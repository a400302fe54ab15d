#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "robsub/types.hpp"

namespace robsub {

/// Header of a dataset.bin file. See docs/FORMATS.md for the byte layout.
struct DatasetHeader {
    std::uint64_t m = 0;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    std::string descriptor;
};

inline constexpr char kDatasetMagic[8] = {'R', 'S', 'U', 'B', 'D', 'A', 'T', '1'};
inline constexpr std::uint32_t kDatasetVersion = 1;

void write_dataset(const std::filesystem::path& path, const SnapshotMatrix& X, std::uint64_t seed,
                   const std::string& descriptor);

struct LoadedDataset {
    DatasetHeader header;
    SnapshotMatrix X;
};

LoadedDataset read_dataset(const std::filesystem::path& path);

/// One '0' or '1' per line, one line per snapshot.
void write_labels(const std::filesystem::path& path, const std::vector<bool>& flags);
std::vector<bool> read_labels(const std::filesystem::path& path);

/// One value per line, full precision.
void write_values(const std::filesystem::path& path, const std::vector<double>& values);
std::vector<double> read_values(const std::filesystem::path& path);

} // namespace robsub
