#ifndef MEDSTREAM_CHECKPOINT_HPP
#define MEDSTREAM_CHECKPOINT_HPP

#include <cstdint>
#include <string>

#include "medstream/engine.hpp"

namespace medstream {

// Binary checkpoint: magic, format version, config block, state block, CRC-32
// trailer. Numbers are raw little-endian 64-bit IEEE doubles, so a
// save/load/save round trip is byte-identical and a resumed stream continues
// bit-exactly. The full byte layout is documented in the repository README.
inline constexpr char kCheckpointMagic[8] = {'M', 'D', 'S', 'T', 'R', 'M', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

// Writes to a temporary file and renames it into place, so a failed save
// never leaves a partial checkpoint behind.
void save_checkpoint(const StreamState& state, const std::string& path);

// Verifies magic, version and checksum before deserializing. Throws
// IntegrityError on corruption/truncation and on a version this build cannot
// migrate.
StreamState load_checkpoint(const std::string& path);

// CRC-32 (IEEE 802.3 polynomial), exposed for tests.
std::uint32_t crc32(const unsigned char* data, std::size_t size);

}  // namespace medstream

#endif  // MEDSTREAM_CHECKPOINT_HPP
