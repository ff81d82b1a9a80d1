#ifndef NOMAD_ZIPFILE_HPP
#define NOMAD_ZIPFILE_HPP

#include <string>
#include <string_view>
#include <vector>

namespace nomad {

struct ZipEntry {
    std::string name;
    std::string bytes;
};

// Minimal ZIP container support for the export protocol: entries are stored
// uncompressed (method 0) with CRC-32, a central directory, and an end
// record, which every standard unzip tool reads. The reader handles only
// stored entries — the mock platform and the real exports at this scale
// gain nothing from deflate.
std::string zip_pack(const std::vector<ZipEntry>& entries);

std::vector<ZipEntry> zip_unpack(std::string_view bytes);

// Unpacks and asserts the archive holds exactly one entry (protocol error
// otherwise).
ZipEntry zip_unpack_single(std::string_view bytes);

std::uint32_t crc32_ieee(std::string_view bytes);

} // namespace nomad

#endif
