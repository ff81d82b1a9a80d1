#include "nomad/zipfile.hpp"

#include <array>
#include <cstdint>

#include "nomad/errors.hpp"

namespace nomad {

namespace {

constexpr std::uint32_t kLocalHeaderSig = 0x04034b50;
constexpr std::uint32_t kCentralHeaderSig = 0x02014b50;
constexpr std::uint32_t kEndRecordSig = 0x06054b50;

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(char(v & 0xff));
    out.push_back(char(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

std::uint16_t get_u16(std::string_view bytes, std::size_t off) {
    return std::uint16_t(std::uint8_t(bytes[off])) |
           (std::uint16_t(std::uint8_t(bytes[off + 1])) << 8);
}

std::uint32_t get_u32(std::string_view bytes, std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | std::uint8_t(bytes[off + std::size_t(i)]);
    return v;
}

const std::array<std::uint32_t, 256>& crc_table() {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) {
                c = (c & 1) ? 0xedb88320u ^ (c >> 1) : (c >> 1);
            }
            t[i] = c;
        }
        return t;
    }();
    return table;
}

} // namespace

std::uint32_t crc32_ieee(std::string_view bytes) {
    const auto& table = crc_table();
    std::uint32_t crc = 0xffffffffu;
    for (unsigned char c : bytes) {
        crc = table[(crc ^ c) & 0xff] ^ (crc >> 8);
    }
    return crc ^ 0xffffffffu;
}

std::string zip_pack(const std::vector<ZipEntry>& entries) {
    std::string out;
    struct CentralInfo {
        std::uint32_t crc;
        std::uint32_t size;
        std::uint32_t offset;
        std::string name;
    };
    std::vector<CentralInfo> infos;
    infos.reserve(entries.size());

    for (const auto& entry : entries) {
        CentralInfo info;
        info.crc = crc32_ieee(entry.bytes);
        info.size = std::uint32_t(entry.bytes.size());
        info.offset = std::uint32_t(out.size());
        info.name = entry.name;

        put_u32(out, kLocalHeaderSig);
        put_u16(out, 20);  // version needed
        put_u16(out, 0);   // flags
        put_u16(out, 0);   // method: stored
        put_u16(out, 0);   // mod time
        put_u16(out, 0);   // mod date
        put_u32(out, info.crc);
        put_u32(out, info.size);  // compressed
        put_u32(out, info.size);  // uncompressed
        put_u16(out, std::uint16_t(entry.name.size()));
        put_u16(out, 0);  // extra length
        out += entry.name;
        out += entry.bytes;
        infos.push_back(std::move(info));
    }

    const std::uint32_t central_start = std::uint32_t(out.size());
    for (const auto& info : infos) {
        put_u32(out, kCentralHeaderSig);
        put_u16(out, 20);  // version made by
        put_u16(out, 20);  // version needed
        put_u16(out, 0);
        put_u16(out, 0);
        put_u16(out, 0);
        put_u16(out, 0);
        put_u32(out, info.crc);
        put_u32(out, info.size);
        put_u32(out, info.size);
        put_u16(out, std::uint16_t(info.name.size()));
        put_u16(out, 0);  // extra
        put_u16(out, 0);  // comment
        put_u16(out, 0);  // disk number
        put_u16(out, 0);  // internal attrs
        put_u32(out, 0);  // external attrs
        put_u32(out, info.offset);
        out += info.name;
    }
    const std::uint32_t central_size = std::uint32_t(out.size()) - central_start;

    put_u32(out, kEndRecordSig);
    put_u16(out, 0);
    put_u16(out, 0);
    put_u16(out, std::uint16_t(infos.size()));
    put_u16(out, std::uint16_t(infos.size()));
    put_u32(out, central_size);
    put_u32(out, central_start);
    put_u16(out, 0);  // comment length
    return out;
}

std::vector<ZipEntry> zip_unpack(std::string_view bytes) {
    // Locate the end record (no archive comment is ever produced by our
    // writer, but tolerate a short one).
    if (bytes.size() < 22) {
        throw ProtocolError("zip payload too short");
    }
    std::size_t end_off = std::string_view::npos;
    const std::size_t scan_floor = bytes.size() >= 22 + 1024 ? bytes.size() - 22 - 1024 : 0;
    for (std::size_t i = bytes.size() - 22 + 1; i-- > scan_floor;) {
        if (get_u32(bytes, i) == kEndRecordSig) {
            end_off = i;
            break;
        }
    }
    if (end_off == std::string_view::npos) {
        throw ProtocolError("zip end record not found");
    }

    const std::uint16_t entry_count = get_u16(bytes, end_off + 10);
    std::uint32_t central_off = get_u32(bytes, end_off + 16);

    std::vector<ZipEntry> entries;
    for (std::uint16_t e = 0; e < entry_count; ++e) {
        if (central_off + 46 > bytes.size() || get_u32(bytes, central_off) != kCentralHeaderSig) {
            throw ProtocolError("zip central directory corrupt");
        }
        const std::uint16_t method = get_u16(bytes, central_off + 10);
        const std::uint32_t crc = get_u32(bytes, central_off + 16);
        const std::uint32_t size = get_u32(bytes, central_off + 24);
        const std::uint16_t name_len = get_u16(bytes, central_off + 28);
        const std::uint16_t extra_len = get_u16(bytes, central_off + 30);
        const std::uint16_t comment_len = get_u16(bytes, central_off + 32);
        const std::uint32_t local_off = get_u32(bytes, central_off + 42);
        if (method != 0) {
            throw ProtocolError("zip entry uses unsupported compression method " +
                                std::to_string(method));
        }
        if (central_off + 46 + name_len > bytes.size()) {
            throw ProtocolError("zip central directory truncated");
        }
        ZipEntry entry;
        entry.name = std::string(bytes.substr(central_off + 46, name_len));

        if (local_off + 30 > bytes.size() || get_u32(bytes, local_off) != kLocalHeaderSig) {
            throw ProtocolError("zip local header corrupt for " + entry.name);
        }
        const std::uint16_t local_name_len = get_u16(bytes, local_off + 26);
        const std::uint16_t local_extra_len = get_u16(bytes, local_off + 28);
        const std::size_t data_off = local_off + 30 + local_name_len + local_extra_len;
        if (data_off + size > bytes.size()) {
            throw ProtocolError("zip data truncated for " + entry.name);
        }
        entry.bytes = std::string(bytes.substr(data_off, size));
        if (crc32_ieee(entry.bytes) != crc) {
            throw ProtocolError("zip CRC mismatch for " + entry.name);
        }
        entries.push_back(std::move(entry));
        central_off += 46 + name_len + extra_len + comment_len;
    }
    return entries;
}

ZipEntry zip_unpack_single(std::string_view bytes) {
    auto entries = zip_unpack(bytes);
    if (entries.size() != 1) {
        throw ProtocolError("expected exactly one file in export archive, found " +
                            std::to_string(entries.size()));
    }
    return std::move(entries.front());
}

} // namespace nomad
