#include "mixcomp/packet_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace mixcomp {

namespace {

std::uint8_t alphabet_flag(std::uint32_t a) {
    if (a == 256) return 0;
    for (std::uint8_t e = 1; e <= 8; ++e)
        if ((1u << e) == a) return e;
    throw std::invalid_argument("packet file: alphabet size must be a power of two in [2, 256]");
}

std::uint32_t alphabet_from_flag(std::uint8_t flag, std::uint64_t offset) {
    if (flag == 0) return 256;
    if (flag >= 1 && flag <= 8) return 1u << flag;
    throw TraceFormatError("bad alphabet flag " + std::to_string(int(flag)) + " at offset " +
                           std::to_string(offset));
}

void put_u32(std::ostream& out, std::uint32_t v) {
    char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff), char((v >> 24) & 0xff)};
    out.write(b, 4);
}

void put_i32(std::ostream& out, std::int32_t v) { put_u32(out, static_cast<std::uint32_t>(v)); }

struct Reader {
    std::istream& in;
    std::uint64_t offset = 0;

    void read(char* dst, std::size_t len, const char* what) {
        in.read(dst, static_cast<std::streamsize>(len));
        if (static_cast<std::size_t>(in.gcount()) != len)
            throw TraceFormatError(std::string("truncated file reading ") + what + " at offset " +
                                   std::to_string(offset));
        offset += len;
    }
    std::uint32_t u32(const char* what) {
        unsigned char b[4];
        read(reinterpret_cast<char*>(b), 4, what);
        return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
               (std::uint32_t(b[3]) << 24);
    }
    std::uint8_t u8(const char* what) {
        unsigned char b;
        read(reinterpret_cast<char*>(&b), 1, what);
        return b;
    }
};

} // namespace

void write_packets(std::ostream& out, std::span<const Packet> packets, std::uint32_t alphabet) {
    const std::uint8_t flag = alphabet_flag(alphabet);
    put_u32(out, static_cast<std::uint32_t>(packets.size()));
    for (const Packet& p : packets) {
        put_u32(out, p.length());
        out.put(static_cast<char>(flag));
        put_i32(out, p.source_index);
        out.write(reinterpret_cast<const char*>(p.symbols.data()),
                  static_cast<std::streamsize>(p.symbols.size()));
    }
    if (!out) throw std::runtime_error("packet file: write failed");
}

void write_packets(const std::filesystem::path& path, std::span<const Packet> packets,
                   std::uint32_t alphabet) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_packets(out, packets, alphabet);
}

PacketFile read_packets(std::istream& in) {
    Reader r{in};
    PacketFile file;
    const std::uint32_t count = r.u32("packet count");
    file.packets.reserve(std::min<std::uint32_t>(count, 1u << 20));
    bool alphabet_set = false;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint64_t pkt_offset = r.offset;
        const std::uint32_t len = r.u32("packet length");
        if (len < 1)
            throw TraceFormatError("zero-length packet at offset " + std::to_string(pkt_offset));
        const std::uint32_t a = alphabet_from_flag(r.u8("alphabet flag"), r.offset - 1);
        if (!alphabet_set) {
            file.alphabet = a;
            alphabet_set = true;
        } else if (a != file.alphabet) {
            throw TraceFormatError("alphabet flag changes mid-file at offset " +
                                   std::to_string(r.offset - 1));
        }
        Packet p;
        p.source_index = static_cast<std::int32_t>(r.u32("source index"));
        p.symbols.resize(len);
        r.read(reinterpret_cast<char*>(p.symbols.data()), len, "packet bytes");
        for (std::size_t t = 0; t < p.symbols.size(); ++t)
            if (p.symbols[t] >= file.alphabet)
                throw TraceFormatError("symbol " + std::to_string(int(p.symbols[t])) +
                                       " out of alphabet at offset " +
                                       std::to_string(pkt_offset + 9 + t));
        file.packets.push_back(std::move(p));
    }
    return file;
}

PacketFile read_packets(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_packets(in);
}

} // namespace mixcomp
