#ifndef MIXCOMP_PACKET_IO_HPP
#define MIXCOMP_PACKET_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "mixcomp/sources.hpp"

namespace mixcomp {

/// Packet trace file, shared between the generator and the harness.
///
/// Layout (little-endian):
///   u32 packet count
///   per packet: u32 length, u8 alphabet flag (0 = 256-ary, k = 2^k-ary),
///               i32 source index (-1 = unknown), raw symbol bytes
struct PacketFile {
    std::uint32_t alphabet = 256;
    std::vector<Packet> packets;
};

/// Thrown on malformed trace files; the message reports the byte offset.
struct TraceFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_packets(std::ostream& out, std::span<const Packet> packets, std::uint32_t alphabet);
void write_packets(const std::filesystem::path& path, std::span<const Packet> packets,
                   std::uint32_t alphabet);

PacketFile read_packets(std::istream& in);
PacketFile read_packets(const std::filesystem::path& path);

} // namespace mixcomp

#endif
