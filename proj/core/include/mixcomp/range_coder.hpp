#ifndef MIXCOMP_RANGE_CODER_HPP
#define MIXCOMP_RANGE_CODER_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace mixcomp {

/// Raised when a payload cannot be decoded (truncated stream, value outside
/// the coded interval, or a checksum mismatch at the container layer).
struct DecodeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class BitWriter {
public:
    void put(int bit);
    std::uint64_t bit_count() const { return bits_; }
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
    std::uint64_t bits_ = 0;
};

/// Reads bits MSB-first; past the end it supplies zero padding for the
/// coder's lookahead window and throws DecodeError beyond that.
class BitReader {
public:
    explicit BitReader(std::span<const std::uint8_t> bytes, std::uint64_t pad_slack_bits = 128);
    int get();

private:
    std::span<const std::uint8_t> bytes_;
    std::uint64_t pos_ = 0;
    std::uint64_t limit_;
};

/// Binary arithmetic coder over a 62-bit interval. Symbol intervals are
/// supplied as (cum, freq, total) with total <= 2^30; the emitted bit count
/// is exact: -log2 P <= bits <= -log2 P + 2 for the coded probability P.
class RangeEncoder {
public:
    static constexpr std::uint64_t kFull = 1ULL << 62;
    static constexpr std::uint64_t kHalf = 1ULL << 61;
    static constexpr std::uint64_t kQuarter = 1ULL << 60;
    static constexpr std::uint32_t kMaxTotal = 1u << 30;

    explicit RangeEncoder(BitWriter& out) : out_(out) {}

    void encode(std::uint32_t cum, std::uint32_t freq, std::uint32_t total);
    void finish();

private:
    void emit(int bit);

    BitWriter& out_;
    std::uint64_t low_ = 0;
    std::uint64_t range_ = kFull;
    std::uint64_t pending_ = 0;
};

class RangeDecoder {
public:
    explicit RangeDecoder(BitReader& in);

    /// Position of the stream value inside the current total-scaled interval.
    std::uint32_t decode_target(std::uint32_t total);
    /// Consumes the symbol interval chosen from the target.
    void consume(std::uint32_t cum, std::uint32_t freq, std::uint32_t total);

private:
    BitReader& in_;
    std::uint64_t low_ = 0;
    std::uint64_t range_ = RangeEncoder::kFull;
    std::uint64_t code_ = 0;
};

} // namespace mixcomp

#endif
