#include "mixcomp/range_coder.hpp"

#include <cassert>

namespace mixcomp {

void BitWriter::put(int bit) {
    const std::size_t byte = bits_ / 8;
    if (byte == bytes_.size()) bytes_.push_back(0);
    if (bit) bytes_[byte] |= std::uint8_t(0x80u >> (bits_ % 8));
    ++bits_;
}

BitReader::BitReader(std::span<const std::uint8_t> bytes, std::uint64_t pad_slack_bits)
    : bytes_(bytes), limit_(std::uint64_t(bytes.size()) * 8 + pad_slack_bits) {}

int BitReader::get() {
    if (pos_ >= limit_)
        throw DecodeError("bit stream exhausted: payload truncated or corrupt");
    const std::uint64_t p = pos_++;
    if (p >= std::uint64_t(bytes_.size()) * 8) return 0;
    return (bytes_[p / 8] >> (7 - p % 8)) & 1;
}

void RangeEncoder::emit(int bit) {
    out_.put(bit);
    while (pending_ > 0) {
        out_.put(!bit);
        --pending_;
    }
}

void RangeEncoder::encode(std::uint32_t cum, std::uint32_t freq, std::uint32_t total) {
    assert(total >= 1 && total <= kMaxTotal);
    assert(freq >= 1 && cum + freq <= total);
    const std::uint64_t r = range_ / total;
    low_ += r * cum;
    range_ = r * freq;
    while (range_ <= kQuarter) {
        if (low_ + range_ <= kHalf) {
            emit(0);
        } else if (low_ >= kHalf) {
            emit(1);
            low_ -= kHalf;
        } else {
            ++pending_;
            low_ -= kQuarter;
        }
        low_ <<= 1;
        range_ <<= 1;
    }
}

void RangeEncoder::finish() {
    // the interval is wider than a quarter, so some quarter multiple lies in
    // it; two bits pin that value, zero padding extends it on the decode side
    const std::uint64_t k = (low_ + kQuarter - 1) / kQuarter;
    assert(k <= 3 && k * kQuarter >= low_ && k * kQuarter < low_ + range_);
    emit(int((k >> 1) & 1));
    emit(int(k & 1));
}

RangeDecoder::RangeDecoder(BitReader& in) : in_(in) {
    for (int i = 0; i < 62; ++i) code_ = (code_ << 1) | std::uint64_t(in_.get());
}

std::uint32_t RangeDecoder::decode_target(std::uint32_t total) {
    const std::uint64_t r = range_ / total;
    if (code_ < low_ || code_ - low_ >= r * std::uint64_t(total))
        throw DecodeError("stream value outside the coded interval: payload corrupt");
    return std::uint32_t((code_ - low_) / r);
}

void RangeDecoder::consume(std::uint32_t cum, std::uint32_t freq, std::uint32_t total) {
    const std::uint64_t r = range_ / total;
    low_ += r * cum;
    range_ = r * freq;
    while (range_ <= RangeEncoder::kQuarter) {
        if (low_ + range_ <= RangeEncoder::kHalf) {
            // nothing to adjust
        } else if (low_ >= RangeEncoder::kHalf) {
            low_ -= RangeEncoder::kHalf;
            code_ -= RangeEncoder::kHalf;
        } else {
            low_ -= RangeEncoder::kQuarter;
            code_ -= RangeEncoder::kQuarter;
        }
        low_ <<= 1;
        range_ <<= 1;
        code_ = (code_ << 1) | std::uint64_t(in_.get());
    }
}

} // namespace mixcomp
