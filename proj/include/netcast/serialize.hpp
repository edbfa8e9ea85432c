#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace netcast::wire {

// Little-endian primitive encoding shared by the snapshot formats.
class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u16(std::uint16_t v) { put(v, 2); }
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void i32(std::int32_t v) { put(static_cast<std::uint32_t>(v), 4); }
    void i64(std::int64_t v) { put(static_cast<std::uint64_t>(v), 8); }
    void f64(double v);
    void str(std::string_view s);
    void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }

    /// Appends a tag/length/payload record.
    void field(std::uint16_t tag, const ByteWriter& payload);

    [[nodiscard]] const std::vector<std::uint8_t>& data() const { return buf_; }
    [[nodiscard]] std::vector<std::uint8_t> take() { return std::move(buf_); }

private:
    void put(std::uint64_t v, int n);
    std::vector<std::uint8_t> buf_;
};

/// Bounds-checked reader; every overrun throws DecodeError.
class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::uint64_t u64() { return get(8); }
    std::int32_t i32() { return static_cast<std::int32_t>(static_cast<std::uint32_t>(get(4))); }
    std::int64_t i64() { return static_cast<std::int64_t>(get(8)); }
    double f64();
    std::string str();
    std::span<const std::uint8_t> bytes(std::size_t n);

    [[nodiscard]] bool done() const { return pos_ == data_.size(); }
    [[nodiscard]] std::size_t remaining() const { return data_.size() - pos_; }

private:
    std::uint64_t get(int n);
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

/// 64-bit FNV-1a, used as the snapshot trailer checksum.
[[nodiscard]] std::uint64_t fnv1a(std::span<const std::uint8_t> data);

/// Wraps `fields` with magic, version and checksum.
[[nodiscard]] std::vector<std::uint8_t> seal(std::string_view magic, std::uint16_t version, const ByteWriter& fields);

/// Verifies magic, version and checksum; returns the field area.
[[nodiscard]] std::span<const std::uint8_t> unseal(std::span<const std::uint8_t> bytes, std::string_view magic,
                                                   std::uint16_t version);

} // namespace netcast::wire
