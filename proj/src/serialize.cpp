#include "netcast/serialize.hpp"

#include <bit>
#include <cstring>

#include "netcast/errors.hpp"

namespace netcast::wire {

void ByteWriter::put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) {
        buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

void ByteWriter::f64(double v) {
    u64(std::bit_cast<std::uint64_t>(v));
}

void ByteWriter::str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
}

void ByteWriter::field(std::uint16_t tag, const ByteWriter& payload) {
    u16(tag);
    u32(static_cast<std::uint32_t>(payload.buf_.size()));
    bytes(payload.buf_);
}

std::uint64_t ByteReader::get(int n) {
    if (remaining() < static_cast<std::size_t>(n)) {
        throw DecodeError("truncated snapshot");
    }
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
        v |= static_cast<std::uint64_t>(data_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(n);
    return v;
}

double ByteReader::f64() {
    return std::bit_cast<double>(u64());
}

std::string ByteReader::str() {
    const auto b = bytes(u32());
    return {b.begin(), b.end()};
}

std::span<const std::uint8_t> ByteReader::bytes(std::size_t n) {
    if (remaining() < n) {
        throw DecodeError("truncated snapshot");
    }
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
}

std::uint64_t fnv1a(std::span<const std::uint8_t> data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto b : data) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<std::uint8_t> seal(std::string_view magic, std::uint16_t version, const ByteWriter& fields) {
    ByteWriter w;
    w.bytes({reinterpret_cast<const std::uint8_t*>(magic.data()), magic.size()});
    w.u16(version);
    w.bytes(fields.data());
    const std::uint64_t sum = fnv1a(w.data());
    w.u64(sum);
    return w.take();
}

std::span<const std::uint8_t> unseal(std::span<const std::uint8_t> bytes, std::string_view magic,
                                     std::uint16_t version) {
    const std::size_t head = magic.size() + 2;
    if (bytes.size() < head + 8) {
        throw DecodeError("snapshot too short");
    }
    if (std::memcmp(bytes.data(), magic.data(), magic.size()) != 0) {
        throw DecodeError("bad snapshot magic");
    }
    ByteReader r(bytes.subspan(magic.size()));
    const std::uint16_t got = r.u16();
    if (got != version) {
        throw DecodeError("unsupported snapshot version " + std::to_string(got));
    }
    const auto body = bytes.first(bytes.size() - 8);
    ByteReader tail(bytes.last(8));
    if (fnv1a(body) != tail.u64()) {
        throw DecodeError("snapshot checksum mismatch");
    }
    return body.subspan(head);
}

} // namespace netcast::wire
