#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

#include "vudetect/error.hpp"

namespace vudetect::detail {

// Little-endian primitives for the model file formats.

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto* p = reinterpret_cast<unsigned char*>(&v);
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(p[i], p[sizeof(T) - 1 - i]);
  }
  return v;
}

inline void put_u32(std::string& out, std::uint32_t v) {
  v = to_little(v);
  out.append(reinterpret_cast<const char*>(&v), sizeof v);
}

inline void put_u64(std::string& out, std::uint64_t v) {
  v = to_little(v);
  out.append(reinterpret_cast<const char*>(&v), sizeof v);
}

inline void put_f32(std::string& out, float f) {
  put_u32(out, std::bit_cast<std::uint32_t>(f));
}

class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}

  std::string_view take(std::size_t n) {
    if (data_.size() - pos_ < n) throw ModelFormatError("truncated model file");
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::string line() {
    const auto nl = data_.find('\n', pos_);
    if (nl == std::string_view::npos) throw ModelFormatError("missing header line");
    std::string s(data_.substr(pos_, nl - pos_));
    pos_ = nl + 1;
    return s;
  }
  std::uint32_t u32() { return read<std::uint32_t>(); }
  std::uint64_t u64() { return read<std::uint64_t>(); }
  float f32() { return std::bit_cast<float>(u32()); }
  bool done() const { return pos_ == data_.size(); }

 private:
  template <typename T>
  T read() {
    T v;
    std::memcpy(&v, take(sizeof(T)).data(), sizeof(T));
    return to_little(v);
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace vudetect::detail
