#include "feast/nmnist.hpp"

#include <fstream>
#include <iterator>
#include <string>

#include "feast/error.hpp"

namespace feast {

namespace {
constexpr std::size_t kRecordBytes = 5;
}

EventStream decode_nmnist(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % kRecordBytes != 0) {
    throw MalformedStreamError("N-MNIST payload of " + std::to_string(bytes.size()) +
                               " bytes is not a multiple of 5");
  }
  EventStream stream;
  stream.width = kNmnistSide;
  stream.height = kNmnistSide;
  const std::size_t n = bytes.size() / kRecordBytes;
  stream.events.reserve(n);
  Timestamp previous = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto* r = bytes.data() + i * kRecordBytes;
    if (r[0] >= kNmnistSide || r[1] >= kNmnistSide) {
      throw OutOfRangeError("N-MNIST record " + std::to_string(i) + ": pixel (" +
                            std::to_string(r[0]) + ", " + std::to_string(r[1]) +
                            ") outside 34x34");
    }
    Event e;
    e.x = r[0];
    e.y = r[1];
    e.p = (r[2] & 0x80) ? Polarity::On : Polarity::Off;
    e.t = (Timestamp{r[2] & 0x7F} << 16) | (Timestamp{r[3]} << 8) | Timestamp{r[4]};
    if (e.t < previous) {
      throw MalformedStreamError("N-MNIST record " + std::to_string(i) +
                                 ": timestamp goes backwards");
    }
    previous = e.t;
    stream.events.push_back(e);
  }
  return stream;
}

std::vector<std::uint8_t> encode_nmnist(const EventStream& stream) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(stream.size() * kRecordBytes);
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const Event& e = stream.events[i];
    if (e.x > 255 || e.y > 255) {
      throw OutOfRangeError("event " + std::to_string(i) + ": coordinate exceeds 8 bits");
    }
    if (e.t < 0 || e.t > kNmnistMaxTimestamp) {
      throw OutOfRangeError("event " + std::to_string(i) + ": timestamp " +
                            std::to_string(e.t) + " does not fit in 23 bits");
    }
    bytes.push_back(static_cast<std::uint8_t>(e.x));
    bytes.push_back(static_cast<std::uint8_t>(e.y));
    const auto pol = static_cast<std::uint8_t>(e.p == Polarity::On ? 0x80 : 0x00);
    bytes.push_back(static_cast<std::uint8_t>(pol | ((e.t >> 16) & 0x7F)));
    bytes.push_back(static_cast<std::uint8_t>((e.t >> 8) & 0xFF));
    bytes.push_back(static_cast<std::uint8_t>(e.t & 0xFF));
  }
  return bytes;
}

EventStream read_nmnist_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_nmnist(bytes);
}

void write_nmnist_file(const std::filesystem::path& path, const EventStream& stream) {
  const auto bytes = encode_nmnist(stream);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

}  // namespace feast
