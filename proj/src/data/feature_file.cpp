#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>

#include "bcgnn/data.hpp"

namespace bcgnn::data {
namespace {

constexpr std::array<char, 4> kMagic{'B', 'C', 'G', 'F'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 20;

std::uint32_t read_u32(const std::vector<unsigned char>& buf, std::size_t offset) {
  return static_cast<std::uint32_t>(buf[offset]) | static_cast<std::uint32_t>(buf[offset + 1]) << 8 |
         static_cast<std::uint32_t>(buf[offset + 2]) << 16 |
         static_cast<std::uint32_t>(buf[offset + 3]) << 24;
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<char>((v >> shift) & 0xffU));
}

}  // namespace

FeatureSequence load_features(const std::filesystem::path& path) {
  using Kind = FeatureFileError::Kind;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FeatureFileError(Kind::missing_file, "cannot open feature file " + path.string());
  const std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                       std::istreambuf_iterator<char>());

  if (buf.size() < kHeaderBytes) {
    throw FeatureFileError(Kind::corrupt_header, path.string() + ": header truncated (" +
                                                     std::to_string(buf.size()) + " bytes)");
  }
  if (!std::equal(kMagic.begin(), kMagic.end(), buf.begin())) {
    throw FeatureFileError(Kind::corrupt_header, path.string() + ": bad magic bytes");
  }
  if (const auto version = read_u32(buf, 4); version != kVersion) {
    throw FeatureFileError(Kind::corrupt_header,
                           path.string() + ": unsupported version " + std::to_string(version));
  }
  const std::uint32_t channels = read_u32(buf, 8);
  const std::uint32_t length = read_u32(buf, 12);
  const std::uint32_t interval = read_u32(buf, 16);
  if (channels < 1 || length < 2 || interval < 1) {
    throw FeatureFileError(Kind::corrupt_header,
                           path.string() + ": invalid header D_i=" + std::to_string(channels) +
                               " l_s=" + std::to_string(length) + " tau=" + std::to_string(interval));
  }
  const std::size_t count = std::size_t{channels} * length;
  if (buf.size() != kHeaderBytes + 4 * count) {
    throw FeatureFileError(Kind::truncated_payload,
                           path.string() + ": expected " + std::to_string(4 * count) +
                               " payload bytes, found " + std::to_string(buf.size() - kHeaderBytes));
  }
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    const float f = std::bit_cast<float>(read_u32(buf, kHeaderBytes + 4 * i));
    if (!std::isfinite(f)) {
      throw FeatureFileError(Kind::non_finite_value, path.string() + ": non-finite value at channel " +
                                                         std::to_string(i / length) + ", snippet " +
                                                         std::to_string(i % length));
    }
    values[i] = f;
  }
  return {path.stem().string(), Tensor({channels, length}, std::move(values)), interval};
}

void save_features(const std::filesystem::path& path, const FeatureSequence& sequence) {
  std::string out(kMagic.begin(), kMagic.end());
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(sequence.channels()));
  put_u32(out, static_cast<std::uint32_t>(sequence.length()));
  put_u32(out, sequence.snippet_interval);
  for (double v : sequence.features.values()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file.write(out.data(), static_cast<std::streamsize>(out.size()))) {
    throw FeatureFileError(FeatureFileError::Kind::io_failure, "cannot write " + path.string());
  }
}

}  // namespace bcgnn::data
