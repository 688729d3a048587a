#include "lyricgenre/embedding_file.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "lyricgenre/error.hpp"

namespace lyricgenre {

namespace {

constexpr std::array<char, 4> kMagic = {'L', 'Y', 'R', 'E'};

template <typename U>
void put_le(std::ostream& out, U value) {
  std::array<char, sizeof(U)> bytes;
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <typename U>
U get_le(std::istream& in, const char* what) {
  std::array<unsigned char, sizeof(U)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw DataError(std::string("embedding file truncated while reading ") + what);
  }
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return value;
}

}  // namespace

void write_embedding_file(std::ostream& out, std::span<const SongEmbedding> embeddings,
                          std::size_t dimension) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kEmbeddingFileVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(dimension));
  put_le<std::uint64_t>(out, embeddings.size());
  for (const auto& e : embeddings) {
    if (e.values.size() != dimension) {
      throw DataError("embedding '" + e.record_id + "' has dimension " + std::to_string(e.values.size()) +
                      ", file dimension is " + std::to_string(dimension));
    }
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.record_id.size()));
    out.write(e.record_id.data(), static_cast<std::streamsize>(e.record_id.size()));
    for (float v : e.values) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  }
  if (!out) throw DataError("failed writing embedding file");
}

void save_embedding_file(const std::filesystem::path& path, std::span<const SongEmbedding> embeddings,
                         std::size_t dimension) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_embedding_file(out, embeddings, dimension);
}

EmbeddingTable read_embedding_file(std::istream& in, const std::string& provider_tag) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw DataError("not an embedding file (bad magic)");
  }
  const auto version = get_le<std::uint32_t>(in, "version");
  if (version != kEmbeddingFileVersion) {
    throw DataError("unsupported embedding file version " + std::to_string(version));
  }
  EmbeddingTable table;
  table.dimension = get_le<std::uint32_t>(in, "dimension");
  const auto count = get_le<std::uint64_t>(in, "count");
  for (std::uint64_t n = 0; n < count; ++n) {
    const auto id_len = get_le<std::uint32_t>(in, "id length");
    if (id_len > (1u << 20)) throw DataError("implausible id length " + std::to_string(id_len));
    SongEmbedding e;
    e.provider_tag = provider_tag;
    e.record_id.resize(id_len);
    if (!in.read(e.record_id.data(), id_len)) {
      throw DataError("embedding file truncated: expected " + std::to_string(count) + " records, got " +
                      std::to_string(n));
    }
    e.values.resize(table.dimension);
    for (auto& v : e.values) v = std::bit_cast<float>(get_le<std::uint32_t>(in, "vector payload"));
    const std::string id = e.record_id;
    if (!table.by_id.emplace(id, std::move(e)).second) {
      throw DataError("duplicate id '" + id + "' in embedding file");
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw DataError("embedding file has trailing bytes after " + std::to_string(count) + " records");
  }
  return table;
}

EmbeddingTable load_embedding_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    return read_embedding_file(in, "file:" + path.string());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace lyricgenre
