#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>

#include "lyricgenre/embedding.hpp"

// Binary song-embedding file, little-endian:
//   "LYRE" | u32 version (1) | u32 dimension | u64 count |
//   count x ( u32 id length | id bytes | dimension x f32 )
namespace lyricgenre {

inline constexpr std::uint32_t kEmbeddingFileVersion = 1;

struct EmbeddingTable {
  std::size_t dimension = 0;
  std::map<std::string, SongEmbedding> by_id;
};

void write_embedding_file(std::ostream& out, std::span<const SongEmbedding> embeddings,
                          std::size_t dimension);
void save_embedding_file(const std::filesystem::path& path, std::span<const SongEmbedding> embeddings,
                         std::size_t dimension);

/// Throws DataError on bad magic, unsupported version, truncated payload,
/// trailing bytes, or duplicate ids.
EmbeddingTable read_embedding_file(std::istream& in, const std::string& provider_tag = "file");
EmbeddingTable load_embedding_file(const std::filesystem::path& path);

}  // namespace lyricgenre
