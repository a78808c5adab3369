#pragma once
// Sentence-embedding tables keyed by pair_id.
//
// Binary layout (little-endian):
//   "EMB1" | uint32 D | uint64 N | N x (uint16 id_len | id bytes | D x float32)
// JSONL fallback: one {"pair_id": str, "vector": [float, ...]} per line.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace normstance {

class EmbeddingTable {
public:
    EmbeddingTable() = default;
    explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

    // Throws ValidationError on duplicate ids, dimension mismatch or
    // non-finite entries.
    void add(std::string pair_id, std::span<const float> vector);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return ids_.size(); }
    bool empty() const noexcept { return ids_.empty(); }

    const std::vector<std::string>& ids() const noexcept { return ids_; }
    std::span<const float> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }

    std::optional<std::size_t> find(const std::string& pair_id) const;
    bool contains(const std::string& pair_id) const { return index_.contains(pair_id); }

    // Throws ValidationError naming the id when absent.
    std::span<const float> at(const std::string& pair_id) const;

private:
    std::size_t dim_ = 0;
    std::vector<std::string> ids_;
    std::vector<float> data_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Detects the format from the leading magic bytes.
EmbeddingTable load_embeddings(const std::filesystem::path& path);

EmbeddingTable load_embeddings_binary(const std::filesystem::path& path);
EmbeddingTable load_embeddings_jsonl(const std::filesystem::path& path);

// Atomic write (temp file + rename).
void write_embeddings_binary(const std::filesystem::path& path, const EmbeddingTable& table);
void write_embeddings_jsonl(const std::filesystem::path& path, const EmbeddingTable& table);

}  // namespace normstance
