#include "normstance/embeddings.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "normstance/error.hpp"
#include "normstance/util.hpp"

namespace normstance {

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};

static_assert(std::endian::native == std::endian::little, "embedding I/O assumes a little-endian host");

template <typename T>
bool read_pod(std::istream& in, T& value) {
    return static_cast<bool>(in.read(reinterpret_cast<char*>(&value), sizeof(T)));
}

template <typename T>
void append_pod(std::string& out, const T& value) {
    out.append(reinterpret_cast<const char*>(&value), sizeof(T));
}

}  // namespace

void EmbeddingTable::add(std::string pair_id, std::span<const float> vector) {
    if (ids_.empty() && dim_ == 0) dim_ = vector.size();
    if (vector.size() != dim_) {
        throw ValidationError("embedding '" + pair_id + "' has dimension " + std::to_string(vector.size()) +
                              ", expected " + std::to_string(dim_));
    }
    for (std::size_t j = 0; j < vector.size(); ++j) {
        if (!std::isfinite(vector[j])) {
            throw ValidationError("embedding '" + pair_id + "' has a non-finite entry at index " +
                                  std::to_string(j));
        }
    }
    auto [it, inserted] = index_.emplace(pair_id, ids_.size());
    if (!inserted) throw ValidationError("duplicate embedding for pair '" + pair_id + "'");
    ids_.push_back(std::move(pair_id));
    data_.insert(data_.end(), vector.begin(), vector.end());
}

std::optional<std::size_t> EmbeddingTable::find(const std::string& pair_id) const {
    auto it = index_.find(pair_id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::span<const float> EmbeddingTable::at(const std::string& pair_id) const {
    auto idx = find(pair_id);
    if (!idx) throw ValidationError("missing embedding for pair '" + pair_id + "'");
    return row(*idx);
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open embeddings " + path.string());
    char head[4] = {};
    in.read(head, 4);
    if (in.gcount() == 4 && std::memcmp(head, kMagic, 4) == 0) return load_embeddings_binary(path);
    return load_embeddings_jsonl(path);
}

EmbeddingTable load_embeddings_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open embeddings " + path.string());
    const auto where = path.string();
    char head[4] = {};
    if (!in.read(head, 4) || std::memcmp(head, kMagic, 4) != 0) {
        throw ValidationError(where + ": bad magic, expected EMB1");
    }
    std::uint32_t dim = 0;
    std::uint64_t count = 0;
    if (!read_pod(in, dim) || !read_pod(in, count)) throw ValidationError(where + ": truncated header");

    EmbeddingTable table(dim);
    std::vector<float> vec(dim);
    std::string id;
    for (std::uint64_t r = 0; r < count; ++r) {
        std::uint16_t len = 0;
        if (!read_pod(in, len)) throw ValidationError(where + ": truncated at record " + std::to_string(r));
        id.resize(len);
        if (len > 0 && !in.read(id.data(), len)) {
            throw ValidationError(where + ": truncated id at record " + std::to_string(r));
        }
        if (dim > 0 && !in.read(reinterpret_cast<char*>(vec.data()), static_cast<std::streamsize>(dim * 4))) {
            throw ValidationError(where + ": truncated vector at record " + std::to_string(r));
        }
        try {
            table.add(id, vec);
        } catch (const ValidationError& e) {
            throw ValidationError(where + ": record " + std::to_string(r) + ": " + e.what());
        }
    }
    if (in.peek() != std::char_traits<char>::eof()) throw ValidationError(where + ": trailing bytes after records");
    return table;
}

EmbeddingTable load_embeddings_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open embeddings " + path.string());
    const auto where = path.string();
    EmbeddingTable table;
    std::string line;
    std::size_t line_no = 0;
    std::vector<float> vec;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            auto doc = nlohmann::json::parse(line);
            if (!doc.is_object() || !doc.contains("pair_id") || !doc.contains("vector")) {
                throw ValidationError("expected {\"pair_id\", \"vector\"}");
            }
            const auto& v = doc["vector"];
            if (!v.is_array()) throw ValidationError("vector must be an array");
            vec.clear();
            for (const auto& x : v) {
                if (!x.is_number()) throw ValidationError("vector entries must be numbers");
                vec.push_back(x.get<float>());
            }
            table.add(doc["pair_id"].get<std::string>(), vec);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(where, line_no, e.what());
        } catch (const ValidationError& e) {
            throw ParseError(where, line_no, e.what());
        }
    }
    return table;
}

void write_embeddings_binary(const std::filesystem::path& path, const EmbeddingTable& table) {
    std::string out;
    out.reserve(16 + table.size() * (2 + 16 + table.dim() * 4));
    out.append(kMagic, 4);
    append_pod(out, static_cast<std::uint32_t>(table.dim()));
    append_pod(out, static_cast<std::uint64_t>(table.size()));
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& id = table.ids()[i];
        if (id.size() > 0xFFFF) throw ValidationError("pair_id too long for binary format: " + id);
        append_pod(out, static_cast<std::uint16_t>(id.size()));
        out.append(id);
        auto row = table.row(i);
        out.append(reinterpret_cast<const char*>(row.data()), row.size() * sizeof(float));
    }
    write_text_file(path, out);
}

void write_embeddings_jsonl(const std::filesystem::path& path, const EmbeddingTable& table) {
    std::string out;
    for (std::size_t i = 0; i < table.size(); ++i) {
        nlohmann::json doc;
        doc["pair_id"] = table.ids()[i];
        auto row = table.row(i);
        doc["vector"] = std::vector<float>(row.begin(), row.end());
        out += doc.dump();
        out += '\n';
    }
    write_text_file(path, out);
}

}  // namespace normstance
