#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lexrag {

class DenseIndexError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Flat store of unit-length embedding vectors, searched exhaustively.
// vectors is row-major with ids.size() rows of dim floats each.
struct DenseIndex {
    std::uint32_t dim = 0;
    std::vector<std::string> ids;
    std::vector<float> vectors;

    std::span<const float> row(std::size_t i) const {
        return {vectors.data() + i * dim, dim};
    }
};

struct DenseHit {
    std::string doc_id;
    double score = 0.0;
};

// Normalizes each vector to unit length in place. Throws on a zero vector.
void normalize_rows(std::vector<float>& vectors, std::uint32_t dim);

// Builds a dense index from raw (not necessarily normalized) vectors.
// Throws on empty input, dim 0, duplicate ids, or a size mismatch between
// ids and vectors.
DenseIndex build_dense_index(std::vector<std::string> ids, std::vector<float> vectors,
                             std::uint32_t dim);

void save_dense_index(const DenseIndex& index, const std::filesystem::path& path);
DenseIndex load_dense_index(const std::filesystem::path& path);

// Exact top-k by cosine similarity. The query is normalized internally, so
// scores are dot products against the stored unit vectors. Ties break by
// doc_id ascending. Throws when the query dimension disagrees with the index.
std::vector<DenseHit> dense_search(const DenseIndex& index, std::span<const float> query,
                                   std::size_t k);

} // namespace lexrag
