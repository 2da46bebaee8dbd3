#include "lexrag/dense.hpp"

#include "binary_io.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace lexrag {
namespace {

constexpr std::uint32_t dense_magic = 0x584E4544; // "DENX"
constexpr std::uint32_t dense_version = 1;

double dot(std::span<const float> a, std::span<const float> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return acc;
}

} // namespace

void normalize_rows(std::vector<float>& vectors, std::uint32_t dim) {
    for (std::size_t off = 0; off < vectors.size(); off += dim) {
        double norm_sq = 0.0;
        for (std::uint32_t i = 0; i < dim; ++i)
            norm_sq += static_cast<double>(vectors[off + i]) * vectors[off + i];
        if (norm_sq == 0.0)
            throw DenseIndexError("cannot normalize a zero vector");
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (std::uint32_t i = 0; i < dim; ++i)
            vectors[off + i] = static_cast<float>(vectors[off + i] * inv);
    }
}

DenseIndex build_dense_index(std::vector<std::string> ids, std::vector<float> vectors,
                             std::uint32_t dim) {
    if (dim == 0)
        throw DenseIndexError("vector dimension must be positive");
    if (ids.empty())
        throw DenseIndexError("dense index requires at least one vector");
    if (vectors.size() != ids.size() * static_cast<std::size_t>(dim))
        throw DenseIndexError("vector data size does not match id count times dimension");
    std::unordered_set<std::string> seen;
    for (const auto& id : ids)
        if (!seen.insert(id).second)
            throw DenseIndexError("duplicate doc_id " + id);
    normalize_rows(vectors, dim);
    return DenseIndex{dim, std::move(ids), std::move(vectors)};
}

void save_dense_index(const DenseIndex& index, const std::filesystem::path& path) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    detail::BinaryWriter w;
    w.u32(dense_magic);
    w.u32(dense_version);
    w.u32(index.dim);
    w.u32(static_cast<std::uint32_t>(index.ids.size()));
    for (const auto& id : index.ids)
        w.str(id);
    for (float v : index.vectors)
        w.f32(v);
    detail::write_checksummed_file<DenseIndexError>(path, w.take());
}

DenseIndex load_dense_index(const std::filesystem::path& path) {
    const std::string name = path.filename().string();
    std::string payload = detail::read_checksummed_file<DenseIndexError>(path, name);
    detail::BinaryReader<DenseIndexError> r(std::move(payload), name);
    if (r.u32() != dense_magic)
        r.fail("bad magic");
    const std::uint32_t version = r.u32();
    if (version != dense_version) {
        std::ostringstream os;
        os << "unsupported version " << version << " (expected " << dense_version << ")";
        throw DenseIndexError(os.str());
    }
    DenseIndex index;
    index.dim = r.u32();
    const std::uint32_t count = r.u32();
    if (index.dim == 0)
        r.fail("vector dimension must be positive");
    index.ids.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i)
        index.ids.push_back(r.str());
    index.vectors.reserve(static_cast<std::size_t>(count) * index.dim);
    for (std::size_t i = 0; i < static_cast<std::size_t>(count) * index.dim; ++i)
        index.vectors.push_back(r.f32());
    if (r.remaining() != 0)
        r.fail("trailing bytes after vector data");
    return index;
}

std::vector<DenseHit> dense_search(const DenseIndex& index, std::span<const float> query,
                                   std::size_t k) {
    if (query.size() != index.dim) {
        std::ostringstream os;
        os << "query dimension " << query.size() << " does not match index dimension "
           << index.dim;
        throw DenseIndexError(os.str());
    }
    std::vector<float> unit(query.begin(), query.end());
    normalize_rows(unit, index.dim);

    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(index.ids.size());
    for (std::size_t i = 0; i < index.ids.size(); ++i)
        scored.emplace_back(dot(unit, index.row(i)), i);
    std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first)
            return a.first > b.first;
        return index.ids[a.second] < index.ids[b.second];
    });
    if (scored.size() > k)
        scored.resize(k);
    std::vector<DenseHit> hits;
    hits.reserve(scored.size());
    for (const auto& [score, i] : scored)
        hits.push_back({index.ids[i], score});
    return hits;
}

} // namespace lexrag
