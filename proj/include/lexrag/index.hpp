#pragma once

#include "lexrag/document.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace lexrag {

class IndexError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One document's occurrences of a term within a single field.
/// Positions are 0-based token indices, strictly ascending, never empty.
struct Posting {
    uint32_t doc_ordinal = 0;
    std::vector<uint32_t> positions;
};

/// All postings for one (field, term) pair, ordered by doc_ordinal.
/// Document frequency is entries.size().
struct PostingList {
    std::vector<Posting> entries;

    const Posting* find(uint32_t doc_ordinal) const;
};

struct FieldStats {
    uint64_t doc_count = 0;
    uint64_t total_tokens = 0;
    double avg_field_length = 0.0;
};

/// A document as stored in the index, with per-field token lengths.
struct StoredDocument {
    std::string doc_id;
    std::string title;
    std::string content;
    uint32_t title_length = 0;
    uint32_t content_length = 0;

    uint32_t field_length(Field f) const {
        return f == Field::title ? title_length : content_length;
    }
};

/// Raw index contents. Filled by build_index / load_index, then sealed into
/// an IndexSnapshot. Postings are kept in term-sorted maps so that iteration,
/// and therefore serialization, is deterministic.
struct IndexData {
    std::vector<StoredDocument> documents;
    std::unordered_map<std::string, uint32_t> ordinal_by_id;
    std::map<std::string, PostingList> title_postings;
    std::map<std::string, PostingList> content_postings;
    FieldStats title_stats;
    FieldStats content_stats;
};

/// An immutable, sealed index. Constructing one is the sealing step; there is
/// no mutation API, so concurrent readers need no synchronization.
class IndexSnapshot {
public:
    static constexpr uint32_t format_version = 1;

    explicit IndexSnapshot(IndexData data) : data_(std::move(data)) {}

    uint32_t doc_count() const { return static_cast<uint32_t>(data_.documents.size()); }
    const StoredDocument& doc(uint32_t ordinal) const { return data_.documents.at(ordinal); }
    std::optional<uint32_t> ordinal_of(const std::string& doc_id) const;

    const PostingList* postings(Field f, const std::string& term) const;
    const FieldStats& stats(Field f) const {
        return f == Field::title ? data_.title_stats : data_.content_stats;
    }
    const std::map<std::string, PostingList>& postings_map(Field f) const {
        return f == Field::title ? data_.title_postings : data_.content_postings;
    }

    /// Wall-clock seconds spent building this snapshot. Transient: not part
    /// of the serialized format and not covered by round-trip identity.
    double build_seconds() const { return build_seconds_; }
    void set_build_seconds(double s) { build_seconds_ = s; }

private:
    IndexData data_;
    double build_seconds_ = 0.0;
};

/// Builds a sealed index over the corpus in one pass, assigning ordinals in
/// input order. Throws IndexError on an empty corpus or a duplicate doc_id.
IndexSnapshot build_index(std::span<const Document> corpus);

} // namespace lexrag
