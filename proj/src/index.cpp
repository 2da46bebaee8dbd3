#include "lexrag/index.hpp"

#include "lexrag/analyzer.hpp"

#include <algorithm>
#include <chrono>

namespace lexrag {

const Posting* PostingList::find(uint32_t doc_ordinal) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), doc_ordinal,
                               [](const Posting& p, uint32_t ord) { return p.doc_ordinal < ord; });
    if (it == entries.end() || it->doc_ordinal != doc_ordinal)
        return nullptr;
    return &*it;
}

std::optional<uint32_t> IndexSnapshot::ordinal_of(const std::string& doc_id) const {
    auto it = data_.ordinal_by_id.find(doc_id);
    if (it == data_.ordinal_by_id.end())
        return std::nullopt;
    return it->second;
}

const PostingList* IndexSnapshot::postings(Field f, const std::string& term) const {
    const auto& map = postings_map(f);
    auto it = map.find(term);
    if (it == map.end())
        return nullptr;
    return &it->second;
}

namespace {

void index_field(std::map<std::string, PostingList>& postings, uint32_t ordinal,
                 const std::string& text, uint32_t& length_out, uint64_t& total_tokens) {
    const auto tokens = analyze(text);
    length_out = static_cast<uint32_t>(tokens.size());
    total_tokens += tokens.size();
    for (uint32_t pos = 0; pos < tokens.size(); ++pos) {
        auto& list = postings[tokens[pos]];
        if (list.entries.empty() || list.entries.back().doc_ordinal != ordinal)
            list.entries.push_back(Posting{ordinal, {}});
        list.entries.back().positions.push_back(pos);
    }
}

} // namespace

IndexSnapshot build_index(std::span<const Document> corpus) {
    const auto start = std::chrono::steady_clock::now();
    if (corpus.empty())
        throw IndexError("empty corpus");

    IndexData data;
    data.documents.reserve(corpus.size());
    for (const Document& doc : corpus) {
        if (doc.doc_id.empty())
            throw IndexError("document with empty doc_id");
        const uint32_t ordinal = static_cast<uint32_t>(data.documents.size());
        auto [it, inserted] = data.ordinal_by_id.emplace(doc.doc_id, ordinal);
        if (!inserted)
            throw IndexError("duplicate doc_id " + doc.doc_id);

        StoredDocument stored;
        stored.doc_id = doc.doc_id;
        stored.title = doc.title;
        stored.content = doc.content;
        index_field(data.title_postings, ordinal, doc.title, stored.title_length,
                    data.title_stats.total_tokens);
        index_field(data.content_postings, ordinal, doc.content, stored.content_length,
                    data.content_stats.total_tokens);
        data.documents.push_back(std::move(stored));
    }

    const uint64_t n = data.documents.size();
    data.title_stats.doc_count = n;
    data.content_stats.doc_count = n;
    data.title_stats.avg_field_length =
        static_cast<double>(data.title_stats.total_tokens) / static_cast<double>(n);
    data.content_stats.avg_field_length =
        static_cast<double>(data.content_stats.total_tokens) / static_cast<double>(n);

    IndexSnapshot snapshot(std::move(data));
    snapshot.set_build_seconds(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    return snapshot;
}

} // namespace lexrag
