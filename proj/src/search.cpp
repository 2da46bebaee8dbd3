#include "lexrag/search.hpp"

#include <algorithm>
#include <cmath>

namespace lexrag {
namespace {

constexpr std::size_t k_snippet_bytes = 240;

std::vector<std::uint32_t> merge_union(const std::vector<std::uint32_t>& a,
                                       const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<std::uint32_t> merge_intersection(const std::vector<std::uint32_t>& a,
                                              const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<std::uint32_t> merge_difference(const std::vector<std::uint32_t>& a,
                                            const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<std::uint32_t> term_docs(const IndexSnapshot& index, Field field,
                                     const std::string& token) {
    std::vector<std::uint32_t> out;
    if (const PostingList* pl = index.postings(field, token)) {
        out.reserve(pl->entries.size());
        for (const Posting& p : pl->entries)
            out.push_back(p.doc_ordinal);
    }
    return out;
}

// Number of positions where the tokens occur consecutively in the given field.
std::uint32_t phrase_occurrences(const IndexSnapshot& index, Field field,
                                 const std::vector<std::string>& tokens, std::uint32_t ordinal) {
    std::vector<const Posting*> postings;
    postings.reserve(tokens.size());
    for (const auto& tok : tokens) {
        const PostingList* pl = index.postings(field, tok);
        const Posting* p = pl ? pl->find(ordinal) : nullptr;
        if (!p)
            return 0;
        postings.push_back(p);
    }
    std::uint32_t count = 0;
    for (std::uint32_t start : postings[0]->positions) {
        bool match = true;
        for (std::size_t i = 1; i < postings.size(); ++i) {
            const auto& pos = postings[i]->positions;
            if (!std::binary_search(pos.begin(), pos.end(),
                                    start + static_cast<std::uint32_t>(i))) {
                match = false;
                break;
            }
        }
        if (match)
            ++count;
    }
    return count;
}

std::vector<std::uint32_t> phrase_docs(const IndexSnapshot& index, Field field,
                                       const std::vector<std::string>& tokens) {
    if (tokens.empty())
        return {};
    std::vector<std::uint32_t> candidates = term_docs(index, field, tokens[0]);
    for (std::size_t i = 1; i < tokens.size() && !candidates.empty(); ++i)
        candidates = merge_intersection(candidates, term_docs(index, field, tokens[i]));
    std::vector<std::uint32_t> out;
    for (std::uint32_t ord : candidates)
        if (phrase_occurrences(index, field, tokens, ord) > 0)
            out.push_back(ord);
    return out;
}

std::vector<Field> fields_of(FieldScope scope) {
    switch (scope) {
    case FieldScope::title:
        return {Field::title};
    case FieldScope::content:
        return {Field::content};
    case FieldScope::any:
        break;
    }
    return {Field::title, Field::content};
}

std::vector<std::uint32_t> eval_node(const IndexSnapshot& index, const QueryAst& node) {
    switch (node.kind) {
    case QueryAst::Kind::term: {
        std::vector<std::uint32_t> out;
        for (Field f : fields_of(node.field))
            out = merge_union(out, term_docs(index, f, node.token));
        return out;
    }
    case QueryAst::Kind::phrase: {
        std::vector<std::uint32_t> out;
        for (Field f : fields_of(node.field))
            out = merge_union(out, phrase_docs(index, f, node.tokens));
        return out;
    }
    case QueryAst::Kind::and_op:
    case QueryAst::Kind::or_op: {
        const bool is_and = node.kind == QueryAst::Kind::and_op;
        std::vector<std::uint32_t> acc;
        bool has_positive = false;
        for (const QueryAst& c : node.children) {
            if (c.kind == QueryAst::Kind::not_op)
                continue;
            auto docs = eval_node(index, c);
            acc = has_positive ? (is_and ? merge_intersection(acc, docs) : merge_union(acc, docs))
                               : std::move(docs);
            has_positive = true;
        }
        if (!has_positive)
            return {};
        for (const QueryAst& c : node.children) {
            if (c.kind != QueryAst::Kind::not_op || acc.empty())
                continue;
            acc = merge_difference(acc, eval_node(index, c.children.at(0)));
        }
        return acc;
    }
    case QueryAst::Kind::not_op:
        return {};
    }
    return {};
}

double idf(const IndexSnapshot& index, Field field, const std::string& token) {
    const double n = static_cast<double>(index.doc_count());
    const PostingList* pl = index.postings(field, token);
    const double df = pl ? static_cast<double>(pl->entries.size()) : 0.0;
    return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

double tf_weight(const IndexSnapshot& index, Field field, std::uint32_t ordinal, double tf,
                 const Bm25Params& params) {
    const double len = static_cast<double>(index.doc(ordinal).field_length(field));
    const double avg = index.stats(field).avg_field_length;
    return tf * (params.k1 + 1.0) /
           (tf + params.k1 * (1.0 - params.b + params.b * len / avg));
}

double leaf_score(const IndexSnapshot& index, const QueryAst& leaf, std::uint32_t ordinal,
                  const Bm25Params& params) {
    double total = 0.0;
    for (Field f : fields_of(leaf.field)) {
        if (leaf.kind == QueryAst::Kind::term) {
            const PostingList* pl = index.postings(f, leaf.token);
            const Posting* p = pl ? pl->find(ordinal) : nullptr;
            if (!p)
                continue;
            total += leaf.boost * idf(index, f, leaf.token) *
                     tf_weight(index, f, ordinal, static_cast<double>(p->positions.size()),
                               params);
        } else {
            const std::uint32_t occ = phrase_occurrences(index, f, leaf.tokens, ordinal);
            if (occ == 0)
                continue;
            double idf_sum = 0.0;
            for (const auto& tok : leaf.tokens)
                idf_sum += idf(index, f, tok);
            total += leaf.boost * idf_sum *
                     tf_weight(index, f, ordinal, static_cast<double>(occ), params);
        }
    }
    return total;
}

void score_node(const IndexSnapshot& index, const QueryAst& node, std::uint32_t ordinal,
                const Bm25Params& params, double& total) {
    switch (node.kind) {
    case QueryAst::Kind::not_op:
        return;
    case QueryAst::Kind::term:
    case QueryAst::Kind::phrase:
        total += leaf_score(index, node, ordinal, params);
        return;
    case QueryAst::Kind::and_op:
    case QueryAst::Kind::or_op:
        for (const QueryAst& c : node.children)
            score_node(index, c, ordinal, params, total);
        return;
    }
}

} // namespace

std::vector<std::uint32_t> evaluate_candidates(const IndexSnapshot& index, const QueryAst& query) {
    return eval_node(index, query);
}

double score_bm25(const IndexSnapshot& index, const QueryAst& query, std::uint32_t ordinal,
                  const Bm25Params& params) {
    double total = 0.0;
    score_node(index, query, ordinal, params, total);
    return total;
}

std::string make_snippet(const std::string& content) {
    if (content.size() <= k_snippet_bytes)
        return content;
    std::size_t cut = k_snippet_bytes;
    while (cut > 0 && (static_cast<unsigned char>(content[cut]) & 0xC0) == 0x80)
        --cut;
    return content.substr(0, cut);
}

SearchResult search_topk(const IndexSnapshot& index, const QueryAst& query, std::size_t k,
                         const Bm25Params& params) {
    const auto candidates = evaluate_candidates(index, query);
    std::vector<std::pair<double, std::uint32_t>> scored;
    scored.reserve(candidates.size());
    for (std::uint32_t ord : candidates)
        scored.emplace_back(score_bm25(index, query, ord, params), ord);
    std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first)
            return a.first > b.first;
        return index.doc(a.second).doc_id < index.doc(b.second).doc_id;
    });
    if (scored.size() > k)
        scored.resize(k);
    SearchResult result;
    result.total_candidates = candidates.size();
    result.hits.reserve(scored.size());
    for (const auto& [score, ord] : scored) {
        const StoredDocument& doc = index.doc(ord);
        result.hits.push_back({doc.doc_id, doc.title, make_snippet(doc.content), score});
    }
    return result;
}

} // namespace lexrag
