#include "lexrag/index_io.hpp"

#include "binary_io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace lexrag {
namespace {

using nlohmann::json;

constexpr uint32_t index_magic = 0x5849584C; // "LXIX"

using detail::BinaryWriter;
using BinaryReader = detail::BinaryReader<IndexIoError>;
const auto read_file = detail::read_file<IndexIoError>;
const auto write_file = detail::write_file<IndexIoError>;

void write_postings(BinaryWriter& w, const std::map<std::string, PostingList>& postings) {
    w.u64(postings.size());
    for (const auto& [term, list] : postings) {
        w.str(term);
        w.u32(static_cast<uint32_t>(list.entries.size()));
        for (const Posting& p : list.entries) {
            w.u32(p.doc_ordinal);
            w.u32(static_cast<uint32_t>(p.positions.size()));
            for (uint32_t pos : p.positions)
                w.u32(pos);
        }
    }
}

void read_postings(BinaryReader& r, std::map<std::string, PostingList>& postings,
                   uint32_t doc_count) {
    const uint64_t term_count = r.u64();
    for (uint64_t t = 0; t < term_count; ++t) {
        std::string term = r.str();
        PostingList list;
        const uint32_t entry_count = r.u32();
        list.entries.reserve(entry_count);
        uint32_t prev_ord = 0;
        for (uint32_t e = 0; e < entry_count; ++e) {
            Posting p;
            p.doc_ordinal = r.u32();
            if (p.doc_ordinal >= doc_count)
                r.fail("posting references unknown document ordinal");
            if (e > 0 && p.doc_ordinal <= prev_ord)
                r.fail("posting ordinals not strictly increasing");
            prev_ord = p.doc_ordinal;
            const uint32_t pos_count = r.u32();
            if (pos_count == 0)
                r.fail("empty position list");
            p.positions.reserve(pos_count);
            for (uint32_t i = 0; i < pos_count; ++i)
                p.positions.push_back(r.u32());
            list.entries.push_back(std::move(p));
        }
        postings.emplace(std::move(term), std::move(list));
    }
}

json stats_to_json(const FieldStats& s) {
    return json{{"doc_count", s.doc_count},
                {"total_tokens", s.total_tokens},
                {"avg_field_length", s.avg_field_length}};
}

} // namespace

std::vector<Document> ingest_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IndexIoError("cannot open " + path.string());

    std::vector<Document> docs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded()) {
            std::ostringstream os;
            os << "line " << line_no << ": malformed JSON";
            throw IndexIoError(os.str());
        }
        Document doc;
        const std::pair<const char*, std::string*> fields[] = {
            {"id", &doc.doc_id}, {"title", &doc.title}, {"contents", &doc.content}};
        for (const auto& [name, target] : fields) {
            auto it = obj.find(name);
            std::ostringstream os;
            if (it == obj.end()) {
                os << "line " << line_no << ": missing field " << name;
                throw IndexIoError(os.str());
            }
            if (!it->is_string()) {
                os << "line " << line_no << ": field " << name << " must be a string";
                throw IndexIoError(os.str());
            }
            *target = it->get<std::string>();
        }
        docs.push_back(std::move(doc));
    }
    if (docs.empty())
        throw IndexIoError("empty corpus");
    return docs;
}

void save_index(const IndexSnapshot& snapshot, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    BinaryWriter w;
    w.u32(index_magic);
    w.u32(IndexSnapshot::format_version);

    const uint32_t n = snapshot.doc_count();
    w.u32(n);
    for (uint32_t ord = 0; ord < n; ++ord) {
        const StoredDocument& d = snapshot.doc(ord);
        w.str(d.doc_id);
        w.str(d.title);
        w.str(d.content);
        w.u32(d.title_length);
        w.u32(d.content_length);
    }
    write_postings(w, snapshot.postings_map(Field::title));
    write_postings(w, snapshot.postings_map(Field::content));
    for (Field f : {Field::title, Field::content}) {
        const FieldStats& s = snapshot.stats(f);
        w.u64(s.total_tokens);
        w.f64(s.avg_field_length);
    }

    detail::write_checksummed_file<IndexIoError>(dir / "index.bin", w.take());

    json manifest{{"format_version", IndexSnapshot::format_version},
                  {"doc_count", n},
                  {"fields",
                   {{"title", stats_to_json(snapshot.stats(Field::title))},
                    {"content", stats_to_json(snapshot.stats(Field::content))}}}};
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

IndexSnapshot load_index(const std::filesystem::path& dir) {
    const auto manifest_path = dir / "manifest.json";
    json manifest = json::parse(read_file(manifest_path), nullptr, false);
    if (manifest.is_discarded())
        throw IndexIoError(manifest_path.string() + ": malformed manifest");
    const auto version = manifest.value("format_version", uint32_t{0});
    if (version != IndexSnapshot::format_version) {
        std::ostringstream os;
        os << "unsupported version " << version << " (expected " << IndexSnapshot::format_version
           << ")";
        throw IndexIoError(os.str());
    }

    std::string payload =
        detail::read_checksummed_file<IndexIoError>(dir / "index.bin", "index.bin");

    BinaryReader r(std::move(payload), "index.bin");
    if (r.u32() != index_magic)
        r.fail("bad magic");
    if (r.u32() != IndexSnapshot::format_version)
        r.fail("unsupported version");

    IndexData data;
    const uint32_t n = r.u32();
    if (n != manifest.value("doc_count", uint32_t{0}))
        throw IndexIoError("manifest doc_count disagrees with index.bin");
    data.documents.reserve(n);
    for (uint32_t ord = 0; ord < n; ++ord) {
        StoredDocument d;
        d.doc_id = r.str();
        d.title = r.str();
        d.content = r.str();
        d.title_length = r.u32();
        d.content_length = r.u32();
        data.ordinal_by_id.emplace(d.doc_id, ord);
        data.documents.push_back(std::move(d));
    }
    read_postings(r, data.title_postings, n);
    read_postings(r, data.content_postings, n);
    for (FieldStats* s : {&data.title_stats, &data.content_stats}) {
        s->doc_count = n;
        s->total_tokens = r.u64();
        s->avg_field_length = r.f64();
    }
    if (r.remaining() != 0)
        r.fail("trailing bytes after index payload");
    return IndexSnapshot(std::move(data));
}

} // namespace lexrag
