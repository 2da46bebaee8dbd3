#include "lexrag/index.hpp"
#include "lexrag/index_io.hpp"

#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

using namespace lexrag;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;

    TempDir() {
        std::mt19937_64 rng(std::random_device{}());
        path = fs::temp_directory_path() / ("lexrag_test_" + std::to_string(rng()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::vector<Document> small_corpus() {
    return {
        {"d1", "Antonio Vivaldi", "Vivaldi composed the Four Seasons in Venice"},
        {"d2", "Four Seasons", "a set of four violin concertos by Vivaldi"},
        {"d3", "", "venice venice venice"},
    };
}

std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return s;
}

void write_bytes(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

bool same_postings(const std::map<std::string, PostingList>& a,
                   const std::map<std::string, PostingList>& b) {
    if (a.size() != b.size())
        return false;
    for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
        if (ia->first != ib->first || ia->second.entries.size() != ib->second.entries.size())
            return false;
        for (std::size_t e = 0; e < ia->second.entries.size(); ++e) {
            const Posting& pa = ia->second.entries[e];
            const Posting& pb = ib->second.entries[e];
            if (pa.doc_ordinal != pb.doc_ordinal || pa.positions != pb.positions)
                return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("build assigns ordinals in input order and stores both fields") {
    const auto docs = small_corpus();
    const IndexSnapshot index = build_index(docs);

    CHECK(index.doc_count() == 3);
    CHECK(index.doc(0).doc_id == "d1");
    CHECK(index.doc(2).doc_id == "d3");
    CHECK(index.doc(0).title == "Antonio Vivaldi");
    CHECK(index.doc(0).content == "Vivaldi composed the Four Seasons in Venice");
    CHECK(index.ordinal_of("d2") == 1);
    CHECK(!index.ordinal_of("missing").has_value());

    CHECK(index.doc(0).title_length == 2);
    CHECK(index.doc(0).content_length == 7);
    CHECK(index.doc(2).title_length == 0);
    CHECK(index.doc(0).field_length(Field::title) == 2);
}

TEST_CASE("postings carry 0-based positions per field") {
    const IndexSnapshot index = build_index(small_corpus());

    const PostingList* vivaldi_title = index.postings(Field::title, "vivaldi");
    REQUIRE(vivaldi_title != nullptr);
    CHECK(vivaldi_title->entries.size() == 1); // df over the title field
    CHECK(vivaldi_title->entries[0].doc_ordinal == 0);
    CHECK(vivaldi_title->entries[0].positions == std::vector<uint32_t>{1});

    const PostingList* vivaldi_content = index.postings(Field::content, "vivaldi");
    REQUIRE(vivaldi_content != nullptr);
    CHECK(vivaldi_content->entries.size() == 2);

    const PostingList* venice = index.postings(Field::content, "venice");
    REQUIRE(venice != nullptr);
    const Posting* repeat = venice->find(2);
    REQUIRE(repeat != nullptr);
    CHECK(repeat->positions == std::vector<uint32_t>{0, 1, 2});
    CHECK(venice->find(1) == nullptr);

    const PostingList* title_venice = index.postings(Field::title, "venice");
    CHECK((title_venice == nullptr || title_venice->find(2) == nullptr));
    CHECK(index.postings(Field::content, "zzz") == nullptr);
}

TEST_CASE("field stats aggregate token counts over all documents") {
    const IndexSnapshot index = build_index(small_corpus());

    const FieldStats& title = index.stats(Field::title);
    CHECK(title.doc_count == 3);
    CHECK(title.total_tokens == 4); // 2 + 2 + 0
    CHECK(title.avg_field_length == doctest::Approx(4.0 / 3.0));

    const FieldStats& content = index.stats(Field::content);
    CHECK(content.total_tokens == 7 + 8 + 3);
    CHECK(content.avg_field_length == doctest::Approx(6.0));
}

TEST_CASE("build rejects bad corpora") {
    CHECK_THROWS_WITH_AS(build_index(std::vector<Document>{}), "empty corpus", IndexError);
    const std::vector<Document> dup{{"x", "a", "b"}, {"x", "c", "d"}};
    CHECK_THROWS_WITH_AS(build_index(dup), "duplicate doc_id x", IndexError);
    const std::vector<Document> anon{{"", "a", "b"}};
    CHECK_THROWS_AS(build_index(anon), IndexError);
}

TEST_CASE("ingest reads jsonl and reports malformed lines by number") {
    TempDir tmp;
    const fs::path good = tmp.path / "corpus.jsonl";
    write_bytes(good, R"({"id": "a", "title": "T", "contents": "C"})"
                      "\n\n"
                      R"({"id": "b", "title": "", "contents": "body"})"
                      "\n");
    const auto docs = ingest_jsonl(good);
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].doc_id == "a");
    CHECK(docs[1].content == "body");

    const fs::path broken = tmp.path / "broken.jsonl";
    write_bytes(broken, R"({"id": "a", "title": "T", "contents": "C"})"
                        "\n{nope\n");
    CHECK_THROWS_WITH_AS(ingest_jsonl(broken), "line 2: malformed JSON", IndexIoError);

    const fs::path missing_field = tmp.path / "missing.jsonl";
    write_bytes(missing_field, R"({"id": "a", "title": "T"})"
                               "\n");
    CHECK_THROWS_WITH_AS(ingest_jsonl(missing_field), "line 1: missing field contents",
                         IndexIoError);

    const fs::path wrong_type = tmp.path / "wrong.jsonl";
    write_bytes(wrong_type, R"({"id": 7, "title": "T", "contents": "C"})"
                            "\n");
    CHECK_THROWS_WITH_AS(ingest_jsonl(wrong_type), "line 1: field id must be a string",
                         IndexIoError);

    const fs::path empty = tmp.path / "empty.jsonl";
    write_bytes(empty, "\n  \n");
    CHECK_THROWS_WITH_AS(ingest_jsonl(empty), "empty corpus", IndexIoError);
    CHECK_THROWS_AS(ingest_jsonl(tmp.path / "nonexistent.jsonl"), IndexIoError);
}

TEST_CASE("save and load round-trip the whole snapshot") {
    TempDir tmp;
    const auto docs = small_corpus();
    const IndexSnapshot built = build_index(docs);
    save_index(built, tmp.path / "idx");
    const IndexSnapshot loaded = load_index(tmp.path / "idx");

    CHECK(loaded.doc_count() == built.doc_count());
    for (uint32_t ord = 0; ord < built.doc_count(); ++ord) {
        CHECK(loaded.doc(ord).doc_id == built.doc(ord).doc_id);
        CHECK(loaded.doc(ord).title == built.doc(ord).title);
        CHECK(loaded.doc(ord).content == built.doc(ord).content);
        CHECK(loaded.doc(ord).title_length == built.doc(ord).title_length);
        CHECK(loaded.doc(ord).content_length == built.doc(ord).content_length);
    }
    for (Field f : {Field::title, Field::content}) {
        CHECK(same_postings(loaded.postings_map(f), built.postings_map(f)));
        CHECK(loaded.stats(f).doc_count == built.stats(f).doc_count);
        CHECK(loaded.stats(f).total_tokens == built.stats(f).total_tokens);
        CHECK(loaded.stats(f).avg_field_length == built.stats(f).avg_field_length);
    }

    // Serialization is deterministic: saving the loaded snapshot reproduces
    // the original bytes.
    save_index(loaded, tmp.path / "idx2");
    CHECK(read_bytes(tmp.path / "idx" / "index.bin") == read_bytes(tmp.path / "idx2" / "index.bin"));
    CHECK(read_bytes(tmp.path / "idx" / "manifest.json") ==
          read_bytes(tmp.path / "idx2" / "manifest.json"));
}

TEST_CASE("load rejects corruption and version skew") {
    TempDir tmp;
    save_index(build_index(small_corpus()), tmp.path / "idx");

    SUBCASE("flipped payload byte fails the checksum") {
        const fs::path bin = tmp.path / "idx" / "index.bin";
        std::string bytes = read_bytes(bin);
        bytes[bytes.size() / 2] ^= 0x01;
        write_bytes(bin, bytes);
        CHECK_THROWS_WITH_AS(load_index(tmp.path / "idx"),
                             "index.bin: checksum mismatch, file is corrupted", IndexIoError);
    }

    SUBCASE("truncated file is rejected") {
        const fs::path bin = tmp.path / "idx" / "index.bin";
        write_bytes(bin, read_bytes(bin).substr(0, 4));
        CHECK_THROWS_WITH_AS(load_index(tmp.path / "idx"),
                             "index.bin: file too short to hold a checksum", IndexIoError);
    }

    SUBCASE("manifest version mismatch names both versions") {
        const fs::path manifest = tmp.path / "idx" / "manifest.json";
        std::string text = read_bytes(manifest);
        const auto at = text.find("\"format_version\": 1");
        REQUIRE(at != std::string::npos);
        text.replace(at, 19, "\"format_version\": 9");
        write_bytes(manifest, text);
        CHECK_THROWS_WITH_AS(load_index(tmp.path / "idx"), "unsupported version 9 (expected 1)",
                             IndexIoError);
    }

    SUBCASE("malformed manifest is rejected") {
        write_bytes(tmp.path / "idx" / "manifest.json", "{not json");
        CHECK_THROWS_AS(load_index(tmp.path / "idx"), IndexIoError);
    }
}
