#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "normstance/embeddings.hpp"
#include "normstance/error.hpp"
#include "normstance/util.hpp"
#include "synthetic.hpp"

using namespace normstance;

namespace {

EmbeddingTable small_table() {
    EmbeddingTable t(3);
    const float a[] = {1.0f, -2.5f, 0.125f};
    const float b[] = {1e-30f, 3.4e38f, -0.0f};
    t.add("x:1", a);
    t.add("y:3", b);
    return t;
}

bool same_bits(std::span<const float> a, std::span<const float> b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

}  // namespace

TEST(Embeddings, AddRejectsBadRows) {
    EmbeddingTable t(2);
    const float ok[] = {1, 2};
    const float wrong[] = {1, 2, 3};
    const float nan[] = {1, std::numeric_limits<float>::quiet_NaN()};
    t.add("a", ok);
    EXPECT_THROW(t.add("a", ok), ValidationError);
    EXPECT_THROW(t.add("b", wrong), ValidationError);
    EXPECT_THROW(t.add("c", nan), ValidationError);
    EXPECT_THROW(t.at("zzz"), ValidationError);
    EXPECT_EQ(t.size(), 1u);
}

TEST(Embeddings, BinaryRoundTripIsBitExact) {
    testkit::TempDir dir("emb");
    const auto t = small_table();
    write_embeddings_binary(dir / "e.bin", t);
    const auto back = load_embeddings(dir / "e.bin");
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back.dim(), 3u);
    EXPECT_EQ(back.ids(), t.ids());
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_TRUE(same_bits(back.row(i), t.row(i)));
}

TEST(Embeddings, BinaryLayoutMatchesHandEncoding) {
    testkit::TempDir dir("emb");
    EmbeddingTable t(1);
    const float v[] = {1.0f};
    t.add("ab", v);
    write_embeddings_binary(dir / "e.bin", t);
    const auto bytes = read_text_file(dir / "e.bin");
    const std::string expected("EMB1\x01\x00\x00\x00\x01\x00\x00\x00\x00\x00\x00\x00\x02\x00" "ab\x00\x00\x80\x3f", 24);
    EXPECT_EQ(bytes, expected);
}

TEST(Embeddings, JsonlFallbackLoads) {
    testkit::TempDir dir("emb");
    write_text_file(dir / "e.jsonl", "{\"pair_id\": \"p:1\", \"vector\": [0.5, 1.5]}\n\n{\"pair_id\": \"p:3\", \"vector\": [2, -1]}\n");
    const auto t = load_embeddings(dir / "e.jsonl");
    ASSERT_EQ(t.size(), 2u);
    EXPECT_EQ(t.at("p:3")[1], -1.0f);

    const auto bin = small_table();
    write_embeddings_jsonl(dir / "round.jsonl", bin);
    const auto back = load_embeddings(dir / "round.jsonl");
    for (std::size_t i = 0; i < bin.size(); ++i) EXPECT_TRUE(same_bits(back.row(i), bin.row(i)));

    write_text_file(dir / "bad.jsonl", "{\"pair_id\": \"p:1\", \"vector\": [0.5]}\n{\"pair_id\": \"p:2\", \"vector\": [1, 2]}\n");
    try {
        load_embeddings(dir / "bad.jsonl");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(Embeddings, TruncatedBinaryIsRejected) {
    testkit::TempDir dir("emb");
    write_embeddings_binary(dir / "e.bin", small_table());
    auto bytes = read_text_file(dir / "e.bin");
    write_text_file(dir / "cut.bin", bytes.substr(0, bytes.size() - 2));
    EXPECT_THROW(load_embeddings(dir / "cut.bin"), ValidationError);
    write_text_file(dir / "tail.bin", bytes + "x");
    EXPECT_THROW(load_embeddings(dir / "tail.bin"), ValidationError);
}

TEST(Embeddings, CheckedInFixtureCoversFixturePairs) {
    const auto t = load_embeddings(testkit::fixture_dir() / "embeddings.bin");
    EXPECT_EQ(t.dim(), 384u);
    EXPECT_GT(t.size(), 0u);
}
