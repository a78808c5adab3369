#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "normstance/corpus.hpp"
#include "normstance/error.hpp"
#include "normstance/util.hpp"
#include "synthetic.hpp"

using namespace normstance;
using namespace normstance::corpus;
using testkit::CorpusBuilder;

namespace {

std::string turn_json(int index, const std::string& role, const std::string& toxicity, const std::string& certainty,
                      const std::string& stance) {
    return "{\"turn_index\":" + std::to_string(index) + ",\"role\":\"" + role + "\",\"text\":\"t\",\"toxicity\":" +
           toxicity + ",\"certainty\":" + certainty + ",\"stance\":\"" + stance + "\"}";
}

std::string record(const std::string& id, const std::string& turns) {
    return "{\"id\":\"" + id + "\",\"source\":\"human\",\"turns\":[" + turns + "]}";
}

std::vector<StancePair> pairs_with(std::size_t implicit_train, std::size_t explicit_train, std::size_t test) {
    std::vector<StancePair> out;
    auto add = [&](int group, Split split, std::size_t n, const std::string& tag) {
        for (std::size_t i = 0; i < n; ++i) {
            StancePair p;
            p.pair_id = tag + std::to_string(i) + ":1";
            p.group = group;
            p.label = static_cast<int>(i % 2);
            p.split = split;
            out.push_back(p);
        }
    };
    add(0, Split::Train, implicit_train, "i");
    add(1, Split::Train, explicit_train, "e");
    add(0, Split::Test, test, "t");
    return out;
}

}  // namespace

TEST(Corpus, EnumNamesRoundTrip) {
    for (std::size_t i = 0; i < kNumUserStances; ++i) {
        const auto v = static_cast<UserStance>(i);
        EXPECT_EQ(parse_user_stance(to_string(v)), v);
    }
    EXPECT_EQ(to_string(Source::HumanExpert), "human_expert");
    EXPECT_EQ(to_string(Certainty::RefuseToEngage), "refuse_to_engage");
    EXPECT_THROW(parse_assistant_stance("maybe"), ValidationError);
    EXPECT_EQ(assistant_type(Source::HumanExpert), AssistantType::Human);
    EXPECT_EQ(assistant_type(Source::LLM), AssistantType::LLM);
}

TEST(Corpus, EmptyFileLoadsEmpty) {
    testkit::TempDir dir("corpus");
    write_text_file(dir / "c.jsonl", "");
    const auto c = load_corpus(dir / "c.jsonl");
    EXPECT_TRUE(c.empty());
    EXPECT_EQ(count_turns(c), 0u);
}

TEST(Corpus, UserTurnWithCertaintyFailsAtLineOne) {
    testkit::TempDir dir("corpus");
    write_text_file(dir / "c.jsonl",
                    record("c1", turn_json(1, "user", "\"implicit_toxic\"", "\"certain\"", "initial")) + "\n");
    try {
        load_corpus(dir / "c.jsonl");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1u);
        EXPECT_NE(std::string(e.what()).find("certainty"), std::string::npos);
    }
}

TEST(Corpus, LoadErrorsNameLineAndField) {
    testkit::TempDir dir("corpus");
    const auto ok = record("c1", turn_json(1, "user", "\"neutral\"", "null", "initial") + "," +
                                     turn_json(2, "assistant", "null", "\"none\"", "agree"));
    auto expect_line = [&](const std::string& text, std::size_t line, const std::string& needle) {
        write_text_file(dir / "c.jsonl", text);
        try {
            load_corpus(dir / "c.jsonl");
            ADD_FAILURE() << "accepted: " << text;
        } catch (const ParseError& e) {
            EXPECT_EQ(e.line(), line);
            EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
        }
    };
    expect_line(ok + "\n" + ok + "\n", 2, "duplicate");
    expect_line(ok + "\n{not json\n", 2, "malformed");
    expect_line(record("c2", turn_json(1, "user", "\"spicy\"", "null", "initial")) + "\n", 1, "toxicity");
    expect_line(record("c2", turn_json(2, "user", "\"neutral\"", "null", "initial")) + "\n", 1, "turn_index");
    expect_line("{\"id\":\"x\",\"source\":\"human\",\"turns\":[],\"extra\":1}\n", 1, "extra");
}

TEST(Corpus, JsonLineRoundTrip) {
    std::mt19937_64 rng(3);
    const auto c = testkit::random_corpus(rng, 20);
    testkit::TempDir dir("corpus");
    std::string text;
    for (const auto& conv : c) text += to_json_line(conv) + "\n";
    write_text_file(dir / "c.jsonl", text);
    const auto back = load_corpus(dir / "c.jsonl");
    ASSERT_EQ(back.size(), c.size());
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(to_json_line(back[i]), to_json_line(c[i]));
}

TEST(Corpus, ValidationWarnsOnLengthAndAlternation) {
    CorpusBuilder b;
    b.conversation("short", Source::Human).user(Toxicity::Neutral, UserStance::Initial);
    b.conversation("twice", Source::Human)
        .user(Toxicity::Neutral, UserStance::Initial)
        .user(Toxicity::Neutral, UserStance::Agree);
    b.conversation("fine", Source::Human)
        .user(Toxicity::Neutral, UserStance::Initial)
        .assistant(AssistantStance::Agree);
    const auto issues = validate_corpus(b.corpus);
    ASSERT_EQ(issues.size(), 2u);
    EXPECT_EQ(issues[0].conversation_id, "short");
    EXPECT_EQ(issues[1].conversation_id, "twice");
}

TEST(Pairs, ImplicitDisagreeMapsToLabelZeroGroupZero) {
    CorpusBuilder b;
    b.conversation("c", Source::Human)
        .user(Toxicity::ImplicitToxic, UserStance::Initial, "you know how they are")
        .assistant(AssistantStance::Disagree, Certainty::Certain, "that is unfair");
    const auto set = make_pairs(b.corpus);
    ASSERT_EQ(set.pairs.size(), 1u);
    const auto& p = set.pairs[0];
    EXPECT_EQ(p.label, 0);
    EXPECT_EQ(p.group, 0);
    EXPECT_EQ(p.pair_id, "c:1");
    EXPECT_EQ(p.combined_text, "you know how they are [SEP] that is unfair");
}

TEST(Pairs, NeutralUserIsExcluded) {
    CorpusBuilder b;
    b.conversation("c", Source::LLM).user(Toxicity::Neutral, UserStance::Initial).assistant(AssistantStance::Agree);
    const auto set = make_pairs(b.corpus);
    EXPECT_TRUE(set.pairs.empty());
    EXPECT_EQ(set.excluded.total(), 1u);
    EXPECT_EQ(set.excluded.neutral_toxicity, 1u);
}

TEST(Pairs, TenConversationCorpusMatchesHandEnumeration) {
    using T = Toxicity;
    using U = UserStance;
    using A = AssistantStance;
    CorpusBuilder b;
    b.conversation("c0", Source::Human).user(T::ExplicitToxic, U::Initial).assistant(A::Agree);
    b.conversation("c1", Source::Human).user(T::ImplicitToxic, U::Initial).assistant(A::Disagree);
    b.conversation("c2", Source::LLM)
        .user(T::ImplicitToxic, U::Initial)
        .assistant(A::Neutral)
        .user(T::ExplicitToxic, U::Agree)
        .assistant(A::Disagree);
    b.conversation("c3", Source::HumanExpert).user(T::Neutral, U::Initial).assistant(A::Disagree);
    b.conversation("c4", Source::Human)
        .user(T::ExplicitToxic, U::Initial)
        .assistant(A::NewTopic)
        .user(T::ImplicitToxic, U::ShiftTopic)
        .assistant(A::Agree)
        .user(T::ImplicitToxic, U::Disagree);
    b.conversation("c5", Source::LLM).user(T::ImplicitToxic, U::Initial);
    b.conversation("c6", Source::Human)
        .user(T::ExplicitToxic, U::Initial)
        .user(T::ExplicitToxic, U::Agree)
        .assistant(A::Disagree);
    b.conversation("c7", Source::LLM)
        .user(T::ImplicitToxic, U::Initial)
        .assistant(A::Agree)
        .user(T::ImplicitToxic, U::ElaborateNeutral)
        .assistant(A::Agree);
    b.conversation("c8", Source::Human).user(T::Neutral, U::Initial).assistant(A::Neutral);
    b.conversation("c9", Source::HumanExpert)
        .user(T::ExplicitToxic, U::Initial)
        .assistant(A::Disagree)
        .user(T::Neutral, U::Agree)
        .assistant(A::Agree);

    // (pair_id, label, group) written out by hand.
    const std::multiset<std::tuple<std::string, int, int>> expected{
        {"c0:1", 1, 1}, {"c1:1", 0, 0}, {"c2:3", 0, 1}, {"c4:3", 1, 0},
        {"c6:2", 0, 1}, {"c7:1", 1, 0}, {"c7:3", 1, 0}, {"c9:1", 0, 1}};
    const auto set = make_pairs(b.corpus);
    std::multiset<std::tuple<std::string, int, int>> got;
    for (const auto& p : set.pairs) got.insert({p.pair_id, p.label, p.group});
    EXPECT_EQ(got, expected);
    EXPECT_EQ(set.excluded.neutral_toxicity, 3u);
    EXPECT_EQ(set.excluded.non_binary_stance, 2u);

    EXPECT_EQ(make_pairs(b.corpus).pairs, set.pairs);
}

TEST(Pairs, RetainedPairsHaveBinaryLabelAndGroup) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        for (const auto& p : make_pairs(testkit::random_corpus(rng, 30)).pairs) {
            EXPECT_TRUE(p.label == 0 || p.label == 1);
            EXPECT_TRUE(p.group == 0 || p.group == 1);
        }
    }
}

TEST(Folds, HundredPairsGiveTwentyPerTestSplit) {
    const auto set = testkit::gaussian_clusters(100, 4, 1);
    const auto folds = make_folds(set.pairs, 5, 0);
    std::map<int, int> sizes;
    for (const auto& [id, f] : folds.test_fold()) ++sizes[f];
    ASSERT_EQ(sizes.size(), 5u);
    for (const auto& [f, n] : sizes) EXPECT_EQ(n, 20);
    for (int f = 0; f < 5; ++f) {
        std::set<std::string> train, test;
        for (const auto& p : fold_view(set.pairs, folds, f)) (p.split == Split::Train ? train : test).insert(p.pair_id);
        EXPECT_EQ(train.size() + test.size(), 100u);
        for (const auto& id : test) EXPECT_FALSE(train.contains(id));
    }
}

TEST(Folds, StratificationKeepsLabelRatioWithinFivePoints) {
    std::vector<StancePair> pairs;
    for (int i = 0; i < 500; ++i) {
        StancePair p;
        p.pair_id = "p" + std::to_string(i) + ":1";
        p.label = i % 10 < 6 ? 1 : 0;
        p.group = i % 3 == 0 ? 1 : 0;
        pairs.push_back(p);
    }
    const auto folds = make_folds(pairs, 5, 42);
    const auto test = folds.test_fold();
    for (int f = 0; f < 5; ++f) {
        int n = 0, agree = 0;
        for (const auto& p : pairs) {
            if (test.at(p.pair_id) != f) continue;
            ++n;
            agree += p.label;
        }
        EXPECT_NEAR(100.0 * agree / n, 60.0, 5.0) << "fold " << f;
    }
}

TEST(Folds, ErrorsAndRoundTrip) {
    const auto set = testkit::gaussian_clusters(6, 2, 1);
    EXPECT_THROW(make_folds(set.pairs, 7, 0), ValidationError);
    EXPECT_THROW(make_folds(set.pairs, 1, 0), ValidationError);

    const auto folds = make_folds(set.pairs, 3, 9);
    testkit::TempDir dir("folds");
    write_folds(dir / "f.csv", folds);
    const auto back = load_folds(dir / "f.csv");
    EXPECT_EQ(back.k, 3);
    EXPECT_EQ(back.test_fold(), folds.test_fold());

    write_text_file(dir / "bad.csv", "pair_id,fold_id,split\nx:1,0,train\nx:2,0,sideways\n");
    try {
        load_folds(dir / "bad.csv");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(Portion, FullPortionIsIdentity) {
    const auto pairs = pairs_with(10, 4, 6);
    EXPECT_EQ(sample_portion(pairs, 1.0, 3), pairs);
}

TEST(Portion, ZeroPortionDropsImplicitTrainOnly) {
    const auto pairs = pairs_with(10, 4, 6);
    const auto out = sample_portion(pairs, 0.0, 3);
    EXPECT_EQ(out.size(), 10u);
    for (const auto& p : out) EXPECT_FALSE(p.split == Split::Train && p.group == 0);
}

TEST(Portion, HalfOfTenIsFiveAndDeterministic) {
    const auto pairs = pairs_with(10, 0, 0);
    const auto a = sample_portion(pairs, 0.5, 7);
    const auto b = sample_portion(pairs, 0.5, 7);
    EXPECT_EQ(a.size(), 5u);
    EXPECT_EQ(a, b);
    EXPECT_THROW(sample_portion(pairs, 1.5, 7), ValidationError);
}

TEST(Portion, NestedAcrossPortionsAndTestFixed) {
    const auto pairs = pairs_with(37, 11, 13);
    for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
        std::vector<std::set<std::string>> implicit;
        std::vector<std::vector<StancePair>> tests;
        for (double p : kDefaultPortions) {
            std::set<std::string> ids;
            std::vector<StancePair> test;
            const auto out = sample_portion(pairs, p, seed);
            for (const auto& x : out) {
                if (x.split == Split::Test) test.push_back(x);
                else if (x.group == 0) ids.insert(x.pair_id);
            }
            EXPECT_EQ(ids.size(), static_cast<std::size_t>(std::floor(p * 37 + 1e-9)));
            implicit.push_back(ids);
            tests.push_back(test);
        }
        for (std::size_t i = 1; i < implicit.size(); ++i) {
            EXPECT_TRUE(std::includes(implicit[i].begin(), implicit[i].end(), implicit[i - 1].begin(),
                                      implicit[i - 1].end()));
            EXPECT_EQ(tests[i], tests[0]);
        }
    }
}

TEST(Summary, EmptyCorpusIsAllZero) {
    const auto s = corpus_summary({});
    EXPECT_EQ(s.overall.turns, 0u);
    EXPECT_EQ(s.overall.pairs, 0u);
    for (const auto& src : s.sources) EXPECT_EQ(src.conversations, 0u);
}

TEST(Summary, TwoConversationHandCount) {
    CorpusBuilder b;
    b.conversation("a", Source::HumanExpert)
        .user(Toxicity::ImplicitToxic, UserStance::Initial)
        .assistant(AssistantStance::Disagree, Certainty::Certain)
        .user(Toxicity::ImplicitToxic, UserStance::Disagree)
        .assistant(AssistantStance::Neutral, Certainty::None);
    b.conversation("b", Source::LLM)
        .user(Toxicity::ExplicitToxic, UserStance::Initial)
        .assistant(AssistantStance::Agree, Certainty::Uncertain)
        .user(Toxicity::Neutral, UserStance::ShiftTopic);
    const auto s = corpus_summary(b.corpus);
    const auto& he = s.sources[static_cast<std::size_t>(Source::HumanExpert)];
    const auto& llm = s.sources[static_cast<std::size_t>(Source::LLM)];
    EXPECT_EQ(he.turns, 4u);
    EXPECT_EQ(he.pairs, 2u);
    EXPECT_EQ(llm.turns, 3u);
    EXPECT_EQ(llm.pairs, 1u);
    EXPECT_EQ(s.overall.turns, 7u);
    EXPECT_EQ(s.overall.pairs, 3u);
    EXPECT_EQ(s.overall.toxicity[static_cast<std::size_t>(Toxicity::ImplicitToxic)], 2u);
    EXPECT_EQ(s.overall.assistant_stance[static_cast<std::size_t>(AssistantStance::Agree)], 1u);
    EXPECT_EQ(s.overall.certainty[static_cast<std::size_t>(Certainty::None)], 1u);
    const auto csv = summary_csv(s);
    EXPECT_NE(csv.find("human_expert,1,4,2"), std::string::npos);
    EXPECT_NE(csv.find("overall,2,7,3"), std::string::npos);
}
