#include <gtest/gtest.h>

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cogfit/corpus/session_io.hpp"
#include "cogfit/corpus/split.hpp"
#include "cogfit/corpus/templates.hpp"
#include "cogfit/corpus/transcript.hpp"
#include "cogfit/registry.hpp"
#include "cogfit/tasks/simulate.hpp"

using namespace cogfit;
using namespace cogfit::corpus;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no cogfit::Error thrown";
    return ErrorKind::invariant;
}

Session tiny_bandit(const std::string& pid, const std::vector<std::string>& choices,
                    const std::vector<double>& rewards) {
    Session s;
    s.experiment_id = "bandit";
    s.participant_id = pid;
    for (std::size_t i = 0; i < choices.size(); ++i) {
        Trial t;
        t.index = i;
        t.choice_set = {"B", "C"};
        t.chosen = choices[i];
        t.feedback = rewards[i];
        s.trials.push_back(t);
    }
    return s;
}

std::vector<Session> one_per_participant(std::size_t n) {
    std::vector<Session> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(tiny_bandit("p" + std::to_string(i), {"B"}, {1.0}));
    return out;
}

}  // namespace

TEST(ParseTranscript, SingleChoiceToken) {
    const auto t = parse_transcript("You press <<B>> and get 0 points.");
    ASSERT_EQ(t.choice_spans.size(), 1u);
    EXPECT_EQ(t.choice_spans[0].token, "B");
    EXPECT_EQ(t.choice_spans[0].event, 0u);
}

TEST(ParseTranscript, LineWithoutMarkersIsEvent) {
    const auto t = parse_transcript("Intro line.\n\nYou see two machines.");
    EXPECT_EQ(t.instruction, "Intro line.");
    ASSERT_EQ(t.events.size(), 1u);
    EXPECT_TRUE(t.choice_spans.empty());
}

TEST(ParseTranscript, EscapedMarkersNormalized) {
    const std::string text = "You press $<<$4$>>$.\nYou press $<<$8$>>$.";
    const auto t = parse_transcript(text);
    EXPECT_EQ(t.tokens(), (std::vector<std::string>{"4", "8"}));

    // oracle: a plain character scan over the normalized text
    std::string plain = text;
    for (std::size_t p; (p = plain.find("$<<$")) != std::string::npos;) plain.replace(p, 4, "<<");
    for (std::size_t p; (p = plain.find("$>>$")) != std::string::npos;) plain.replace(p, 4, ">>");
    std::vector<std::string> scanned;
    for (std::size_t i = 0; (i = plain.find("<<", i)) != std::string::npos;) {
        const auto j = plain.find(">>", i + 2);
        scanned.push_back(plain.substr(i + 2, j - i - 2));
        i = j + 2;
    }
    EXPECT_EQ(t.tokens(), scanned);
}

TEST(ParseTranscript, InstructionEndsAtFirstBlankLine) {
    const auto t = parse_transcript("Line one.\nLine two.\n\nGame 1.\n\nYou press <<J>>.\n");
    EXPECT_EQ(t.instruction, "Line one.\nLine two.");
    EXPECT_EQ(t.events, (std::vector<std::string>{"Game 1.", "You press <<J>>."}));
    EXPECT_EQ(t.choice_spans[0].event, 1u);
}

TEST(ParseTranscript, Errors) {
    EXPECT_EQ(kind_of([] { parse_transcript(""); }), ErrorKind::empty_input);
    try {
        parse_transcript("ok\n\nYou press <<B and get 0.\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::malformed_transcript);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
    EXPECT_EQ(kind_of([] { parse_transcript("You press B>> now"); }), ErrorKind::malformed_transcript);
}

TEST(RenderTranscript, MarkerPresenceAndZeroReward) {
    const auto s = tiny_bandit("p", {"B"}, {0.0});
    const std::string text = render_transcript(s, "horizon.v1");
    EXPECT_NE(text.find("<<B>>"), std::string::npos);
    EXPECT_NE(text.find("get 0 points"), std::string::npos);
}

TEST(RenderTranscript, UnknownTemplate) {
    const auto s = tiny_bandit("p", {"B"}, {0.0});
    EXPECT_EQ(kind_of([&] { (void)render_transcript(s, "nope.v9"); }), ErrorKind::unknown_template);
    EXPECT_EQ(kind_of([&] { (void)render_transcript(s, "two_step.v1"); }), ErrorKind::unknown_template);
}

TEST(RenderTranscript, HorizonRoundTrip100Trials) {
    auto spec = tasks::parse_task_spec("kind = horizon\nn_games = 20\np_long = 1\n");
    const auto model = find_model("uniform");
    auto env = tasks::make_environment(spec, 11);
    const auto s = tasks::simulate_agent(*model, {}, *env, 12);
    ASSERT_EQ(s.trials.size(), 200u);
    std::vector<std::string> chosen;
    for (const auto& t : s.trials)
        if (!t.instructed) chosen.push_back(t.chosen);
    EXPECT_EQ(chosen.size(), 120u);
    const auto parsed = parse_transcript(render_transcript(s, "horizon.v1"));
    EXPECT_EQ(parsed.tokens(), chosen);
}

TEST(RenderTranscript, RoundTripAllTemplates) {
    const std::vector<std::pair<std::string, std::string>> cases{
        {"kind = horizon\nn_games = 5", "rescorla_wagner"},
        {"kind = two_step\nn_trials = 30", "dual_systems"},
        {"kind = multi_attribute\nn_trials = 25", "ttb"}};
    for (const auto& [text, tag] : cases) {
        const auto spec = tasks::parse_task_spec(text);
        const auto model = find_model(tag);
        const auto sessions = tasks::simulate_sessions(*model, model->initial_params({}), spec, 10, 5);
        for (const auto& s : sessions) {
            std::vector<std::string> chosen;
            for (const auto& t : s.trials)
                if (!t.instructed) chosen.push_back(t.chosen);
            const auto parsed = parse_transcript(render_transcript(s, default_template(s.experiment_id)));
            EXPECT_EQ(parsed.tokens(), chosen) << tag;
        }
    }
}

TEST(Split, TenParticipantsTenPercent) {
    const auto sessions = one_per_participant(10);
    const auto split = split_participants(sessions, 0.1, 1);
    EXPECT_EQ(split.train.size(), 9u);
    EXPECT_EQ(split.test.size(), 1u);
}

TEST(Split, DeterministicUnderSeed) {
    const auto sessions = one_per_participant(30);
    const auto a = split_participants(sessions, 0.2, 99);
    const auto b = split_participants(sessions, 0.2, 99);
    EXPECT_EQ(participants(a.test), participants(b.test));
}

TEST(Split, PartitionForManySeeds) {
    const auto sessions = one_per_participant(100);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto split = split_participants(sessions, 0.1, seed);
        const auto tr = participants(split.train), te = participants(split.test);
        EXPECT_EQ(te.size(), 10u);
        std::set<std::string> all = tr;
        all.insert(te.begin(), te.end());
        EXPECT_EQ(all.size(), 100u);
        for (const auto& id : te) EXPECT_FALSE(tr.contains(id));
    }
}

TEST(Split, MultipleSessionsStayTogether) {
    std::vector<Session> sessions;
    for (int i = 0; i < 6; ++i) {
        sessions.push_back(tiny_bandit("p" + std::to_string(i % 3), {"B"}, {1.0}));
    }
    const auto split = split_participants(sessions, 0.34, 4);
    for (const auto& id : participants(split.test)) EXPECT_FALSE(participants(split.train).contains(id));
    EXPECT_EQ(split.test.size() + split.train.size(), 6u);
}

TEST(Split, Errors) {
    EXPECT_EQ(kind_of([] { split_participants(one_per_participant(1), 0.1, 0); }), ErrorKind::cannot_split);
    EXPECT_EQ(kind_of([] { split_participants(one_per_participant(5), 1.5, 0); }), ErrorKind::precondition);
}

TEST(SessionIo, RoundTripIsCanonical) {
    const std::string line =
        R"({"zeta":1,"trials":[{"index":0,"choice_set":["A","B"],"chosen":"B","stimulus":{"x":[1,2],)"
        R"("tag":"hi","lot":{"outcomes":[4,0],"probs":[0.8,0.2]},"s":3},"feedback":2.5,"custom":{"k":true}}],)"
        R"("participant_id":"p1","experiment_id":"e"})";
    std::istringstream in(line + "\n");
    const auto sessions = read_sessions(in);
    ASSERT_EQ(sessions.size(), 1u);
    EXPECT_EQ(sessions[0].extra["zeta"], 1);
    EXPECT_EQ(sessions[0].trials[0].extra["custom"]["k"], true);
    EXPECT_EQ(sessions[0].trials[0].scalar("s"), 3.0);
    const std::string once = dump_sessions(sessions);
    std::istringstream again(once);
    EXPECT_EQ(dump_sessions(read_sessions(again)), once);
}

TEST(SessionIo, InvalidSessionsRejected) {
    std::istringstream bad_choice(
        R"({"experiment_id":"e","participant_id":"p","trials":[{"index":0,"choice_set":["A"],"chosen":"Z"}]})");
    EXPECT_EQ(kind_of([&] { read_sessions(bad_choice); }), ErrorKind::malformed_session);
    std::istringstream bad_index(
        R"({"experiment_id":"e","participant_id":"p","trials":[{"index":1,"choice_set":["A"],"chosen":"A"}]})");
    EXPECT_EQ(kind_of([&] { read_sessions(bad_index); }), ErrorKind::malformed_session);
    std::istringstream bad_rt(
        R"({"experiment_id":"e","participant_id":"p","trials":[{"index":0,"choice_set":["A"],"chosen":"A","response_time_ms":-3}]})");
    EXPECT_EQ(kind_of([&] { read_sessions(bad_rt); }), ErrorKind::malformed_session);
}

TEST(Session, ResponseCountSkipsInstructedAndMergesGroups) {
    auto s = tiny_bandit("p", {"B", "C", "B", "C"}, {1, 1, 1, 1});
    s.trials[0].instructed = true;
    s.trials[2].response_group = 7;
    s.trials[3].response_group = 7;
    EXPECT_EQ(s.response_count(), 2u);
}
