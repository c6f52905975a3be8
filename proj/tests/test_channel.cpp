#include <cstdint>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "machine_pair.hpp"
#include "quasim/channel.hpp"

using namespace quasim;

namespace {

// All words of the given length over the channel alphabet, by counting.
std::vector<Word> all_words(std::size_t length) {
  std::vector<Word> out;
  Word w(length, 0);
  while (true) {
    out.push_back(w);
    std::size_t pos = length;
    while (pos > 0) {
      --pos;
      if (++w[pos] < kAlphabetSize) break;
      w[pos] = 0;
      if (pos == 0) return out;
    }
    if (length == 0) return out;
  }
}

}  // namespace

TEST_CASE("machine runs produce one output per state visited") {
  const MooreMachine m = machine_pair::deep_counter();
  CHECK(run_outputs(m, {}).size() == 1);
  const auto outs = run_outputs(m, {0, 1, 0});
  REQUIRE(outs.size() == 4);
  CHECK(outs[0] == Word{10});
  CHECK(outs[3] == Word{10});
  CHECK_THROWS_AS(run_outputs(m, {7}), std::invalid_argument);

  MooreMachine bad = m;
  bad.outputs.pop_back();
  CHECK_THROWS_AS(validate_machine(bad), std::invalid_argument);
  bad = m;
  bad.transitions[0][0] = 99;
  CHECK_THROWS_AS(validate_machine(bad), std::invalid_argument);
}

TEST_CASE("identification experiments: trivial separations and self-identity") {
  const MooreMachine m = machine_pair::flat_counter();
  CHECK(!identification_experiment(m, m, 6).has_value());

  MooreMachine loud = m;
  loud.outputs[0] = Word{11};
  const auto exp = identification_experiment(m, loud, 3);
  REQUIRE(exp.has_value());
  CHECK(exp->empty());  // initial outputs already differ
}

TEST_CASE("counter pair is depth-3 blind and depth-4 separable") {
  const MooreMachine deep = machine_pair::deep_counter();
  const MooreMachine flat = machine_pair::flat_counter();

  CHECK(!identification_experiment(deep, flat, 3).has_value());

  const auto found = identification_experiment(deep, flat, 4);
  REQUIRE(found.has_value());
  CHECK(found->size() == 4);
  CHECK(run_outputs(deep, *found) != run_outputs(flat, *found));

  // Independent exhaustive sweep: every string up to length 3 agrees and
  // every length-4 string separates.
  for (std::size_t len = 0; len <= 4; ++len) {
    std::vector<Symbol> input(len, 0);
    const std::size_t total = std::size_t{1} << len;
    for (std::size_t code = 0; code < total; ++code) {
      for (std::size_t i = 0; i < len; ++i)
        input[i] = static_cast<Symbol>((code >> i) & 1);
      const bool same = run_outputs(deep, input) == run_outputs(flat, input);
      if (len <= 3) {
        CHECK(same);
      } else {
        CHECK(!same);
      }
    }
  }
}

TEST_CASE("framing shape, tags, and payload constructors") {
  CHECK(status_payload(0) == Word{0, 0});
  CHECK(pointer_payload(3) == Word{1, 3});
  CHECK_THROWS_AS(pointer_payload(16), std::invalid_argument);

  const Body body = frame_body(kAliceTag, {pointer_payload(2)});
  REQUIRE(body.size() == 3);
  CHECK(body[0] == Word{10, 5, 1});
  CHECK(body[1] == Word{1, 2});
  CHECK(body[2].size() == 2);
  CHECK_THROWS_AS(frame_body(kAliceTag, {}), std::invalid_argument);
}

TEST_CASE("criterion accepts the language and decodes its content") {
  const Criterion crit = make_language_criterion(kAliceTag);
  const Body ok = frame_body(kAliceTag, {pointer_payload(2)});
  REQUIRE(crit.recognizer(ok));
  const DecodedContent content = crit.decoder(ok);
  CHECK(content.is_pointer);
  CHECK(content.value == 2);
  CHECK(content_label(content) == "pointer:2");
  CHECK(content_label(crit.decoder(frame_body(kAliceTag, {status_payload(0)}))) ==
        "status:0");

  // Same content under another language tag is not recognized: membership in
  // the language, not the content, is what identifies the sender.
  const Body parrot = frame_body(LanguageTag{11, 5}, {pointer_payload(2)});
  CHECK(!crit.recognizer(parrot));

  // A corrupted checksum stays recognizable but fails decoding loudly.
  Body damaged = ok;
  damaged.back()[0] = static_cast<Symbol>((damaged.back()[0] + 1) % kAlphabetSize);
  REQUIRE(crit.recognizer(damaged));
  CHECK_THROWS_AS(crit.decoder(damaged), MalformedMessageError);
}

TEST_CASE("silent corruption stays under the documented ceiling") {
  const Criterion crit = make_language_criterion(kAliceTag);
  const std::vector<Body> originals = {
      frame_body(kAliceTag, {status_payload(0)}),
      frame_body(kAliceTag, {pointer_payload(1)}),
      frame_body(kAliceTag, {pointer_payload(2)}),
      frame_body(kAliceTag, {pointer_payload(3)}),
  };
  for (const Body& original : originals) {
    const DecodedContent truth = crit.decoder(original);
    std::size_t total = 0;
    std::size_t silent = 0;
    for (std::size_t pos = 0; pos < original.size(); ++pos) {
      for (std::size_t len = 1; len <= 3; ++len) {
        for (const Word& w : all_words(len)) {
          if (w == original[pos]) continue;
          Body mutated = original;
          mutated[pos] = w;
          ++total;
          if (!crit.recognizer(mutated)) continue;  // detected: out of language
          try {
            const DecodedContent got = crit.decoder(mutated);
            if (!(got == truth)) ++silent;
          } catch (const MalformedMessageError&) {
            // detected: checksum or payload shape
          }
        }
      }
    }
    REQUIRE(total > 0);
    CHECK(static_cast<double>(silent) <=
          kSilentCorruptionBound * static_cast<double>(total));
  }
}

TEST_CASE("channel driver is a pure function of seed and schedule") {
  const Agent alice = make_alice(3);
  const auto noise = make_noise_agents(3, 3);
  const ChannelResult a = run_channel(alice, noise, 50, 99);
  const ChannelResult b = run_channel(alice, noise, 50, 99);
  const ChannelResult c = run_channel(alice, noise, 50, 100);

  CHECK(a.alice.size() == 50);
  CHECK(a.stream.size() == 50 * 4);

  std::ostringstream sa, sb, sc;
  save_transcript(a.stream, sa);
  save_transcript(b.stream, sb);
  save_transcript(c.stream, sc);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str() != sc.str());
}

TEST_CASE("scripted ticks drive the reporter symbol for symbol") {
  const Agent alice = make_alice(2);
  const auto noise = make_noise_agents(2, 2);
  const ChannelResult r = run_channel_scripted(alice, noise, {0, 2, 1, 0}, 7);
  REQUIRE(r.alice.size() == 4);
  CHECK(r.alice[0].kind == MessageKind::kStatus);
  CHECK(r.alice[1].kind == MessageKind::kPointer);
  CHECK(r.alice[1].value == 2);
  CHECK(r.alice[2].kind == MessageKind::kPointer);
  CHECK(r.alice[2].value == 1);
  CHECK(r.alice[3].kind == MessageKind::kStatus);
  for (std::int64_t t = 0; t < 4; ++t) CHECK(r.alice[t].emit_time == t);

  CHECK_THROWS_AS(run_channel_scripted(alice, noise, {}, 7), std::invalid_argument);
  CHECK_THROWS_AS(run_channel_scripted(alice, noise, {-1}, 7), std::invalid_argument);
  CHECK_THROWS_AS(run_channel_scripted(alice, noise, {3}, 7), std::invalid_argument);
}

TEST_CASE("decoding the full stream recovers exactly the reporter's story") {
  const Agent alice = make_alice(3);
  const auto noise = make_noise_agents(3, 3);
  const ChannelResult r = run_channel(alice, noise, 1000, 424242);
  const Criterion crit = make_language_criterion(kAliceTag);
  const auto records = decode(r.stream, crit);

  // Recall: one record per tick, none missing.  Precision: nothing from the
  // noise floor decodes, the parrot included.
  REQUIRE(records.size() == r.alice.size());
  std::size_t pointers = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Message& truth = r.alice[i];
    CHECK(records[i].sender == "A");
    CHECK(records[i].time == truth.emit_time);
    CHECK(records[i].content.is_pointer == (truth.kind == MessageKind::kPointer));
    CHECK(records[i].content.value == truth.value);
    pointers += records[i].content.is_pointer ? 1 : 0;
  }
  CHECK(pointers > 0);       // the schedule interacted at least once
  CHECK(pointers < records.size());

  // The parrot really was on the air with Alice-shaped payloads.
  std::size_t parrot_pointer_bodies = 0;
  for (const auto& msg : r.stream) {
    if (msg.sender_tag != "noise-parrot") continue;
    CHECK(msg.kind == MessageKind::kNoise);
    CHECK(!crit.recognizer(msg.body));
    if (msg.body.size() == 3 && msg.body[1].size() == 2 && msg.body[1][0] <= 1)
      ++parrot_pointer_bodies;
  }
  CHECK(parrot_pointer_bodies > 0);
}

TEST_CASE("histogram tallies pointer arrivals and rejects range abuse") {
  const auto rec = [](bool is_ptr, int value, std::int64_t t) {
    return Record{"A", DecodedContent{is_ptr, value}, t};
  };
  const std::vector<Record> records = {rec(false, 0, 1), rec(true, 1, 3),
                                       rec(true, 1, 5), rec(true, 2, 9)};
  const AnnotatedHistogram h = histogram(records, 2);
  REQUIRE(h.counts.size() == 3);
  CHECK(h.counts[0] == 0);
  CHECK(h.counts[1] == 2);
  CHECK(h.counts[2] == 1);
  CHECK(h.times[1] == std::vector<std::int64_t>{3, 5});
  CHECK(h.times[2] == std::vector<std::int64_t>{9});

  const AnnotatedHistogram empty = histogram({}, 4);
  for (std::size_t c : empty.counts) CHECK(c == 0);

  CHECK_THROWS_AS(histogram({rec(true, 3, 0)}, 2), std::invalid_argument);
  CHECK_THROWS_AS(histogram(records, 0), std::invalid_argument);
}

TEST_CASE("histogram totals match the pointer records of a real run") {
  const Agent alice = make_alice(3);
  const auto noise = make_noise_agents(3, 3);
  const ChannelResult r = run_channel(alice, noise, 400, 5);
  const auto records = decode(r.stream, make_language_criterion(kAliceTag));
  const AnnotatedHistogram h = histogram(records, 3);
  std::size_t total = 0;
  for (std::size_t v = 1; v <= 3; ++v) {
    total += h.counts[v];
    CHECK(h.times[v].size() == h.counts[v]);
    for (std::size_t i = 1; i < h.times[v].size(); ++i)
      CHECK(h.times[v][i - 1] < h.times[v][i]);
  }
  std::size_t pointer_records = 0;
  for (const auto& rec : records) pointer_records += rec.content.is_pointer ? 1 : 0;
  CHECK(total == pointer_records);
}

TEST_CASE("transcripts round-trip through JSON lines byte for byte") {
  const Agent alice = make_alice(2);
  const auto noise = make_noise_agents(2, 2);
  const ChannelResult r = run_channel(alice, noise, 25, 11);

  std::ostringstream first;
  save_transcript(r.stream, first);
  std::istringstream in(first.str());
  const auto reloaded = load_transcript(in);
  REQUIRE(reloaded.size() == r.stream.size());
  for (std::size_t i = 0; i < reloaded.size(); ++i) {
    CHECK(reloaded[i].sender_tag == r.stream[i].sender_tag);
    CHECK(reloaded[i].kind == r.stream[i].kind);
    CHECK(reloaded[i].value == r.stream[i].value);
    CHECK(reloaded[i].emit_time == r.stream[i].emit_time);
    CHECK(reloaded[i].body == r.stream[i].body);
  }
  std::ostringstream second;
  save_transcript(reloaded, second);
  CHECK(first.str() == second.str());
}

TEST_CASE("records serialize as a three-column CSV") {
  const std::vector<Record> records = {
      Record{"A", DecodedContent{false, 0}, 0},
      Record{"A", DecodedContent{true, 2}, 4},
  };
  std::ostringstream os;
  save_records_csv(records, os);
  CHECK(os.str() == "sender,content,time\nA,status:0,0\nA,pointer:2,4\n");
}
