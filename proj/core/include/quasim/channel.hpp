// Broadcast channel with one honest reporter among noise sources.
//
// Agents are Moore machines whose per-tick output words are framed into
// messages over a sixteen-symbol alphabet.  The reporter ("Alice") frames
// her payloads in a declared language: a tag word carrying the language
// prefix and a payload length, the payload itself, and a checksum word.
// Listeners hold no channel-side metadata; a Criterion recognizes language
// membership from the body alone and decodes content, so identifying the
// sender is exactly the ability to decide membership in the language.
//
// Distortion is detectable, not impossible: a corrupted body either drops
// out of the language, fails the checksum (malformed-message error), or
// silently decodes to a different record with probability bounded by
// kSilentCorruptionBound (exhaustively measured in tests).

#ifndef QUASIM_CHANNEL_HPP_
#define QUASIM_CHANNEL_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace quasim {

inline constexpr std::size_t kAlphabetSize = 16;
using Symbol = std::uint8_t;          // 0 .. 15
using Word = std::vector<Symbol>;     // finite symbol string
using Body = std::vector<Word>;       // framed word list

enum class MessageKind { kStatus, kPointer, kNoise };

struct Message {
  std::string sender_tag;  // channel bookkeeping; never visible to decoding
  Body body;
  MessageKind kind = MessageKind::kNoise;
  int value = -1;          // status code or pointer value; -1 for noise
  std::int64_t emit_time = 0;
};

struct DecodedContent {
  bool is_pointer = false;
  int value = 0;
};
bool operator==(const DecodedContent& a, const DecodedContent& b);

// Canonical text form, "status:N" or "pointer:N"; shared by the records CSV
// and the consistency checks' record labels.
std::string content_label(const DecodedContent& content);

struct Record {
  std::string sender;  // always "A": recognition asserts language membership
  DecodedContent content;
  std::int64_t time = 0;
};
bool operator==(const Record& a, const Record& b);

struct MalformedMessageError : std::runtime_error {
  explicit MalformedMessageError(const std::string& what)
      : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Moore machines: output is a function of state; feeding an input string of
// length L yields L+1 output words (initial state included).

struct MooreMachine {
  std::size_t input_count = 0;
  std::vector<std::vector<std::size_t>> transitions;  // [state][input] -> state
  std::vector<Word> outputs;                          // [state]
  std::size_t initial = 0;
};

void validate_machine(const MooreMachine& m);

// Output sequence for an input string, initial state's output first.
std::vector<Word> run_outputs(const MooreMachine& m, const std::vector<Symbol>& inputs);

// Shortest input string (breadth-first, lexicographic within a length) of
// length <= depth on which the machines' output sequences differ; empty
// string when the initial outputs already differ; nullopt when the machines
// are indistinguishable to that depth.
std::optional<std::vector<Symbol>> identification_experiment(const MooreMachine& a,
                                                             const MooreMachine& b,
                                                             std::size_t depth);

// ---------------------------------------------------------------------------
// Framing.

struct LanguageTag {
  Symbol a = 0;
  Symbol b = 0;
};

inline constexpr LanguageTag kAliceTag{10, 5};

// Measured silent-corruption ceiling: fraction of single-word corruptions of
// a valid body that decode to a different valid record without raising an
// error.  The checksum is 8 bits, so the expected rate is about 1/256.
inline constexpr double kSilentCorruptionBound = 1.0 / 64.0;

Word status_payload(int code);    // [0, code]
Word pointer_payload(int value);  // [1, value]

// [tag.a, tag.b, payload word count], payload words, checksum word.
Body frame_body(const LanguageTag& tag, const std::vector<Word>& payload);

// Deterministic decision procedure + decoder for the tag's language.
// The recognizer checks framing shape and tag; the decoder additionally
// verifies the checksum and payload form, throwing MalformedMessageError.
struct Criterion {
  std::function<bool(const Body&)> recognizer;
  std::function<DecodedContent(const Body&)> decoder;
};

Criterion make_language_criterion(const LanguageTag& tag);

// ---------------------------------------------------------------------------
// Channel driver.

struct Agent {
  std::string name;      // channel bookkeeping only
  MooreMachine machine;
  LanguageTag tag;
};

// Reporter over pointer values 1..pointer_values: input 0 is a quiet tick
// (status output), input v emits pointer v on the same tick.
Agent make_alice(int pointer_values);

// Deterministic zoo of off-language agents; `parrot_alice` duplicates
// Alice's payload content under a different language tag.
std::vector<Agent> make_noise_agents(std::size_t count, int pointer_values);

struct ChannelOptions {
  double interaction_prob = 0.25;  // per-tick probability of an S interaction
};

struct ChannelResult {
  std::vector<Message> stream;  // all agents, interleaved
  std::vector<Message> alice;   // Alice's messages alone, in emit order
};

// Drives every agent for `ticks` steps.  The S-interaction schedule, noise
// inputs, and the per-tick round-robin rotation are all derived from the
// seed; the same inputs always produce the same stream.  Alice's messages
// are checked against her reporting rules (truthful, real-time, pointer
// values only on interaction ticks).
ChannelResult run_channel(const Agent& alice, const std::vector<Agent>& noise,
                          std::int64_t ticks, std::uint64_t seed,
                          const ChannelOptions& options = {});

// Same driver with an explicit per-tick interaction schedule: entry 0 is a
// quiet tick, entry v >= 1 an S interaction carrying value v.  Noise inputs
// and stream rotation remain seed-driven.
ChannelResult run_channel_scripted(const Agent& alice,
                                   const std::vector<Agent>& noise,
                                   const std::vector<int>& schedule,
                                   std::uint64_t seed);

// Applies the criterion to every message body in stream order.
std::vector<Record> decode(const std::vector<Message>& stream,
                           const Criterion& criterion);

// Counts and ordered arrival times per pointer value (index 0 unused by the
// reporter; status records are skipped).  Out-of-range values throw.
struct AnnotatedHistogram {
  std::vector<std::size_t> counts;              // [pointer value]
  std::vector<std::vector<std::int64_t>> times; // [pointer value]
};

AnnotatedHistogram histogram(const std::vector<Record>& records, int pointer_values);

// ---------------------------------------------------------------------------
// Serialization: transcripts as JSON lines (one message per line, sorted
// keys); records as CSV "sender,content,time".

void save_transcript(const std::vector<Message>& stream, std::ostream& os);
void save_transcript(const std::vector<Message>& stream, const std::string& path);
std::vector<Message> load_transcript(std::istream& is);
std::vector<Message> load_transcript(const std::string& path);

void save_records_csv(const std::vector<Record>& records, std::ostream& os);
void save_records_csv(const std::vector<Record>& records, const std::string& path);

}  // namespace quasim

#endif  // QUASIM_CHANNEL_HPP_
