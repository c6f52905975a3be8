#include "quasim/channel.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "quasim/rng.hpp"

namespace quasim {
namespace {

using nlohmann::json;

void check_word(const Word& w) {
  if (w.empty()) throw std::invalid_argument("word: empty");
  for (Symbol s : w)
    if (s >= kAlphabetSize)
      throw std::invalid_argument("word: symbol outside alphabet");
}

// 8-bit fold of FNV-1a over the framed symbols (tag word + payload words).
Symbol checksum_hi(std::uint64_t h) { return static_cast<Symbol>((h >> 4) & 0xf); }
Symbol checksum_lo(std::uint64_t h) { return static_cast<Symbol>(h & 0xf); }

std::uint64_t fold8(const std::vector<Word>& words) {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& w : words) {
    for (Symbol s : w) {
      h ^= s;
      h *= 1099511628211ull;
    }
    h ^= 0x2f;  // word boundary
    h *= 1099511628211ull;
  }
  h ^= h >> 32;
  h ^= h >> 16;
  h ^= h >> 8;
  return h & 0xff;
}

}  // namespace

bool operator==(const DecodedContent& a, const DecodedContent& b) {
  return a.is_pointer == b.is_pointer && a.value == b.value;
}

std::string content_label(const DecodedContent& content) {
  return (content.is_pointer ? "pointer:" : "status:") +
         std::to_string(content.value);
}

bool operator==(const Record& a, const Record& b) {
  return a.sender == b.sender && a.content == b.content && a.time == b.time;
}

// ---------------------------------------------------------------------------

void validate_machine(const MooreMachine& m) {
  if (m.input_count == 0) throw std::invalid_argument("machine: empty input alphabet");
  if (m.transitions.empty()) throw std::invalid_argument("machine: no states");
  if (m.outputs.size() != m.transitions.size())
    throw std::invalid_argument("machine: output table size mismatch");
  if (m.initial >= m.transitions.size())
    throw std::invalid_argument("machine: initial state out of range");
  for (const auto& row : m.transitions) {
    if (row.size() != m.input_count)
      throw std::invalid_argument("machine: transition table not total");
    for (std::size_t s : row)
      if (s >= m.transitions.size())
        throw std::invalid_argument("machine: transition target out of range");
  }
  for (const auto& w : m.outputs) check_word(w);
}

std::vector<Word> run_outputs(const MooreMachine& m, const std::vector<Symbol>& inputs) {
  validate_machine(m);
  std::vector<Word> out;
  out.reserve(inputs.size() + 1);
  std::size_t state = m.initial;
  out.push_back(m.outputs[state]);
  for (Symbol x : inputs) {
    if (x >= m.input_count)
      throw std::invalid_argument("run: input symbol outside alphabet");
    state = m.transitions[state][x];
    out.push_back(m.outputs[state]);
  }
  return out;
}

std::optional<std::vector<Symbol>> identification_experiment(const MooreMachine& a,
                                                             const MooreMachine& b,
                                                             std::size_t depth) {
  validate_machine(a);
  validate_machine(b);
  if (a.input_count != b.input_count)
    throw std::invalid_argument("identification: machines must share the input alphabet");

  if (a.outputs[a.initial] != b.outputs[b.initial])
    return std::vector<Symbol>{};  // length-0 experiment already separates

  struct Node {
    std::size_t sa, sb, len;
    std::vector<Symbol> path;
  };
  std::deque<Node> queue;
  std::vector<char> seen(a.transitions.size() * b.transitions.size(), 0);
  auto mark = [&](std::size_t sa, std::size_t sb) -> bool {
    char& c = seen[sa * b.transitions.size() + sb];
    if (c) return false;
    c = 1;
    return true;
  };
  mark(a.initial, b.initial);
  queue.push_back({a.initial, b.initial, 0, {}});
  while (!queue.empty()) {
    Node n = std::move(queue.front());
    queue.pop_front();
    if (n.len == depth) continue;
    for (Symbol x = 0; x < a.input_count; ++x) {
      const std::size_t na = a.transitions[n.sa][x];
      const std::size_t nb = b.transitions[n.sb][x];
      std::vector<Symbol> path = n.path;
      path.push_back(x);
      if (a.outputs[na] != b.outputs[nb]) return path;
      // A revisited state pair has identical future behaviour; pruning it
      // cannot hide a distinguishing string of any length.
      if (mark(na, nb)) queue.push_back({na, nb, n.len + 1, std::move(path)});
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

Word status_payload(int code) {
  if (code < 0 || code >= static_cast<int>(kAlphabetSize))
    throw std::invalid_argument("status: code outside alphabet");
  return Word{0, static_cast<Symbol>(code)};
}

Word pointer_payload(int value) {
  if (value < 0 || value >= static_cast<int>(kAlphabetSize))
    throw std::invalid_argument("pointer: value outside alphabet");
  return Word{1, static_cast<Symbol>(value)};
}

Body frame_body(const LanguageTag& tag, const std::vector<Word>& payload) {
  if (payload.empty() || payload.size() >= kAlphabetSize)
    throw std::invalid_argument("frame: payload word count out of range");
  Body body;
  body.reserve(payload.size() + 2);
  body.push_back(Word{tag.a, tag.b, static_cast<Symbol>(payload.size())});
  for (const auto& w : payload) {
    check_word(w);
    body.push_back(w);
  }
  std::vector<Word> framed(body.begin(), body.end());
  const std::uint64_t h = fold8(framed);
  body.push_back(Word{checksum_hi(h), checksum_lo(h)});
  return body;
}

Criterion make_language_criterion(const LanguageTag& tag) {
  Criterion crit;
  crit.recognizer = [tag](const Body& body) -> bool {
    if (body.size() < 3) return false;
    const Word& t = body.front();
    if (t.size() != 3 || t[0] != tag.a || t[1] != tag.b) return false;
    if (static_cast<std::size_t>(t[2]) != body.size() - 2) return false;
    for (const auto& w : body) {
      if (w.empty()) return false;
      for (Symbol s : w)
        if (s >= kAlphabetSize) return false;
    }
    return true;
  };
  crit.decoder = [](const Body& body) -> DecodedContent {
    std::vector<Word> framed(body.begin(), body.end() - 1);
    const std::uint64_t h = fold8(framed);
    const Word& check = body.back();
    if (check.size() != 2 || check[0] != checksum_hi(h) || check[1] != checksum_lo(h))
      throw MalformedMessageError("decode: checksum mismatch");
    if (body.size() != 3)
      throw MalformedMessageError("decode: unsupported payload length");
    const Word& payload = body[1];
    if (payload.size() != 2)
      throw MalformedMessageError("decode: bad payload word");
    DecodedContent content;
    if (payload[0] == 0) {
      content.is_pointer = false;
    } else if (payload[0] == 1) {
      content.is_pointer = true;
    } else {
      throw MalformedMessageError("decode: unknown content kind");
    }
    content.value = payload[1];
    return content;
  };
  return crit;
}

// ---------------------------------------------------------------------------

Agent make_alice(int pointer_values) {
  if (pointer_values < 1 || pointer_values >= static_cast<int>(kAlphabetSize))
    throw std::invalid_argument("alice: pointer value range out of alphabet");
  MooreMachine m;
  const std::size_t states = static_cast<std::size_t>(pointer_values) + 1;
  m.input_count = states;  // input 0: quiet tick; input v: interaction with value v
  m.transitions.assign(states, std::vector<std::size_t>(states));
  for (std::size_t s = 0; s < states; ++s)
    for (std::size_t x = 0; x < states; ++x) m.transitions[s][x] = x;
  m.outputs.resize(states);
  m.outputs[0] = status_payload(0);
  for (std::size_t v = 1; v < states; ++v)
    m.outputs[v] = pointer_payload(static_cast<int>(v));
  m.initial = 0;
  return Agent{"A", std::move(m), kAliceTag};
}

std::vector<Agent> make_noise_agents(std::size_t count, int pointer_values) {
  std::vector<Agent> agents;
  agents.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Symbol tag_a = static_cast<Symbol>((kAliceTag.a + 1 + i) % kAlphabetSize);
    const LanguageTag tag{tag_a, kAliceTag.b};
    if (i == 0) {
      // Parrot: Alice's machine verbatim, so her content recurs on the
      // channel wrapped in a different language.
      Agent a = make_alice(pointer_values);
      a.name = "noise-parrot";
      a.tag = tag;
      agents.push_back(std::move(a));
      continue;
    }
    // Babblers: small cyclic machines emitting assorted words.
    MooreMachine m;
    const std::size_t states = 3 + (i % 3);
    m.input_count = 4;
    m.transitions.assign(states, std::vector<std::size_t>(m.input_count));
    m.outputs.resize(states);
    for (std::size_t s = 0; s < states; ++s) {
      for (std::size_t x = 0; x < m.input_count; ++x)
        m.transitions[s][x] = (s + x + 1) % states;
      m.outputs[s] = Word{static_cast<Symbol>((2 * s + i) % kAlphabetSize),
                          static_cast<Symbol>((3 * s + 2 * i + 1) % kAlphabetSize)};
    }
    m.initial = 0;
    agents.push_back(Agent{"noise-" + std::to_string(i), std::move(m), tag});
  }
  return agents;
}

namespace {

// Shared tick loop: `alice_input` supplies the per-tick S-interaction symbol
// (0 = quiet).  Draw order per tick is fixed — alice input, one input per
// noise agent, rotation jitter — so every stream is a pure function of the
// seed and the schedule source.
ChannelResult drive_channel(const Agent& alice, const std::vector<Agent>& noise,
                            std::int64_t ticks, Rng& rng,
                            const std::function<Symbol(Rng&)>& alice_input) {
  validate_machine(alice.machine);
  for (const auto& a : noise) validate_machine(a.machine);
  if (ticks < 1) throw std::invalid_argument("channel: ticks must be >= 1");

  ChannelResult result;
  std::size_t alice_state = alice.machine.initial;
  std::vector<std::size_t> noise_state(noise.size());
  for (std::size_t i = 0; i < noise.size(); ++i)
    noise_state[i] = noise[i].machine.initial;

  const std::size_t agent_count = noise.size() + 1;
  for (std::int64_t t = 0; t < ticks; ++t) {
    const Symbol input = alice_input(rng);
    if (input >= alice.machine.input_count)
      throw std::invalid_argument("channel: interaction value out of range");
    const bool interact = input != 0;
    alice_state = alice.machine.transitions[alice_state][input];
    const Word& out = alice.machine.outputs[alice_state];

    Message msg;
    msg.sender_tag = alice.name;
    msg.kind = out[0] == 1 ? MessageKind::kPointer : MessageKind::kStatus;
    msg.value = out.size() > 1 ? out[1] : 0;
    msg.body = frame_body(alice.tag, {out});
    msg.emit_time = t;

    // Reporting rules: a pointer message appears exactly on interaction
    // ticks and names the interacting value.
    if (msg.kind == MessageKind::kPointer) {
      if (!interact || msg.value != input)
        throw std::logic_error("channel: reporter emitted an untruthful pointer");
    } else if (interact) {
      throw std::logic_error("channel: reporter suppressed an interaction");
    }

    std::vector<Message> tick_messages;
    tick_messages.push_back(msg);
    result.alice.push_back(std::move(msg));

    for (std::size_t i = 0; i < noise.size(); ++i) {
      const Symbol noise_input =
          static_cast<Symbol>(rng.next_index(noise[i].machine.input_count));
      noise_state[i] = noise[i].machine.transitions[noise_state[i]][noise_input];
      Message nm;
      nm.sender_tag = noise[i].name;
      nm.kind = MessageKind::kNoise;
      nm.value = -1;
      nm.body = frame_body(noise[i].tag, {noise[i].machine.outputs[noise_state[i]]});
      nm.emit_time = t;
      tick_messages.push_back(std::move(nm));
    }

    const std::size_t rotation =
        (static_cast<std::size_t>(t) + rng.next_index(agent_count)) % agent_count;
    for (std::size_t k = 0; k < tick_messages.size(); ++k)
      result.stream.push_back(tick_messages[(rotation + k) % tick_messages.size()]);
  }
  return result;
}

}  // namespace

ChannelResult run_channel(const Agent& alice, const std::vector<Agent>& noise,
                          std::int64_t ticks, std::uint64_t seed,
                          const ChannelOptions& options) {
  if (!(options.interaction_prob >= 0.0 && options.interaction_prob <= 1.0))
    throw std::invalid_argument("channel: interaction probability out of range");
  const std::size_t pointer_values = alice.machine.input_count - 1;
  Rng rng(seed);
  return drive_channel(alice, noise, ticks, rng, [&](Rng& r) {
    const bool interact =
        pointer_values > 0 && r.next_unit() < options.interaction_prob;
    return interact ? static_cast<Symbol>(1 + r.next_index(pointer_values))
                    : Symbol{0};
  });
}

ChannelResult run_channel_scripted(const Agent& alice,
                                   const std::vector<Agent>& noise,
                                   const std::vector<int>& schedule,
                                   std::uint64_t seed) {
  if (schedule.empty())
    throw std::invalid_argument("channel: empty interaction schedule");
  for (int v : schedule)
    if (v < 0) throw std::invalid_argument("channel: negative schedule entry");
  std::size_t next = 0;
  Rng rng(seed);
  return drive_channel(alice, noise, static_cast<std::int64_t>(schedule.size()),
                       rng,
                       [&](Rng&) { return static_cast<Symbol>(schedule[next++]); });
}

std::vector<Record> decode(const std::vector<Message>& stream,
                           const Criterion& criterion) {
  std::vector<Record> records;
  for (const auto& msg : stream) {
    if (!criterion.recognizer(msg.body)) continue;
    Record rec;
    rec.sender = "A";
    rec.content = criterion.decoder(msg.body);
    rec.time = msg.emit_time;
    records.push_back(std::move(rec));
  }
  return records;
}

AnnotatedHistogram histogram(const std::vector<Record>& records, int pointer_values) {
  if (pointer_values < 1)
    throw std::invalid_argument("histogram: pointer value range must be >= 1");
  AnnotatedHistogram h;
  h.counts.assign(static_cast<std::size_t>(pointer_values) + 1, 0);
  h.times.assign(static_cast<std::size_t>(pointer_values) + 1, {});
  for (const auto& rec : records) {
    if (!rec.content.is_pointer) continue;
    if (rec.content.value < 0 || rec.content.value > pointer_values)
      throw std::invalid_argument("histogram: pointer value out of range");
    h.counts[rec.content.value] += 1;
    h.times[rec.content.value].push_back(rec.time);
  }
  return h;
}

// ---------------------------------------------------------------------------

namespace {

std::string kind_name(MessageKind k) {
  switch (k) {
    case MessageKind::kStatus: return "status";
    case MessageKind::kPointer: return "pointer";
    case MessageKind::kNoise: return "noise";
  }
  return "noise";
}

MessageKind kind_from(const std::string& s) {
  if (s == "status") return MessageKind::kStatus;
  if (s == "pointer") return MessageKind::kPointer;
  if (s == "noise") return MessageKind::kNoise;
  throw std::runtime_error("transcript: unknown kind '" + s + "'");
}

}  // namespace

void save_transcript(const std::vector<Message>& stream, std::ostream& os) {
  for (const auto& msg : stream) {
    json j;
    j["sender_tag"] = msg.sender_tag;
    j["kind"] = kind_name(msg.kind);
    j["value"] = msg.value;
    j["emit_time"] = msg.emit_time;
    json body = json::array();
    for (const auto& w : msg.body) {
      json word = json::array();
      for (Symbol s : w) word.push_back(static_cast<int>(s));
      body.push_back(std::move(word));
    }
    j["body"] = std::move(body);
    os << j.dump() << "\n";
  }
}

void save_transcript(const std::vector<Message>& stream, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save: cannot open " + path);
  save_transcript(stream, os);
  if (!os) throw std::runtime_error("save: write failed for " + path);
}

std::vector<Message> load_transcript(std::istream& is) {
  std::vector<Message> stream;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    Message msg;
    msg.sender_tag = j.at("sender_tag").get<std::string>();
    msg.kind = kind_from(j.at("kind").get<std::string>());
    msg.value = j.at("value").get<int>();
    msg.emit_time = j.at("emit_time").get<std::int64_t>();
    for (const auto& word : j.at("body")) {
      Word w;
      for (const auto& s : word) w.push_back(static_cast<Symbol>(s.get<int>()));
      msg.body.push_back(std::move(w));
    }
    stream.push_back(std::move(msg));
  }
  return stream;
}

std::vector<Message> load_transcript(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load: cannot open " + path);
  return load_transcript(is);
}

void save_records_csv(const std::vector<Record>& records, std::ostream& os) {
  os << "sender,content,time\n";
  for (const auto& rec : records)
    os << rec.sender << "," << content_label(rec.content) << "," << rec.time
       << "\n";
}

void save_records_csv(const std::vector<Record>& records, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save: cannot open " + path);
  save_records_csv(records, os);
  if (!os) throw std::runtime_error("save: write failed for " + path);
}

}  // namespace quasim
