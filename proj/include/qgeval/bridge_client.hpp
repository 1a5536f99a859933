#pragma once

// Client for the out-of-process masked-LM bridge. The protocol is
// newline-delimited JSON, one response per request, answered in request
// order:
//   -> {"id": s, "passage": s, "question": s, "answer": s}
//   <- {"id": s, "word_logliks": [x...], "words": [s...]}   or {"id": s, "error": s}
//   -> {"id": s, "mode": "embed", "text": s}
//   <- {"id": s, "vectors": [[x...]...]}

#include <netdb.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/un.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qgeval/bertscore.hpp"
#include "qgeval/error.hpp"
#include "qgeval/qascore.hpp"

namespace qgeval {

inline constexpr const char* kBridgeAddrEnv = "QGEVAL_BRIDGE_ADDR";

struct BridgeResponse {
  std::string id;
  std::vector<double> word_logliks;
  std::vector<std::string> words;
  std::vector<std::vector<double>> vectors;
  std::optional<std::string> error;
};

inline std::string encode_score_request(const std::string& id, const std::string& passage,
                                        const std::string& question, const std::string& answer) {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["passage"] = passage;
  j["question"] = question;
  j["answer"] = answer;
  return j.dump();
}

inline std::string encode_embed_request(const std::string& id, const std::string& text) {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["mode"] = "embed";
  j["text"] = text;
  return j.dump();
}

inline BridgeResponse decode_response(const std::string& line) {
  BridgeResponse r;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("bridge: malformed response: ") + e.what());
  }
  if (!j.is_object() || !j.contains("id") || !j["id"].is_string())
    throw TransportError("bridge: response without string id");
  r.id = j["id"].get<std::string>();
  try {
    if (j.contains("error")) {
      r.error = j["error"].is_string() ? j["error"].get<std::string>() : j["error"].dump();
      return r;
    }
    if (j.contains("word_logliks")) r.word_logliks = j["word_logliks"].get<std::vector<double>>();
    if (j.contains("words")) r.words = j["words"].get<std::vector<std::string>>();
    if (j.contains("vectors")) r.vectors = j["vectors"].get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("bridge: bad response field: ") + e.what());
  }
  return r;
}

/// One connection: "host:port" (TCP) or "unix:/path/to/socket".
class BridgeConnection {
 public:
  explicit BridgeConnection(std::string address) : address_(std::move(address)) { open(); }
  BridgeConnection(const BridgeConnection&) = delete;
  BridgeConnection& operator=(const BridgeConnection&) = delete;
  BridgeConnection(BridgeConnection&& o) noexcept
      : address_(std::move(o.address_)), fd_(std::exchange(o.fd_, -1)), buffer_(std::move(o.buffer_)) {}
  BridgeConnection& operator=(BridgeConnection&& o) noexcept {
    if (this != &o) {
      close();
      address_ = std::move(o.address_);
      fd_ = std::exchange(o.fd_, -1);
      buffer_ = std::move(o.buffer_);
    }
    return *this;
  }
  ~BridgeConnection() { close(); }

  const std::string& address() const noexcept { return address_; }

  void send_line(const std::string& line) {
    std::string data = line;
    data += '\n';
    std::size_t sent = 0;
    while (sent < data.size()) {
      ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw TransportError("bridge " + address_ + ": send failed: " + std::strerror(errno));
      }
      sent += static_cast<std::size_t>(n);
    }
  }

  std::string read_line() {
    while (true) {
      auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      char chunk[4096];
      ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw TransportError("bridge " + address_ + ": receive failed: " + std::strerror(errno));
      }
      if (n == 0) throw TransportError("bridge " + address_ + ": connection closed");
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  std::string address_;
  int fd_ = -1;
  std::string buffer_;

  void close() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw TransportError("cannot connect to bridge at " + address_ + ": " + why);
  }

  void open() {
    if (address_.rfind("unix:", 0) == 0) {
      const std::string path = address_.substr(5);
      sockaddr_un sa{};
      sa.sun_family = AF_UNIX;
      if (path.empty() || path.size() >= sizeof sa.sun_path) fail("bad socket path");
      std::memcpy(sa.sun_path, path.c_str(), path.size() + 1);
      fd_ = ::socket(AF_UNIX, SOCK_STREAM, 0);
      if (fd_ < 0) fail(std::strerror(errno));
      if (::connect(fd_, reinterpret_cast<sockaddr*>(&sa), sizeof sa) != 0) {
        const std::string why = std::strerror(errno);
        close();
        fail(why);
      }
      return;
    }
    auto colon = address_.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == address_.size())
      fail("expected host:port or unix:/path");
    std::string host = address_.substr(0, colon);
    const std::string port = address_.substr(colon + 1);
    if (host.size() > 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &res); rc != 0) fail(::gai_strerror(rc));
    std::string why = "no usable address";
    for (addrinfo* p = res; p != nullptr; p = p->ai_next) {
      fd_ = ::socket(p->ai_family, p->ai_socktype, p->ai_protocol);
      if (fd_ < 0) {
        why = std::strerror(errno);
        continue;
      }
      if (::connect(fd_, p->ai_addr, p->ai_addrlen) == 0) break;
      why = std::strerror(errno);
      close();
    }
    ::freeaddrinfo(res);
    if (fd_ < 0) fail(why);
  }
};

/// Masked LM served by the bridge. Single-flight: calls are serialised on
/// one connection; batches are pipelined.
class BridgeModel : public MaskedLanguageModel {
 public:
  explicit BridgeModel(std::string address, std::size_t vocab_size = 0)
      : conn_(std::move(address)), vocab_size_(vocab_size) {}

  std::string name() const override { return "bridge:" + conn_.address(); }
  std::size_t vocab_size() const override { return vocab_size_; }
  bool concurrent_safe() const override { return false; }

  double word_log_likelihood(const std::string& passage, const std::string& question,
                             const std::string& answer, std::size_t word_index) const override {
    auto all = answer_log_likelihoods(passage, question, answer);
    if (word_index >= all.size()) throw ModelError("bridge: word index out of range", word_index);
    return all[word_index];
  }

  std::vector<double> answer_log_likelihoods(const std::string& passage, const std::string& question,
                                             const std::string& answer) const override {
    EvalItem item{next_id(), "", passage, question, answer, std::nullopt};
    return score_many(std::span<const EvalItem>(&item, 1)).front();
  }

  /// Writes every request before reading responses (FIFO).
  std::vector<std::vector<double>> score_many(std::span<const EvalItem> items) const {
    std::lock_guard lock(mu_);
    std::vector<std::string> ids;
    ids.reserve(items.size());
    for (const auto& it : items) {
      ids.push_back(it.id.empty() ? next_id_locked() : it.id);
      conn_.send_line(encode_score_request(ids.back(), it.passage, it.question, it.answer));
    }
    std::vector<std::vector<double>> out;
    out.reserve(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto resp = decode_response(conn_.read_line());
      if (resp.id != ids[i])
        throw TransportError("bridge: expected response '" + ids[i] + "', got '" + resp.id + "'");
      if (resp.error) throw ModelError("bridge error for '" + resp.id + "': " + *resp.error, 0);
      const auto expected = answer_words(items[i].answer);
      if (resp.words.size() != resp.word_logliks.size() || resp.words != expected)
        throw ModelError("bridge: word split mismatch for '" + resp.id + "'",
                         std::min(resp.words.size(), expected.size()));
      out.push_back(resp.word_logliks);
    }
    return out;
  }

  EmbeddingMatrix embed(const std::string& text) const {
    std::lock_guard lock(mu_);
    const std::string id = next_id_locked();
    conn_.send_line(encode_embed_request(id, text));
    const auto resp = decode_response(conn_.read_line());
    if (resp.id != id) throw TransportError("bridge: expected response '" + id + "', got '" + resp.id + "'");
    if (resp.error) throw ModelError("bridge error for '" + id + "': " + *resp.error, 0);
    return EmbeddingMatrix(resp.vectors);
  }

 private:
  mutable BridgeConnection conn_;
  mutable std::mutex mu_;
  mutable std::size_t counter_ = 0;
  std::size_t vocab_size_;

  std::string next_id_locked() const { return "req-" + std::to_string(counter_++); }
  std::string next_id() const {
    std::lock_guard lock(mu_);
    return next_id_locked();
  }
};

/// Explicit address, else $QGEVAL_BRIDGE_ADDR, else empty.
inline std::string resolve_bridge_address(const std::string& explicit_address) {
  if (!explicit_address.empty()) return explicit_address;
  if (const char* env = std::getenv(kBridgeAddrEnv); env != nullptr) return env;
  return {};
}

}  // namespace qgeval
