// Copyright 2026 The twinlink Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "twinlink/bus/gateway.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <deque>
#include <map>
#include <mutex>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

#include "twinlink/bus/bridge.hpp"
#include "twinlink/bus/codec.hpp"
#include "twinlink/bus/schema.hpp"

namespace twinlink::bus {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

using Bytes = std::vector<std::uint8_t>;
using SharedBytes = std::shared_ptr<const Bytes>;

constexpr std::string_view kUpgradePrefix = "GET ";
constexpr auto kSniffWindow = std::chrono::milliseconds(250);

class Connection;

// Connections registered for fan-out. Shared with the bus callback so a
// late publish after Stop() sees an empty, stopped registry.
struct Registry {
  std::mutex mutex;
  bool stopped = false;
  std::uint64_t next_id = 1;
  std::map<std::uint64_t, std::weak_ptr<Connection>> connections;
};

struct Context {
  std::shared_ptr<Registry> registry;
  const Bridge* bridge = nullptr;
  SharedBytes handshake;
  Gateway::InboundHandler on_inbound;
  const GatewayOptions* options = nullptr;
  GatewayCounters* counters = nullptr;
};

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, const Context& context, std::uint64_t id)
      : stream_(std::move(socket)),
        timer_(stream_.get_executor()),
        context_(context),
        id_(id) {}

  void Start() {
    asio::dispatch(stream_.get_executor(), [self = shared_from_this()] { self->Sniff(); });
  }

  // Any thread.
  void Send(Message message, SharedBytes b_frame) {
    asio::post(timer_.get_executor(),
               [self = shared_from_this(), message = std::move(message),
                b_frame = std::move(b_frame)] { self->Queue(*message, b_frame); });
  }

  void Shutdown() {
    asio::post(timer_.get_executor(), [self = shared_from_this()] { self->Close(); });
  }

 private:
  enum class Mode { kUnknown, kRaw, kWebSocket };

  void Sniff() {
    timer_.expires_after(kSniffWindow);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec || self->mode_ != Mode::kUnknown || self->closed_) return;
      self->mode_ = Mode::kRaw;
      self->QueueBytes(self->context_.handshake);
    });
    ReadSniff();
  }

  void ReadSniff() {
    stream_.async_read_some(
        sniff_.prepare(4096), [self = shared_from_this()](beast::error_code ec, std::size_t n) {
          if (ec) return self->Close();
          self->sniff_.commit(n);
          self->OnSniffed();
        });
  }

  void OnSniffed() {
    const auto data = sniff_.data();
    const std::string_view seen(static_cast<const char*>(data.data()),
                                std::min(data.size(), kUpgradePrefix.size()));
    const bool prefix = kUpgradePrefix.substr(0, seen.size()) == seen;
    if (mode_ == Mode::kUnknown && prefix && seen.size() < kUpgradePrefix.size()) {
      return ReadSniff();
    }
    if (mode_ == Mode::kUnknown && prefix) {
      timer_.cancel();
      mode_ = Mode::kWebSocket;
      return ReadUpgrade();
    }
    if (mode_ == Mode::kUnknown) {
      timer_.cancel();
      mode_ = Mode::kRaw;
      QueueBytes(context_.handshake);
    }
    const auto* bytes = static_cast<const std::uint8_t*>(data.data());
    reader_.Append({bytes, data.size()});
    sniff_.consume(data.size());
    if (DrainReader()) ReadRaw();
  }

  void ReadUpgrade() {
    http::async_read(stream_, sniff_, request_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) {
                       if (ec || !websocket::is_upgrade(self->request_)) {
                         self->Reject("bad websocket upgrade request");
                         return self->Close();
                       }
                       self->Upgrade();
                     });
  }

  void Upgrade() {
    ws_ = std::make_unique<websocket::stream<beast::tcp_stream>>(std::move(stream_));
    ws_->binary(true);
    ws_->read_message_max(kMaxFrameBytes + 4);
    ws_->async_accept(request_, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return self->Close();
      self->QueueBytes(self->context_.handshake);
      self->ReadWebSocket();
    });
  }

  void ReadWebSocket() {
    ws_->async_read(ws_buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->Close();
      const auto data = self->ws_buffer_.data();
      try {
        const auto envelope = DecodeFrame(
            {static_cast<const std::uint8_t*>(data.data()), data.size()});
        self->ws_buffer_.consume(data.size());
        if (envelope) self->Accept(*envelope);
      } catch (const Error& e) {
        self->Reject(e.what());
        return self->Close();
      }
      self->ReadWebSocket();
    });
  }

  void ReadRaw() {
    stream_.async_read_some(asio::buffer(chunk_),
                            [self = shared_from_this()](beast::error_code ec, std::size_t n) {
                              if (ec) return self->Close();
                              self->reader_.Append({self->chunk_.data(), n});
                              if (self->DrainReader()) self->ReadRaw();
                            });
  }

  // False once the connection has been closed for a bad frame.
  bool DrainReader() {
    try {
      while (auto envelope = reader_.Next()) Accept(*envelope);
    } catch (const Error& e) {
      Reject(e.what());
      Close();
      return false;
    }
    return !closed_;
  }

  void Accept(Envelope envelope) {
    context_.counters->frames_in++;
    const auto& allowed = context_.options->inbound_topics;
    if (std::find(allowed.begin(), allowed.end(), envelope.topic) == allowed.end()) {
      Reject("clients may not publish on '" + envelope.topic + "'");
      return;
    }
    dialect_ = envelope.dialect;
    if (envelope.dialect != Dialect::kB) {
      try {
        envelope = context_.bridge->Translate(envelope);
        ValidatePayload(envelope.topic, envelope.dialect, envelope.payload);
      } catch (const Error& e) {
        Reject(e.what());
        return;
      }
    }
    context_.on_inbound(std::move(envelope));
  }

  void Reject(const std::string& why) {
    context_.counters->frames_rejected++;
    spdlog::warn("connection {}: {}", id_, why);
  }

  void Queue(const Envelope& message, const SharedBytes& b_frame) {
    if (closed_ || mode_ == Mode::kUnknown || (mode_ == Mode::kWebSocket && !ws_)) return;
    if (dialect_ == Dialect::kB || message.dialect != Dialect::kB) return QueueBytes(b_frame);
    try {
      QueueBytes(std::make_shared<const Bytes>(EncodeFrame(context_.bridge->Translate(message))));
    } catch (const Error&) {
      QueueBytes(b_frame);  // topic without a dialect-A form
    }
  }

  void QueueBytes(SharedBytes frame) {
    if (closed_) return;
    if (outbox_.size() >= context_.options->max_pending_frames) {
      spdlog::warn("connection {}: client too slow, disconnecting", id_);
      return Close();
    }
    outbox_.push_back(std::move(frame));
    if (!writing_) WriteNext();
  }

  void WriteNext() {
    if (outbox_.empty() || closed_) {
      writing_ = false;
      return;
    }
    writing_ = true;
    auto done = [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->Close();
      self->outbox_.pop_front();
      self->WriteNext();
    };
    const auto buffer = asio::buffer(*outbox_.front());
    if (ws_) {
      ws_->async_write(buffer, std::move(done));
    } else {
      asio::async_write(stream_, buffer, std::move(done));
    }
  }

  void Close() {
    if (closed_) return;
    closed_ = true;
    timer_.cancel();
    beast::error_code ignored;
    if (ws_) {
      beast::get_lowest_layer(*ws_).socket().shutdown(tcp::socket::shutdown_both, ignored);
      beast::get_lowest_layer(*ws_).socket().close(ignored);
    } else {
      stream_.socket().shutdown(tcp::socket::shutdown_both, ignored);
      stream_.socket().close(ignored);
    }
    context_.counters->closed++;
    std::lock_guard<std::mutex> lock(context_.registry->mutex);
    context_.registry->connections.erase(id_);
  }

  beast::tcp_stream stream_;
  std::unique_ptr<websocket::stream<beast::tcp_stream>> ws_;
  asio::steady_timer timer_;
  const Context& context_;
  std::uint64_t id_;
  Mode mode_ = Mode::kUnknown;
  Dialect dialect_ = Dialect::kB;
  bool closed_ = false;
  bool writing_ = false;
  beast::flat_buffer sniff_;
  beast::flat_buffer ws_buffer_;
  http::request<http::string_body> request_;
  FrameReader reader_;
  std::array<std::uint8_t, 16384> chunk_{};
  std::deque<SharedBytes> outbox_;
};

}  // namespace

struct Gateway::Impl {
  Impl(Bus& bus_ref, Json handshake, InboundHandler on_inbound, GatewayOptions opts)
      : bus(bus_ref), options(std::move(opts)), acceptor(io) {
    Envelope hello;
    hello.topic = std::string(topics::kHandshake);
    hello.dialect = Dialect::kB;
    hello.payload = std::move(handshake);
    context.registry = registry;
    context.bridge = &bridge;
    context.handshake = std::make_shared<const Bytes>(EncodeFrame(hello));
    context.on_inbound = std::move(on_inbound);
    context.options = &options;
    context.counters = &counters;
  }

  void AcceptNext() {
    acceptor.async_accept(asio::make_strand(io), [this](beast::error_code ec, tcp::socket s) {
      if (ec) {
        if (ec != asio::error::operation_aborted) spdlog::warn("accept failed: {}", ec.message());
        if (!acceptor.is_open()) return;
      } else {
        std::shared_ptr<Connection> connection;
        {
          std::lock_guard<std::mutex> lock(registry->mutex);
          if (registry->stopped) return;
          const std::uint64_t id = registry->next_id++;
          connection = std::make_shared<Connection>(std::move(s), context, id);
          registry->connections.emplace(id, connection);
        }
        counters.accepted++;
        connection->Start();
      }
      AcceptNext();
    });
  }

  Bus& bus;
  GatewayOptions options;
  Bridge bridge = Bridge::Default();
  GatewayCounters counters;
  std::shared_ptr<Registry> registry = std::make_shared<Registry>();
  Context context;
  asio::io_context io;
  tcp::acceptor acceptor;
  std::vector<std::thread> threads;
  std::vector<Bus::Token> tokens;
  bool running = false;
};

Gateway::Gateway(Bus& bus, Json handshake, InboundHandler on_inbound, GatewayOptions options)
    : impl_(std::make_unique<Impl>(bus, std::move(handshake), std::move(on_inbound),
                                   std::move(options))) {}

Gateway::~Gateway() { Stop(); }

void Gateway::Start() {
  Impl& m = *impl_;
  if (m.running) return;
  try {
    const tcp::endpoint endpoint(asio::ip::make_address(m.options.address), m.options.port);
    m.acceptor.open(endpoint.protocol());
    m.acceptor.set_option(asio::socket_base::reuse_address(true));
    m.acceptor.bind(endpoint);
    m.acceptor.listen();
  } catch (const boost::system::system_error& e) {
    beast::error_code ignored;
    m.acceptor.close(ignored);
    throw BusError("cannot listen on " + m.options.address + ":" +
                   std::to_string(m.options.port) + ": " + e.code().message());
  }
  std::weak_ptr<Registry> weak = m.registry;
  for (const std::string& topic : m.options.outbound_topics) {
    m.tokens.push_back(m.bus.Subscribe(topic, [weak](const Message& message) {
      const auto registry = weak.lock();
      if (!registry) return;
      SharedBytes frame;
      std::lock_guard<std::mutex> lock(registry->mutex);
      if (registry->stopped || registry->connections.empty()) return;
      try {
        frame = std::make_shared<const Bytes>(EncodeFrame(*message));
      } catch (const Error& e) {
        spdlog::error("dropping unencodable {} message: {}", message->topic, e.what());
        return;
      }
      for (auto& [id, connection] : registry->connections) {
        if (auto c = connection.lock()) c->Send(message, frame);
      }
    }));
  }
  m.AcceptNext();
  m.running = true;
  for (int i = 0; i < std::max(1, m.options.threads); ++i) {
    m.threads.emplace_back([&m] { m.io.run(); });
  }
  spdlog::info("gateway listening on {}:{}", m.options.address, port());
}

void Gateway::Stop() {
  Impl& m = *impl_;
  if (!m.running) return;
  m.running = false;
  for (Bus::Token token : m.tokens) m.bus.Unsubscribe(token);
  m.tokens.clear();
  std::vector<std::shared_ptr<Connection>> open;
  {
    std::lock_guard<std::mutex> lock(m.registry->mutex);
    m.registry->stopped = true;
    for (auto& [id, connection] : m.registry->connections) {
      if (auto c = connection.lock()) open.push_back(std::move(c));
    }
  }
  asio::post(m.io, [&m] {
    beast::error_code ignored;
    m.acceptor.close(ignored);
  });
  for (const auto& c : open) c->Shutdown();
  open.clear();
  // Let the close handlers run, then stop.
  asio::post(m.io, [&m] { m.io.stop(); });
  for (std::thread& t : m.threads) t.join();
  m.threads.clear();
}

std::uint16_t Gateway::port() const {
  beast::error_code ec;
  const auto endpoint = impl_->acceptor.local_endpoint(ec);
  return ec ? 0 : endpoint.port();
}

const GatewayCounters& Gateway::counters() const { return impl_->counters; }

std::pair<std::string, std::uint16_t> ParseListenAddress(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    throw BusError("listen address must look like host:port, got '" + text + "'");
  }
  std::string host = text.substr(0, colon);
  if (host.size() > 2 && host.front() == '[' && host.back() == ']') {
    host = host.substr(1, host.size() - 2);
  }
  const std::string port_text = text.substr(colon + 1);
  int port = -1;
  try {
    std::size_t used = 0;
    port = std::stoi(port_text, &used);
    if (used != port_text.size()) port = -1;
  } catch (const std::exception&) {
    port = -1;
  }
  if (port < 0 || port > 65535) throw BusError("bad port in listen address '" + text + "'");
  return {host, static_cast<std::uint16_t>(port)};
}

}  // namespace twinlink::bus
