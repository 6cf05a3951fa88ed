#pragma once

// In-process HTTP stand-in for remote model backends.

#include <atomic>
#include <functional>
#include <string>
#include <thread>

#include <httplib.h>

namespace testsupport {

class FakeBackend {
 public:
  using Reply = std::function<std::pair<int, std::string>(const std::string& body)>;

  explicit FakeBackend(Reply reply) : reply_(std::move(reply)) {
    server_.Post(R"(/.*)", [this](const httplib::Request& req, httplib::Response& res) {
      ++calls_;
      auto [status, body] = reply_(req.body);
      res.status = status;
      res.set_content(body, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeBackend() {
    server_.stop();
    thread_.join();
  }

  std::string url(const std::string& path = "/v1") const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }
  int calls() const { return calls_; }

 private:
  Reply reply_;
  httplib::Server server_;
  int port_ = 0;
  std::atomic<int> calls_{0};
  std::thread thread_;
};

}  // namespace testsupport
