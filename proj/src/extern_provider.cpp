#include <mutex>
#include <sstream>

#include "httplib.h"
#include "lyricgenre/embedding.hpp"
#include "lyricgenre/error.hpp"

namespace lyricgenre {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint parse_endpoint(std::string_view url) {
  constexpr std::string_view scheme = "http://";
  if (url.rfind(scheme, 0) != 0) {
    throw UsageError("extern provider endpoint must be an http:// URL, got '" + std::string(url) + "'");
  }
  const auto slash = url.find('/', scheme.size());
  if (slash == std::string_view::npos) return {std::string(url), "/"};
  return {std::string(url.substr(0, slash)), std::string(url.substr(slash))};
}

std::vector<float> parse_row(const std::string& line, std::size_t line_no) {
  std::vector<float> row;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t pos = 0;
      row.push_back(std::stof(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw DataError("extern provider response line " + std::to_string(line_no) + ": bad float '" + tok + "'");
    }
  }
  return row;
}

class ExternProvider final : public EmbeddingProvider {
 public:
  explicit ExternProvider(std::string_view url) : url_(url), endpoint_(parse_endpoint(url)) {
    const std::vector<std::string> probe = {"dimension probe"};
    dimension_ = request(probe).front().size();
    if (dimension_ == 0) throw DataError("extern provider returned an empty vector");
  }

  std::size_t dimension() const override { return dimension_; }
  bool bounded() const override { return false; }
  std::string tag() const override { return "extern:" + url_; }
  std::vector<float> embed(std::string_view sentence) const override {
    const std::vector<std::string> one = {std::string(sentence)};
    return request(one).front();
  }
  std::vector<std::vector<float>> embed_batch(std::span<const std::string> sentences) const override {
    return request(sentences);
  }

 private:
  std::vector<std::vector<float>> request(std::span<const std::string> sentences) const {
    std::string body;
    for (const auto& s : sentences) {
      if (s.find('\n') != std::string::npos) throw DataError("sentence contains a line break");
      body += s;
      body.push_back('\n');
    }
    httplib::Result res;
    {
      // httplib::Client is not safe for concurrent requests
      std::lock_guard lock(mutex_);
      httplib::Client client(endpoint_.origin);
      client.set_read_timeout(120, 0);
      res = client.Post(endpoint_.path, body, "text/plain; charset=utf-8");
    }
    if (!res) {
      throw DataError("extern provider '" + url_ + "' unreachable: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw DataError("extern provider '" + url_ + "' answered HTTP " + std::to_string(res->status));
    }
    std::vector<std::vector<float>> rows;
    std::istringstream in(res->body);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      rows.push_back(parse_row(line, rows.size() + 1));
    }
    if (rows.size() != sentences.size()) {
      throw DataError("extern provider returned " + std::to_string(rows.size()) + " rows for " +
                      std::to_string(sentences.size()) + " sentences");
    }
    return rows;
  }

  std::string url_;
  Endpoint endpoint_;
  std::size_t dimension_ = 0;
  mutable std::mutex mutex_;
};

}  // namespace

ProviderPtr extern_provider(std::string_view endpoint) { return std::make_shared<ExternProvider>(endpoint); }

}  // namespace lyricgenre
