#include <cstdlib>

#include "httplib.h"
#include "sceneforge/error.hpp"
#include "sceneforge/interp.hpp"
#include "sceneforge/verify.hpp"
#include "sceneforge/wakesleep.hpp"

namespace sceneforge {

Json to_json(const ProposalRequest& request) {
  Json j{{"mode", request.mode}, {"library", request.library}, {"payload", request.payload}};
  if (request.feedback) j["feedback"] = *request.feedback;
  return j;
}

HttpProposalClient::HttpProposalClient(std::string url, std::string token, double timeout_seconds)
    : url_(std::move(url)), token_(std::move(token)), timeout_(timeout_seconds) {
  if (url_.rfind("http://", 0) != 0) throw RemoteUnavailable("proposer url must start with http://: " + url_);
}

std::unique_ptr<HttpProposalClient> HttpProposalClient::from_environment(double timeout_seconds) {
  const char* url = std::getenv("SCENEFORGE_PROPOSER_URL");
  if (!url || !*url) return nullptr;
  const char* token = std::getenv("SCENEFORGE_PROPOSER_TOKEN");
  return std::make_unique<HttpProposalClient>(url, token ? token : "", timeout_seconds);
}

ProposalResponse HttpProposalClient::send(const ProposalRequest& request) {
  const std::size_t host_start = std::string("http://").size();
  const std::size_t slash = url_.find('/', host_start);
  const std::string origin = url_.substr(0, slash);
  const std::string path = slash == std::string::npos ? "/" : url_.substr(slash);

  httplib::Client client(origin);
  const auto whole = static_cast<time_t>(timeout_);
  const auto micro = static_cast<time_t>((timeout_ - static_cast<double>(whole)) * 1e6);
  client.set_connection_timeout(whole, micro);
  client.set_read_timeout(whole, micro);
  client.set_write_timeout(whole, micro);
  if (!token_.empty()) client.set_bearer_token_auth(token_);

  const auto res = client.Post(path, to_json(request).dump(), "application/json");
  if (!res) throw RemoteUnavailable("proposer request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) throw RemoteUnavailable("proposer returned HTTP " + std::to_string(res->status));
  ProposalResponse out;
  try {
    const Json j = Json::parse(res->body);
    out.text = j.at("text").get<std::string>();
    out.finish_reason = j.value("finish_reason", std::string{});
  } catch (const Json::exception& e) {
    // Malformed bodies are returned as text the caller cannot parse.
    out.text = res->body;
    out.finish_reason = "malformed";
  }
  return out;
}

RecognitionResult recognize_remote(const Layout& layout, const Library& library, ProposalClient& client,
                                   int max_attempts, double accept_threshold) {
  if (max_attempts < 1) throw Error("max_attempts must be >= 1");
  ProposalRequest request;
  request.mode = "recognize";
  request.library = serialize_library(library);
  request.payload = to_json(layout);

  std::optional<RecognitionResult> best;
  int failures = 0;
  int transport_failures = 0;
  std::string last_transport;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    ProposalResponse response;
    try {
      response = client.send(request);
    } catch (const RemoteUnavailable& e) {
      ++transport_failures;
      last_transport = e.what();
      continue;
    }
    try {
      const dsl::Program program = dsl::parse(response.text);
      RecognitionResult r = score_recognition(layout, program, library, accept_threshold, RecognitionSource::kRemote);
      if (!best || r.miou > best->miou) best = r;
      if (r.accepted) break;
      ++failures;
      request.feedback = "reconstruction mIoU " + std::to_string(r.miou) + " is below " +
                         std::to_string(accept_threshold);
    } catch (const Error& e) {
      ++failures;
      request.feedback = std::string("program rejected: ") + e.what();
    }
  }
  if (transport_failures == max_attempts) {
    throw RemoteUnavailable("proposer unreachable after " + std::to_string(max_attempts) + " attempts: " +
                            last_transport);
  }
  if (!best) {
    best = RecognitionResult{};
    best->source = RecognitionSource::kRemote;
  }
  best->failures = failures + transport_failures;
  return *best;
}

std::vector<dsl::FuncDef> propose_remote(std::span<const dsl::Program> corpus, const Library& library,
                                         ProposalClient& client, int max_attempts) {
  if (max_attempts < 1) throw Error("max_attempts must be >= 1");
  ProposalRequest request;
  request.mode = "abstract";
  request.library = serialize_library(library);
  request.payload = Json::array();
  for (const dsl::Program& p : corpus) request.payload.push_back(dsl::format(p));

  int transport_failures = 0;
  std::string last_transport;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    ProposalResponse response;
    try {
      response = client.send(request);
    } catch (const RemoteUnavailable& e) {
      ++transport_failures;
      last_transport = e.what();
      continue;
    }
    try {
      const dsl::Program p = dsl::parse(response.text);
      if (!p.defs.empty()) return p.defs;
      request.feedback = "response contained no function definitions";
    } catch (const Error& e) {
      request.feedback = std::string("definitions rejected: ") + e.what();
    }
  }
  if (transport_failures == max_attempts) {
    throw RemoteUnavailable("proposer unreachable after " + std::to_string(max_attempts) + " attempts: " +
                            last_transport);
  }
  return {};
}

}  // namespace sceneforge
