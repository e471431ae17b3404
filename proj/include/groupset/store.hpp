#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "json.hpp"

#include "groupset/errors.hpp"
#include "groupset/session.hpp"

namespace groupset {

// Live sessions keyed by id. Each session has its own mutex, so actions on one session are
// serialized while different sessions proceed independently. With a state directory, every
// session is one JSON document (its log) rewritten atomically after each new event.
class SessionStore {
 public:
  using IdSource = std::function<std::string()>;

  explicit SessionStore(std::optional<std::filesystem::path> dir = std::nullopt, Clock clock = system_clock_ms,
                        IdSource ids = random_session_id)
      : dir_(std::move(dir)), clock_(std::move(clock)), ids_(std::move(ids)) {
    if (dir_) load();
  }

  // GROUPSET_STATE_DIR wins over the configured directory.
  static std::optional<std::filesystem::path> state_dir(std::optional<std::filesystem::path> configured) {
    if (const char* env = std::getenv("GROUPSET_STATE_DIR"); env && *env) return std::filesystem::path(env);
    return configured;
  }

  // Problems met while loading: one line per quarantined file.
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  std::size_t size() const {
    std::shared_lock lock(map_mu_);
    return sessions_.size();
  }

  std::vector<std::string> ids() const {
    std::shared_lock lock(map_mu_);
    std::vector<std::string> out;
    for (const auto& [id, e] : sessions_) out.push_back(id);
    return out;
  }

  // Runs f on a fresh session before anyone else can see it, then publishes it.
  template <class F>
  auto create(std::string_view variant, std::uint64_t seed, std::vector<std::string> players, SessionOptions options,
              F&& f) {
    std::string id = ids_();
    auto entry = std::make_shared<Entry>(
        GameSession::create(variant, seed, std::move(players), options, id, clock_));
    std::unique_lock lock(map_mu_);
    if (sessions_.count(id)) throw Conflict("session id collision");
    persist(entry->session);
    sessions_.emplace(id, entry);
    std::lock_guard session_lock(entry->mu);
    lock.unlock();
    return f(static_cast<const GameSession&>(entry->session));
  }

  // Read access under the session lock: f sees a consistent snapshot.
  template <class F>
  auto read(const std::string& id, F&& f) const {
    auto entry = find(id);
    std::lock_guard lock(entry->mu);
    return f(static_cast<const GameSession&>(entry->session));
  }

  // Mutating access. The document is rewritten whenever f appended events, also when f
  // throws afterwards: the log is the truth.
  template <class F>
  auto write(const std::string& id, F&& f) {
    auto entry = find(id);
    std::lock_guard lock(entry->mu);
    const std::size_t before = entry->session.event_log().size();
    try {
      auto result = f(entry->session);
      if (entry->session.event_log().size() != before) persist(entry->session);
      return result;
    } catch (...) {
      if (entry->session.event_log().size() != before) persist(entry->session);
      throw;
    }
  }

 private:
  struct Entry {
    explicit Entry(GameSession s) : session(std::move(s)) {}
    mutable std::mutex mu;
    GameSession session;
  };

  std::shared_ptr<Entry> find(const std::string& id) const {
    std::shared_lock lock(map_mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw NotFound("no session '" + id + "'");
    return it->second;
  }

  // Write-then-rename keeps the previous document intact if we die mid-write.
  void persist(const GameSession& s) {
    if (!dir_) return;
    const auto final_path = *dir_ / (s.session_id() + ".json");
    auto tmp = final_path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << s.to_document().dump();
      out.flush();
      if (!out) throw Error("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, final_path);
  }

  void load() {
    namespace fs = std::filesystem;
    fs::create_directories(*dir_);
    for (const auto& entry : fs::directory_iterator(*dir_)) {
      const auto& path = entry.path();
      if (!entry.is_regular_file()) continue;
      if (path.extension() == ".tmp") {
        fs::remove(path);
        continue;
      }
      if (path.extension() != ".json") continue;
      try {
        std::ifstream in(path, std::ios::binary);
        auto doc = nlohmann::json::parse(in);
        auto session = GameSession::replay(doc, clock_);
        if (session.session_id() + ".json" != path.filename().string())
          throw Error("file name does not match session id " + session.session_id());
        const std::string id = session.session_id();
        sessions_.emplace(id, std::make_shared<Entry>(std::move(session)));
      } catch (const std::exception& e) {
        quarantine(path, e.what());
      }
    }
  }

  void quarantine(const std::filesystem::path& path, const std::string& why) {
    namespace fs = std::filesystem;
    const auto qdir = *dir_ / "quarantine";
    fs::create_directories(qdir);
    auto target = qdir / path.filename();
    for (int i = 1; fs::exists(target); ++i) target = qdir / (path.filename().string() + "." + std::to_string(i));
    fs::rename(path, target);
    warnings_.push_back("quarantined " + path.filename().string() + ": " + why);
  }

  std::optional<std::filesystem::path> dir_;
  Clock clock_;
  IdSource ids_;
  mutable std::shared_mutex map_mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::vector<std::string> warnings_;
};

}  // namespace groupset
