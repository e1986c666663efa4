#pragma once

#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "geosplit/json_io.hpp"
#include "geosplit/regions.hpp"
#include "geosplit/report.hpp"
#include "geosplit/split.hpp"

namespace httplib {
class Server;
}

namespace geosplit {

struct ServiceOptions {
  std::filesystem::path samples_path;
  /// Default export directory is project_dir / "export".
  std::filesystem::path project_dir = ".";
  /// Pinned manifest timestamp; empty means wall-clock time at export.
  std::string timestamp;
  std::string project_id = "default";
  /// Static UI assets served at "/" when set.
  std::filesystem::path ui_dir;
};

struct HttpReply {
  int status = 200;
  json body;
};

/// State and request handling behind the split-designer HTTP API. Mutations
/// are serialised and guarded by a revision check; statistics for the newest
/// revision are recomputed on a background worker and abandoned when a newer
/// revision arrives.
class SplitService {
 public:
  SplitService(std::shared_ptr<const Dataset> dataset, ServiceOptions options, RegionSet initial = {});
  ~SplitService();

  SplitService(const SplitService&) = delete;
  SplitService& operator=(const SplitService&) = delete;

  HttpReply get_project() const;
  HttpReply get_samples(const std::string& map_id, std::size_t max_points) const;
  HttpReply get_regions() const;
  HttpReply put_regions(const std::string& body);
  /// revision == nullopt means the current revision.
  HttpReply get_stats(std::optional<std::uint64_t> revision) const;
  HttpReply post_export(const std::string& body);

  std::uint64_t revision() const;
  /// Blocks until statistics for `revision` are done or superseded.
  bool wait_for_stats(std::uint64_t revision) const;

  /// Registers all /api routes (and the static UI mount) on `server`.
  void mount(httplib::Server& server);

 private:
  struct Snapshot {
    std::uint64_t revision = 0;
    RegionSet regions;
    SplitAssignment split;
    CutReport cuts;
  };

  std::shared_ptr<const Snapshot> snapshot() const;
  void worker_loop();
  std::optional<json> compute_stats(const Snapshot& snap) const;

  std::shared_ptr<const Dataset> ds_;
  ServiceOptions options_;
  InputDigest samples_digest_;

  mutable std::mutex mutex_;
  mutable std::condition_variable cv_;
  std::shared_ptr<const Snapshot> current_;
  std::uint64_t stats_revision_ = 0;
  std::optional<json> stats_;
  bool stop_ = false;
  std::thread worker_;
};

inline constexpr int kDefaultPort = 8642;

/// Blocking server on 127.0.0.1:port.
int serve(SplitService& service, int port);

}  // namespace geosplit
