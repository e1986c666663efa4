#include "geosplit/service.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <httplib.h>

#include "geosplit/error.hpp"
#include "geosplit/leakage.hpp"
#include "geosplit/manifest.hpp"
#include "geosplit/spatial.hpp"

namespace geosplit {

namespace {

HttpReply error_reply(int status, const std::string& message, json extra = json::object()) {
  extra["error"] = message;
  return {status, std::move(extra)};
}

json regions_array(const RegionSet& regions) { return json::parse(regions_json_string(regions)).at("regions"); }

}  // namespace

SplitService::SplitService(std::shared_ptr<const Dataset> dataset, ServiceOptions options, RegionSet initial)
    : ds_(std::move(dataset)), options_(std::move(options)) {
  if (!options_.samples_path.empty()) samples_digest_ = digest_file(options_.samples_path, true);
  auto snap = std::make_shared<Snapshot>();
  snap->revision = 1;
  auto assigned = assign_by_regions(*ds_, initial, AssignMode::per_sample);
  snap->regions = std::move(initial);
  snap->split = std::move(assigned.split);
  snap->cuts = std::move(assigned.cuts);
  current_ = std::move(snap);
  worker_ = std::thread([this] { worker_loop(); });
}

SplitService::~SplitService() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  cv_.notify_all();
  if (worker_.joinable()) worker_.join();
}

std::shared_ptr<const SplitService::Snapshot> SplitService::snapshot() const {
  std::lock_guard lock(mutex_);
  return current_;
}

std::uint64_t SplitService::revision() const { return snapshot()->revision; }

void SplitService::worker_loop() {
  std::uint64_t attempted = 0;
  while (true) {
    std::shared_ptr<const Snapshot> snap;
    {
      std::unique_lock lock(mutex_);
      cv_.wait(lock, [&] { return stop_ || current_->revision != attempted; });
      if (stop_) return;
      snap = current_;
      attempted = snap->revision;
    }
    std::optional<json> stats;
    try {
      stats = compute_stats(*snap);
    } catch (const std::exception& e) {
      stats = json{{"error", e.what()}};
    }
    {
      std::lock_guard lock(mutex_);
      if (stats && current_->revision == snap->revision) {
        stats_revision_ = snap->revision;
        stats_ = std::move(stats);
      }
    }
    cv_.notify_all();
  }
}

std::optional<json> SplitService::compute_stats(const Snapshot& snap) const {
  auto superseded = [&] {
    std::lock_guard lock(mutex_);
    return current_->revision != snap.revision || stop_;
  };
  const auto keys = ds_->attribute_keys();
  const auto balance = balance_report(*ds_, snap.split, keys);
  if (superseded()) return std::nullopt;

  json leakage = nullptr;
  const auto counts = snap.split.counts(*ds_);
  if (counts[label_index(SetLabel::train)] > 0) {
    const double tau[] = {5.0};
    const auto report = audit(*ds_, snap.split, tau);
    auto ratio = [](const SetLeakage& s) { return s.ratios[0] ? json(*s.ratios[0]) : json(nullptr); };
    leakage = {{"threshold", 5.0}, {"val", ratio(report.all.val)}, {"test", ratio(report.all.test)}};
  }
  if (superseded()) return std::nullopt;

  const ValidationReport validation = validate_split(*ds_, snap.split, &snap.regions);
  if (superseded()) return std::nullopt;

  json proportions = json::object();
  json targets = json::object();
  const ValidationOptions defaults;
  for (SetLabel l : kSplitSets) {
    const auto& p = balance.proportions[label_index(l)];
    proportions[std::string(to_string(l))] = p ? json(*p) : json(nullptr);
    targets[std::string(to_string(l))] = defaults.targets[label_index(l)];
  }
  return json{{"proportions", std::move(proportions)},
              {"targets", std::move(targets)},
              {"leakage_5m", std::move(leakage)},
              {"balance", balance},
              {"cut_sequences", snap.cuts.cut_sequences},
              {"validation", validation}};
}

bool SplitService::wait_for_stats(std::uint64_t revision) const {
  std::unique_lock lock(mutex_);
  cv_.wait(lock, [&] { return stop_ || stats_revision_ >= revision || current_->revision > revision; });
  return stats_revision_ == revision;
}

HttpReply SplitService::get_project() const {
  const auto snap = snapshot();
  std::vector<std::string> maps(ds_->maps().begin(), ds_->maps().end());
  json body = {{"id", options_.project_id},
               {"revision", snap->revision},
               {"samples", ds_->size()},
               {"sequences", ds_->sequences().size()},
               {"maps", maps},
               {"attribute_keys", ds_->attribute_keys()},
               {"regions", snap->regions.regions.size()},
               {"samples_file", {{"name", samples_digest_.path}, {"sha256", samples_digest_.sha256}}}};
  return {200, std::move(body)};
}

HttpReply SplitService::get_samples(const std::string& map_id, std::size_t max_points) const {
  if (!ds_->maps().count(map_id)) return error_reply(404, "unknown map", {{"map_id", map_id}});
  if (max_points == 0) return error_reply(400, "max_points must be >= 1");
  const auto snap = snapshot();
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < ds_->size(); ++i) {
    if ((*ds_)[i].map_id == map_id) members.push_back(i);
  }
  std::vector<std::size_t> kept = members;
  double cell = 0.0;
  if (members.size() > max_points) {
    double min_x = INFINITY, min_y = INFINITY, max_x = -INFINITY, max_y = -INFINITY;
    for (std::size_t i : members) {
      min_x = std::min(min_x, (*ds_)[i].x);
      max_x = std::max(max_x, (*ds_)[i].x);
      min_y = std::min(min_y, (*ds_)[i].y);
      max_y = std::max(max_y, (*ds_)[i].y);
    }
    const double area = std::max((max_x - min_x) * (max_y - min_y), 1e-6);
    cell = std::max(std::sqrt(area / static_cast<double>(max_points)), 1e-6);
    // Keep the first sample (dataset order) of every occupied cell; coarsen until it fits.
    while (true) {
      kept.clear();
      std::unordered_set<CellIndex, CellIndexHash> seen;
      for (std::size_t i : members) {
        if (seen.insert(cell_of((*ds_)[i].x - min_x, (*ds_)[i].y - min_y, cell)).second) kept.push_back(i);
      }
      if (kept.size() <= max_points) break;
      cell *= 1.5;
    }
  }
  json points = json::array();
  for (std::size_t i : kept) {
    const Sample& s = (*ds_)[i];
    points.push_back({{"id", s.id},
                      {"x", s.x},
                      {"y", s.y},
                      {"set", std::string(to_string(snap->split.get(s.id).value_or(SetLabel::unassigned)))}});
  }
  return {200,
          {{"map_id", map_id},
           {"revision", snap->revision},
           {"total", members.size()},
           {"returned", kept.size()},
           {"cell_size", cell},
           {"points", std::move(points)}}};
}

HttpReply SplitService::get_regions() const {
  const auto snap = snapshot();
  return {200, {{"revision", snap->revision}, {"regions", regions_array(snap->regions)}}};
}

HttpReply SplitService::put_regions(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    return error_reply(400, std::string("invalid json: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("base_revision") || !doc["base_revision"].is_number_unsigned()) {
    return error_reply(400, "body needs base_revision and regions");
  }
  RegionSet regions;
  try {
    regions = parse_regions(json{{"regions", doc.value("regions", json::array())}}.dump());
    for (const auto& r : regions.regions) {
      if (!ds_->maps().count(r.map_id)) return error_reply(404, "unknown map", {{"map_id", r.map_id}});
    }
    validate_regions(regions);
  } catch (const Error& e) {
    return error_reply(400, e.what());
  }
  const auto base = doc["base_revision"].get<std::uint64_t>();

  std::unique_lock lock(mutex_);
  if (base != current_->revision) {
    return error_reply(409, "stale revision", {{"current_revision", current_->revision}});
  }
  // Mutations are serialised by holding the lock through assignment.
  auto assigned = assign_by_regions(*ds_, regions, AssignMode::per_sample);
  auto snap = std::make_shared<Snapshot>();
  snap->revision = current_->revision + 1;
  snap->regions = std::move(regions);
  snap->split = std::move(assigned.split);
  snap->cuts = std::move(assigned.cuts);
  current_ = snap;
  lock.unlock();
  cv_.notify_all();
  return {200, {{"revision", snap->revision}}};
}

HttpReply SplitService::get_stats(std::optional<std::uint64_t> revision) const {
  std::lock_guard lock(mutex_);
  const std::uint64_t current = current_->revision;
  const std::uint64_t wanted = revision.value_or(current);
  if (wanted > current || wanted == 0) return error_reply(404, "unknown revision", {{"current_revision", current}});
  if (wanted < current) return error_reply(409, "stale revision", {{"current_revision", current}});
  if (stats_revision_ != wanted || !stats_) return {202, {{"revision", wanted}, {"state", "pending"}}};
  return {200, {{"revision", wanted}, {"state", "done"}, {"stats", *stats_}}};
}

HttpReply SplitService::post_export(const std::string& body) {
  std::filesystem::path dir = options_.project_dir / "export";
  if (!body.empty()) {
    try {
      const json doc = json::parse(body);
      if (doc.contains("dir")) dir = doc.at("dir").get<std::string>();
    } catch (const json::exception& e) {
      return error_reply(400, std::string("invalid json: ") + e.what());
    }
  }
  const auto snap = snapshot();
  try {
    const std::string regions_text = regions_json_string(snap->regions);
    const InputDigest inputs[] = {samples_digest_, digest_bytes("regions.json", regions_text)};
    const std::string created = options_.timestamp.empty() ? utc_timestamp() : options_.timestamp;
    const auto artifacts = make_split_artifacts(*ds_, snap->split, snap->cuts, inputs, created);
    write_split_artifacts(dir, artifacts);
    write_text_file(dir / "regions.json", regions_text);
  } catch (const Error& e) {
    return error_reply(500, e.what());
  }
  return {200,
          {{"revision", snap->revision},
           {"dir", dir.string()},
           {"files", {"regions.json", "split.csv", "manifest.json", "cuts.json"}}}};
}

void SplitService::mount(httplib::Server& server) {
  auto send = [](httplib::Response& res, const HttpReply& reply) {
    res.status = reply.status;
    res.set_content(reply.body.dump(), "application/json");
  };
  server.Get("/api/project", [this, send](const httplib::Request&, httplib::Response& res) { send(res, get_project()); });
  server.Get("/api/samples", [this, send](const httplib::Request& req, httplib::Response& res) {
    std::size_t max_points = 5000;
    if (req.has_param("max_points")) {
      try {
        max_points = std::stoul(req.get_param_value("max_points"));
      } catch (const std::exception&) {
        return send(res, error_reply(400, "max_points must be an integer"));
      }
    }
    if (!req.has_param("map_id")) return send(res, error_reply(400, "map_id is required"));
    send(res, get_samples(req.get_param_value("map_id"), max_points));
  });
  server.Get("/api/regions", [this, send](const httplib::Request&, httplib::Response& res) { send(res, get_regions()); });
  server.Put("/api/regions", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, put_regions(req.body));
  });
  server.Get("/api/stats", [this, send](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::uint64_t> revision;
    if (req.has_param("revision")) {
      try {
        revision = std::stoull(req.get_param_value("revision"));
      } catch (const std::exception&) {
        return send(res, error_reply(400, "revision must be an integer"));
      }
    }
    send(res, get_stats(revision));
  });
  server.Post("/api/export", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, post_export(req.body));
  });
  if (!options_.ui_dir.empty()) server.set_mount_point("/", options_.ui_dir.string());
}

int serve(SplitService& service, int port) {
  httplib::Server server;
  service.mount(server);
  if (!server.listen("127.0.0.1", port)) {
    throw Error(ErrorKind::io, "cannot listen on 127.0.0.1:" + std::to_string(port));
  }
  return 0;
}

}  // namespace geosplit
