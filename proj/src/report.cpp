#include "geosplit/report.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include "geosplit/error.hpp"
#include "geosplit/text.hpp"

namespace geosplit {

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::io, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read " + path.string(), path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string opt_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

InputDigest digest_file(const std::filesystem::path& path, bool name_only) {
  const std::string bytes = read_file(path);
  return digest_bytes(name_only ? path.filename().string() : path.string(), bytes);
}

InputDigest digest_bytes(std::string name, std::string_view bytes) {
  return {std::move(name), sha256_hex(bytes), bytes.size()};
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

std::size_t ReportParts::section_count() const {
  return static_cast<std::size_t>(leakage.has_value()) + curve.has_value() + balance.has_value() +
         histogram.has_value() + eval.has_value();
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::invalid_argument, "report invariant violated: " + what);
}

void check_ratio_series(const std::vector<std::optional<double>>& ratios, const std::string& what) {
  std::optional<double> prev;
  for (const auto& r : ratios) {
    if (!r) continue;
    require(*r >= 0.0 && *r <= 1.0, what + " ratio outside [0,1]");
    require(!prev || *r >= *prev, what + " ratios decrease with threshold");
    prev = r;
  }
}

}  // namespace

void check_report_invariants(const ReportParts& parts) {
  if (parts.leakage) {
    const auto& l = *parts.leakage;
    for (const auto* s : {&l.all.val, &l.all.test}) {
      require(s->ratios.size() == l.thresholds.size(), "leakage ratio count");
      check_ratio_series(s->ratios, "leakage");
    }
    if (l.keyframes) {
      check_ratio_series(l.keyframes->val.ratios, "keyframe leakage");
      check_ratio_series(l.keyframes->test.ratios, "keyframe leakage");
    }
  }
  if (parts.curve) {
    std::vector<std::optional<double>> val, test;
    for (const auto& p : *parts.curve) {
      val.push_back(p.val_ratio);
      test.push_back(p.test_ratio);
    }
    check_ratio_series(val, "curve");
    check_ratio_series(test, "curve");
  }
  if (parts.balance) {
    for (const auto& k : parts.balance->keys) {
      for (SetLabel s : kAllLabels) {
        if (k.with_key[label_index(s)] == 0) continue;
        double sum = 0.0;
        for (const auto& v : k.values) sum += v.set_ratio[label_index(s)].value_or(0.0);
        require(std::abs(sum - 1.0) <= 1e-9, "balance ratios of " + k.key + " do not sum to 1");
      }
    }
  }
  if (parts.histogram) {
    const auto& h = *parts.histogram;
    std::size_t from_marginal = 0;
    for (const auto& [count, cells] : h.marginal) from_marginal += count * cells;
    require(from_marginal == h.total(), "histogram marginal does not conserve samples");
  }
  if (parts.eval) {
    const auto& e = *parts.eval;
    for (const auto& c : e.classes) {
      require(c.ap.size() == e.thresholds.size(), "AP count");
      double sum = 0.0;
      for (const auto& ap : c.ap) {
        if (ap) {
          require(*ap >= 0.0 && *ap <= 1.0, "AP outside [0,1]");
          sum += *ap;
        }
      }
      if (c.map) require(*c.map == sum / static_cast<double>(e.thresholds.size()), "class mAP is not the mean of its APs");
    }
  }
}

ReportBundle bundle(ReportParts parts, std::span<const std::filesystem::path> inputs, std::string created) {
  check_report_invariants(parts);
  ReportBundle b;
  b.created = std::move(created);
  for (const auto& p : inputs) b.inputs.push_back(digest_file(p));
  b.parts = std::move(parts);
  return b;
}

json bundle_json(const ReportBundle& b) {
  json inputs = json::array();
  for (const auto& d : b.inputs) inputs.push_back({{"path", d.path}, {"sha256", d.sha256}, {"bytes", d.bytes}});
  json sections = json::object();
  if (b.parts.leakage) sections["leakage"] = *b.parts.leakage;
  if (b.parts.curve) sections["distance_curve"] = *b.parts.curve;
  if (b.parts.balance) sections["balance"] = *b.parts.balance;
  if (b.parts.histogram) sections["histogram"] = *b.parts.histogram;
  if (b.parts.eval) sections["eval"] = *b.parts.eval;
  return {{"tool", std::string(kToolName)},
          {"tool_version", b.tool_version},
          {"created", b.created},
          {"inputs", std::move(inputs)},
          {"sections", std::move(sections)}};
}

ReportBundle bundle_from_json(const json& j) {
  ReportBundle b;
  try {
    b.tool_version = j.at("tool_version").get<std::string>();
    b.created = j.at("created").get<std::string>();
    for (const auto& d : j.at("inputs")) {
      b.inputs.push_back({d.at("path").get<std::string>(), d.at("sha256").get<std::string>(),
                          d.at("bytes").get<std::uintmax_t>()});
    }
    const auto& s = j.at("sections");
    if (s.contains("leakage")) b.parts.leakage = s["leakage"].get<LeakageReport>();
    if (s.contains("distance_curve")) b.parts.curve = s["distance_curve"].get<std::vector<CurvePoint>>();
    if (s.contains("balance")) b.parts.balance = s["balance"].get<BalanceReport>();
    if (s.contains("histogram")) b.parts.histogram = s["histogram"].get<CellHistogram>();
    if (s.contains("eval")) b.parts.eval = s["eval"].get<EvalReport>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, e.what(), "bundle");
  }
  return b;
}

std::string bundle_string(const ReportBundle& b) { return canonical_dump(bundle_json(b)); }

VerifyResult verify_bundle(const ReportBundle& b, const std::filesystem::path& base) {
  VerifyResult r;
  for (const auto& d : b.inputs) {
    std::filesystem::path p(d.path);
    if (p.is_relative() && !base.empty()) p = base / p;
    try {
      const auto now = digest_file(p);
      if (now.sha256 != d.sha256 || now.bytes != d.bytes) {
        r.ok = false;
        r.problems.push_back("digest mismatch: " + d.path);
      }
    } catch (const Error&) {
      r.ok = false;
      r.problems.push_back("unreadable: " + d.path);
    }
  }
  try {
    check_report_invariants(b.parts);
  } catch (const Error& e) {
    r.ok = false;
    r.problems.push_back(e.what());
  }
  return r;
}

std::string curve_csv(std::span<const CurvePoint> curve) {
  std::string out = "set,threshold,ratio\n";
  for (const auto& p : curve) out += "val," + format_double(p.threshold) + "," + opt_field(p.val_ratio) + "\n";
  for (const auto& p : curve) out += "test," + format_double(p.threshold) + "," + opt_field(p.test_ratio) + "\n";
  return out;
}

std::string leakage_csv(const LeakageReport& report) {
  std::string out = "set,threshold,ratio\n";
  for (const auto* s : {&report.all.val, &report.all.test}) {
    for (std::size_t k = 0; k < report.thresholds.size(); ++k) {
      out += std::string(to_string(s->set)) + "," + format_double(report.thresholds[k]) + "," +
             opt_field(s->ratios[k]) + "\n";
    }
  }
  return out;
}

std::string marginal_csv(const CellHistogram& h) {
  std::string out = "count,cells\n";
  for (const auto& [count, cells] : h.marginal) out += std::to_string(count) + "," + std::to_string(cells) + "\n";
  return out;
}

std::string histogram_cells_csv(const CellHistogram& h) {
  std::string out = "map_id,i,j,count\n";
  for (const auto& [map_id, cells] : h.counts) {
    for (const auto& [cell, count] : cells) {
      out += csv_field(map_id) + "," + std::to_string(cell.i) + "," + std::to_string(cell.j) + "," +
             std::to_string(count) + "\n";
    }
  }
  return out;
}

std::string eval_csv(const EvalReport& report) {
  std::string out = "class,threshold,ap\n";
  for (const auto& c : report.classes) {
    for (std::size_t k = 0; k < report.thresholds.size(); ++k) {
      out += std::string(to_string(c.cls)) + "," + format_double(report.thresholds[k]) + "," + opt_field(c.ap[k]) + "\n";
    }
  }
  return out;
}

std::string balance_csv(const BalanceReport& report) {
  std::string out = "key,value,set,ratio,full_ratio\n";
  for (const auto& k : report.keys) {
    for (const auto& v : k.values) {
      for (SetLabel s : kAllLabels) {
        out += csv_field(k.key) + "," + csv_field(v.value) + "," + std::string(to_string(s)) + "," +
               opt_field(v.set_ratio[label_index(s)]) + "," + format_double(v.full_ratio) + "\n";
      }
    }
  }
  return out;
}

}  // namespace geosplit
