#include "geosplit/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "geosplit/error.hpp"
#include "geosplit/spatial.hpp"
#include "geosplit/text.hpp"

namespace geosplit {

namespace {

constexpr int kSets = 3;
constexpr int kFree = -1;
constexpr double kLockSlack = 0.10;

struct Cell {
  std::size_t map = 0;
  CellIndex index;
  std::vector<std::size_t> samples;
  std::vector<std::size_t> has_key;                         // per key
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> values;  // per key: (value, count)
  int lock = kFree;
  int owner = kFree;
};

class Grower {
 public:
  Grower(const Dataset& ds, const PartitionOptions& opt) : ds_(ds), opt_(opt) {}

  PartitionResult run() {
    check_options();
    build_cells();
    encode_attributes();
    apply_locks();
    seed();
    grow();
    return emit();
  }

 private:
  void check_options() const {
    double sum = 0.0;
    for (double t : opt_.targets) {
      if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorKind::invalid_argument, "targets must be positive");
      sum += t;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw Error(ErrorKind::invalid_argument, "targets must sum to 1");
    if (!(opt_.cell_size > 0.0) || !std::isfinite(opt_.cell_size)) {
      throw Error(ErrorKind::invalid_argument, "cell_size must be positive");
    }
    if (!(opt_.balance_weight >= 0.0)) throw Error(ErrorKind::invalid_argument, "balance weight must be >= 0");
  }

  void build_cells() {
    maps_.assign(ds_.maps().begin(), ds_.maps().end());
    std::map<std::pair<std::size_t, CellIndex>, std::vector<std::size_t>> grouped;
    for (std::size_t i = 0; i < ds_.size(); ++i) {
      const Sample& s = ds_[i];
      const auto m = static_cast<std::size_t>(std::lower_bound(maps_.begin(), maps_.end(), s.map_id) - maps_.begin());
      grouped[{m, cell_of(s.x, s.y, opt_.cell_size)}].push_back(i);
    }
    cells_.reserve(grouped.size());
    for (auto& [key, members] : grouped) {
      Cell c;
      c.map = key.first;
      c.index = key.second;
      c.samples = std::move(members);
      lookup_.emplace(key, cells_.size());
      cells_.push_back(std::move(c));
    }
  }

  void encode_attributes() {
    for (const auto& key : opt_.attribute_keys) {
      std::map<std::string, std::size_t> counts;
      std::size_t covered = 0;
      for (const auto& s : ds_.samples()) {
        if (auto it = s.attrs.find(key); it != s.attrs.end()) {
          ++counts[it->second];
          ++covered;
        }
      }
      if (covered == 0) continue;
      Key k;
      for (const auto& [value, n] : counts) {
        k.value_ids.emplace(value, k.full.size());
        k.full.push_back(static_cast<double>(n) / static_cast<double>(covered));
      }
      k.name = key;
      keys_.push_back(std::move(k));
    }
    for (auto& c : cells_) {
      c.has_key.assign(keys_.size(), 0);
      c.values.resize(keys_.size());
      for (std::size_t k = 0; k < keys_.size(); ++k) {
        std::map<std::size_t, std::size_t> counts;
        for (std::size_t idx : c.samples) {
          const auto& attrs = ds_[idx].attrs;
          if (auto it = attrs.find(keys_[k].name); it != attrs.end()) {
            ++c.has_key[k];
            ++counts[keys_[k].value_ids.at(it->second)];
          }
        }
        c.values[k].assign(counts.begin(), counts.end());
      }
    }
    for (int s = 0; s < kSets; ++s) {
      has_[s].assign(keys_.size(), 0);
      cnt_[s].resize(keys_.size());
      for (std::size_t k = 0; k < keys_.size(); ++k) cnt_[s][k].assign(keys_[k].full.size(), 0);
    }
  }

  void apply_locks() {
    if (!opt_.locked) return;
    std::array<std::size_t, kSets> forced{};
    for (auto& c : cells_) {
      for (std::size_t idx : c.samples) {
        const auto label = opt_.locked->get(ds_[idx].id);
        if (!label || *label == SetLabel::unassigned) continue;
        const int s = static_cast<int>(label_index(*label));
        if (c.lock != kFree && c.lock != s) {
          throw Error(ErrorKind::infeasible_lock,
                      "cell (" + std::to_string(c.index.i) + "," + std::to_string(c.index.j) +
                          ") holds locked samples of two sets",
                      maps_[c.map]);
        }
        c.lock = s;
      }
      if (c.lock != kFree) forced[static_cast<std::size_t>(c.lock)] += c.samples.size();
    }
    const auto n = static_cast<double>(ds_.size());
    for (int s = 0; s < kSets; ++s) {
      const double share = static_cast<double>(forced[static_cast<std::size_t>(s)]) / n;
      if (share > opt_.targets[static_cast<std::size_t>(s)] + kLockSlack) {
        throw Error(ErrorKind::infeasible_lock,
                    "locked samples force a share of " + format_double(share) + " above target " +
                        format_double(opt_.targets[static_cast<std::size_t>(s)]) + " + 0.10",
                    std::string(to_string(static_cast<SetLabel>(s))));
      }
    }
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      if (cells_[c].lock != kFree) claim(c, cells_[c].lock);
    }
  }

  void seed() {
    std::mt19937_64 rng(opt_.seed);
    for (std::size_t m = 0; m < maps_.size(); ++m) {
      std::vector<std::size_t> on_map;
      for (std::size_t c = 0; c < cells_.size(); ++c) {
        if (cells_[c].map == m) on_map.push_back(c);
      }
      for (int s = 0; s < kSets; ++s) {
        const bool present = std::any_of(on_map.begin(), on_map.end(), [&](std::size_t c) { return cells_[c].owner == s; });
        if (present) continue;
        std::vector<std::size_t> free, owned;
        for (std::size_t c : on_map) (cells_[c].owner == kFree ? free : owned).push_back(c);
        if (free.empty()) break;
        std::size_t pick = free.front();
        if (owned.empty()) {
          pick = free[static_cast<std::size_t>(rng() % free.size())];
        } else {
          long long best = -1;
          for (std::size_t c : free) {
            long long nearest = std::numeric_limits<long long>::max();
            for (std::size_t o : owned) {
              const long long di = cells_[c].index.i - cells_[o].index.i;
              const long long dj = cells_[c].index.j - cells_[o].index.j;
              nearest = std::min(nearest, di * di + dj * dj);
            }
            if (nearest > best) {
              best = nearest;
              pick = c;
            }
          }
        }
        claim(pick, s);
      }
    }
  }

  std::array<std::optional<std::size_t>, 4> neighbours(std::size_t c) const {
    static constexpr long long di[] = {1, -1, 0, 0};
    static constexpr long long dj[] = {0, 0, 1, -1};
    std::array<std::optional<std::size_t>, 4> out;
    for (std::size_t k = 0; k < 4; ++k) {
      auto it = lookup_.find({cells_[c].map, CellIndex{cells_[c].index.i + di[k], cells_[c].index.j + dj[k]}});
      if (it != lookup_.end()) out[k] = it->second;
    }
    return out;
  }

  void claim(std::size_t c, int s) {
    Cell& cell = cells_[c];
    cell.owner = s;
    ++claimed_;
    n_[s] += cell.samples.size();
    for (std::size_t k = 0; k < keys_.size(); ++k) {
      has_[s][k] += cell.has_key[k];
      for (const auto& [v, n] : cell.values[k]) cnt_[s][k][v] += n;
    }
    for (auto& f : frontier_) f.erase(c);
    for (const auto& nb : neighbours(c)) {
      if (nb && cells_[*nb].owner == kFree) frontier_[s].insert(*nb);
    }
  }

  // Contribution of set s to the deficit score, optionally with cell c added.
  double term(int s, const Cell* add) const {
    const double total = static_cast<double>(ds_.size());
    const double n = static_cast<double>(n_[s] + (add ? add->samples.size() : 0));
    double score = std::abs(n / total - opt_.targets[static_cast<std::size_t>(s)]);
    if (opt_.balance_weight == 0.0) return score;
    double dev = 0.0;
    for (std::size_t k = 0; k < keys_.size(); ++k) {
      const std::size_t has = has_[s][k] + (add ? add->has_key[k] : 0);
      if (has == 0) {
        dev += 1.0;
        continue;
      }
      std::vector<std::size_t> counts = cnt_[s][k];
      if (add) {
        for (const auto& [v, cnt] : add->values[k]) counts[v] += cnt;
      }
      for (std::size_t v = 0; v < counts.size(); ++v) {
        dev += std::abs(static_cast<double>(counts[v]) / static_cast<double>(has) - keys_[k].full[v]);
      }
    }
    return score + opt_.balance_weight * dev;
  }

  struct Candidate {
    double delta;
    double relative_deficit;
    int same_neighbours;
    std::size_t cell;
    int set;
  };

  static bool better(const Candidate& a, const Candidate& b) {
    if (a.delta != b.delta) return a.delta < b.delta;
    if (a.relative_deficit != b.relative_deficit) return a.relative_deficit > b.relative_deficit;
    if (a.same_neighbours != b.same_neighbours) return a.same_neighbours > b.same_neighbours;
    if (a.cell != b.cell) return a.cell < b.cell;
    return a.set < b.set;
  }

  Candidate evaluate(std::size_t c, int s, double base) const {
    int same = 0;
    for (const auto& nb : neighbours(c)) {
      if (nb && cells_[*nb].owner == s) ++same;
    }
    const double target = opt_.targets[static_cast<std::size_t>(s)];
    const double share = static_cast<double>(n_[s]) / static_cast<double>(ds_.size());
    return {term(s, &cells_[c]) - base, (target - share) / target, same, c, s};
  }

  void grow() {
    while (claimed_ < cells_.size()) {
      std::optional<Candidate> best;
      bool any_frontier = false;
      for (int s = 0; s < kSets; ++s) {
        if (frontier_[s].empty()) continue;
        any_frontier = true;
        const double base = term(s, nullptr);
        for (std::size_t c : frontier_[s]) {
          const Candidate cand = evaluate(c, s, base);
          if (!best || better(cand, *best)) best = cand;
        }
      }
      if (!any_frontier) {
        // Disconnected component: any free cell may start a new block.
        for (int s = 0; s < kSets; ++s) {
          const double base = term(s, nullptr);
          for (std::size_t c = 0; c < cells_.size(); ++c) {
            if (cells_[c].owner != kFree) continue;
            const Candidate cand = evaluate(c, s, base);
            if (!best || better(cand, *best)) best = cand;
          }
        }
      }
      claim(best->cell, best->set);
    }
  }

  PartitionResult emit() const {
    struct Strip {
      std::size_t map;
      long long i;
      long long j0;
      long long j1;
      int set;
    };
    std::vector<Strip> strips;
    // cells_ is ordered by (map, i, j).
    for (const auto& c : cells_) {
      if (!strips.empty()) {
        Strip& last = strips.back();
        if (last.map == c.map && last.i == c.index.i && last.j1 + 1 == c.index.j && last.set == c.owner) {
          last.j1 = c.index.j;
          continue;
        }
      }
      strips.push_back({c.map, c.index.i, c.index.j, c.index.j, c.owner});
    }
    // Where strips touch, the cell a point belongs to under the floor rule lies
    // at the larger i, then the larger j: rank those first.
    std::sort(strips.begin(), strips.end(), [](const Strip& a, const Strip& b) {
      if (a.map != b.map) return a.map < b.map;
      if (a.i != b.i) return a.i > b.i;
      return a.j0 > b.j0;
    });
    PartitionResult result;
    const double cs = opt_.cell_size;
    int priority = 0;
    std::size_t current_map = strips.empty() ? 0 : strips.front().map;
    for (const auto& st : strips) {
      if (st.map != current_map) {
        current_map = st.map;
        priority = 0;
      }
      const double x0 = static_cast<double>(st.i) * cs;
      const double x1 = static_cast<double>(st.i + 1) * cs;
      const double y0 = static_cast<double>(st.j0) * cs;
      const double y1 = static_cast<double>(st.j1 + 1) * cs;
      Region r;
      r.map_id = maps_[st.map];
      r.target_set = static_cast<SetLabel>(st.set);
      r.priority = priority++;
      r.name = r.map_id + ":" + std::string(to_string(r.target_set)) + ":" + std::to_string(st.i) + ":" +
               std::to_string(st.j0) + "-" + std::to_string(st.j1);
      r.polygon = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
      result.regions.regions.push_back(std::move(r));
    }
    auto assigned = assign_by_regions(ds_, result.regions, AssignMode::per_sample);
    result.split = std::move(assigned.split);
    result.split.set_provenance("auto_partition(seed=" + std::to_string(opt_.seed) + ")");
    result.cuts = std::move(assigned.cuts);
    if (opt_.locked) {
      for (const auto& s : ds_.samples()) {
        const auto want = opt_.locked->get(s.id);
        if (want && *want != SetLabel::unassigned && result.split.get(s.id) != want) {
          throw std::logic_error("auto_partition broke the lock on sample " + s.id);
        }
      }
    }
    return result;
  }

  struct Key {
    std::string name;
    std::map<std::string, std::size_t> value_ids;
    std::vector<double> full;
  };

  const Dataset& ds_;
  const PartitionOptions& opt_;
  std::vector<std::string> maps_;
  std::vector<Cell> cells_;
  std::map<std::pair<std::size_t, CellIndex>, std::size_t> lookup_;
  std::vector<Key> keys_;
  std::size_t claimed_ = 0;
  std::array<std::size_t, kSets> n_{};
  std::array<std::vector<std::size_t>, kSets> has_;
  std::array<std::vector<std::vector<std::size_t>>, kSets> cnt_;
  std::array<std::set<std::size_t>, kSets> frontier_;
};

}  // namespace

PartitionResult auto_partition(const Dataset& ds, const PartitionOptions& options) {
  if (ds.empty()) throw Error(ErrorKind::invalid_argument, "cannot partition an empty dataset");
  return Grower(ds, options).run();
}

}  // namespace geosplit
