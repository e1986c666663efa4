#include "geosplit/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <httplib.h>

#include "geosplit/error.hpp"
#include "geosplit/ingest.hpp"
#include "geosplit/leakage.hpp"
#include "geosplit/manifest.hpp"
#include "geosplit/mapeval.hpp"
#include "geosplit/parallel.hpp"
#include "geosplit/partition.hpp"
#include "geosplit/raster.hpp"
#include "geosplit/report.hpp"
#include "geosplit/service.hpp"
#include "geosplit/spatial.hpp"
#include "geosplit/split.hpp"
#include "geosplit/text.hpp"

namespace geosplit {

namespace {

namespace fs = std::filesystem;

// Thrown by a subcommand that ran to completion but whose result is a failure
// (validate, verify).
struct CheckFailed {};

struct Globals {
  std::size_t threads = 0;
  std::string timestamp;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string(), path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Dataset load_dataset(const fs::path& path) { return load_samples(path, sample_format_for(path)); }

std::vector<double> parse_doubles(const std::string& text, const std::string& flag) {
  std::vector<double> v;
  for (const auto& item : split_list(text, ',')) {
    auto d = parse_double(item);
    if (!d) throw CLI::ValidationError(flag, "not a number: " + item);
    v.push_back(*d);
  }
  if (v.empty()) throw CLI::ValidationError(flag, "empty list");
  return v;
}

std::array<double, 3> parse_targets(const std::string& text) {
  auto v = parse_doubles(text, "--targets");
  if (v.size() != 3) throw CLI::ValidationError("--targets", "expected train,val,test");
  return {v[0], v[1], v[2]};
}

std::vector<std::string> parse_keys(const std::string& text) {
  return text.empty() ? std::vector<std::string>{} : split_list(text, ',');
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(const std::vector<std::string>& args);

 private:
  void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
      out_ << text;
    } else {
      write_text_file(path, text);
    }
  }
  std::string created() const { return globals_.timestamp.empty() ? utc_timestamp() : globals_.timestamp; }

  void add_audit(CLI::App& app);
  void add_histogram(CLI::App& app);
  void add_balance(CLI::App& app);
  void add_assign(CLI::App& app);
  void add_partition(CLI::App& app);
  void add_folds(CLI::App& app);
  void add_filter(CLI::App& app);
  void add_eval(CLI::App& app);
  void add_validate(CLI::App& app);
  void add_serve(CLI::App& app);
  void add_bundle(CLI::App& app);
  void add_verify(CLI::App& app);
  void add_resample(CLI::App& app);

  std::ostream& out_;
  std::ostream& err_;
  Globals globals_;
  std::function<void()> action_;
};

void Runner::add_audit(CLI::App& app) {
  auto* cmd = app.add_subcommand("audit", "Leakage of val/test samples relative to train");
  struct Opts {
    std::string samples, split, thresholds = "5", curve, out, csv, curve_csv;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--samples", o->samples, "Samples file (.jsonl or .csv)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--split", o->split, "split.csv with sample_id,set")->required()->check(CLI::ExistingFile);
  cmd->add_option("--thresholds", o->thresholds, "Comma-separated distance thresholds in metres");
  cmd->add_option("--curve", o->curve, "Also compute the leakage curve, as MAX:STEP metres");
  cmd->add_option("--out", o->out, "JSON report path (stdout when empty)");
  cmd->add_option("--csv", o->csv, "Write set,threshold,ratio rows here");
  cmd->add_option("--curve-csv", o->curve_csv, "Write the curve as set,threshold,ratio rows here");
  cmd->callback([this, o] {
    const auto thresholds = parse_doubles(o->thresholds, "--thresholds");
    std::optional<std::pair<double, double>> curve;
    if (!o->curve.empty()) {
      const auto colon = o->curve.find(':');
      auto max = parse_double(o->curve.substr(0, colon));
      auto step = colon == std::string::npos ? std::nullopt : parse_double(o->curve.substr(colon + 1));
      if (!max || !step) throw CLI::ValidationError("--curve", "expected MAX:STEP");
      curve = {*max, *step};
    }
    action_ = [this, o, thresholds, curve] {
      const Dataset ds = load_dataset(o->samples);
      const SplitAssignment split = load_split_csv(o->split);
      const LeakageReport report = audit(ds, split, thresholds);
      json j = report;
      if (curve) {
        const auto points = distance_curve(ds, split, curve->first, curve->second);
        j["distance_curve"] = points;
        if (!o->curve_csv.empty()) write_text_file(o->curve_csv, curve_csv(points));
      }
      if (!o->csv.empty()) write_text_file(o->csv, leakage_csv(report));
      emit(canonical_dump(j), o->out);
    };
  });
}

void Runner::add_histogram(CLI::App& app) {
  auto* cmd = app.add_subcommand("histogram", "Sample counts over square grid cells");
  struct Opts {
    std::string samples, heatmap, out, csv, cells_csv;
    double cell = 60.0;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--samples", o->samples, "Samples file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--cell", o->cell, "Cell side in metres")->check(CLI::PositiveNumber);
  cmd->add_option("--heatmap", o->heatmap, "Emit the dense count grid of this map instead");
  cmd->add_option("--out", o->out, "JSON output path (stdout when empty)");
  cmd->add_option("--csv", o->csv, "Write the count,cells marginal here");
  cmd->add_option("--cells-csv", o->cells_csv, "Write map_id,i,j,count rows here");
  cmd->callback([this, o] {
    action_ = [this, o] {
      const Dataset ds = load_dataset(o->samples);
      const CellHistogram h = cell_histogram(ds, o->cell);
      if (!o->csv.empty()) write_text_file(o->csv, marginal_csv(h));
      if (!o->cells_csv.empty()) write_text_file(o->cells_csv, histogram_cells_csv(h));
      if (!o->heatmap.empty()) {
        emit(canonical_dump(json(heatmap_export(h, o->heatmap))), o->out);
      } else {
        emit(canonical_dump(json(h)), o->out);
      }
    };
  });
}

void Runner::add_balance(CLI::App& app) {
  auto* cmd = app.add_subcommand("balance", "Attribute distribution per split set");
  struct Opts {
    std::string samples, split, attrs, out, csv;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--samples", o->samples, "Samples file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--split", o->split, "split.csv")->required()->check(CLI::ExistingFile);
  cmd->add_option("--attrs", o->attrs, "Comma-separated attribute keys (all keys when empty)");
  cmd->add_option("--out", o->out, "JSON output path (stdout when empty)");
  cmd->add_option("--csv", o->csv, "Write key,value,set,ratio,full_ratio rows here");
  cmd->callback([this, o] {
    action_ = [this, o] {
      const Dataset ds = load_dataset(o->samples);
      auto keys = parse_keys(o->attrs);
      if (keys.empty()) keys = ds.attribute_keys();
      const BalanceReport report = balance_report(ds, load_split_csv(o->split), keys);
      if (!o->csv.empty()) write_text_file(o->csv, balance_csv(report));
      emit(canonical_dump(json(report)), o->out);
    };
  });
}

void Runner::add_assign(CLI::App& app) {
  auto* cmd = app.add_subcommand("assign", "Label samples by region polygons");
  struct Opts {
    std::string samples, regions, mode = "per_sample", out_dir;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--samples", o->samples, "Samples file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--regions", o->regions, "regions.json")->required()->check(CLI::ExistingFile);
  cmd->add_option("--mode", o->mode, "per_sample or per_sequence")
      ->check(CLI::IsMember({"per_sample", "per_sequence"}));
  cmd->add_option("--out-dir", o->out_dir, "Directory for split.csv, manifest.json, cuts.json")->required();
  cmd->callback([this, o] {
    action_ = [this, o] {
      const Dataset ds = load_dataset(o->samples);
      const RegionSet regions = load_regions(o->regions);
      const auto result = assign_by_regions(ds, regions, *parse_assign_mode(o->mode));
      const InputDigest inputs[] = {digest_file(o->samples, true), digest_file(o->regions, true)};
      write_split_artifacts(o->out_dir, make_split_artifacts(ds, result.split, result.cuts, inputs, created()));
    };
  });
}

void Runner::add_partition(CLI::App& app) {
  auto* cmd = app.add_subcommand("partition", "Grow contiguous train/val/test blocks automatically");
  struct Opts {
    std::string samples, targets = "0.70,0.15,0.15", lock, attrs, out_dir;
    std::uint64_t seed = 0;
    double cell = 60.0;
    double balance_weight = 1.0;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--samples", o->samples, "Samples file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--targets", o->targets, "train,val,test proportions");
  cmd->add_option("--seed", o->seed, "Seed for the first block on each map");
  cmd->add_option("--lock", o->lock, "split.csv whose train/val/test labels must be kept")
      ->check(CLI::ExistingFile);
  cmd->add_option("--cell", o->cell, "Block cell side in metres")->check(CLI::PositiveNumber);
  cmd->add_option("--attrs", o->attrs, "Attribute keys to balance (all keys when empty)");
  cmd->add_option("--balance-weight", o->balance_weight, "Weight of the attribute term")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--out-dir", o->out_dir, "Directory for regions.json and the split files")->required();
  cmd->callback([this, o] {
    const auto targets = parse_targets(o->targets);
    action_ = [this, o, targets] {
      const Dataset ds = load_dataset(o->samples);
      PartitionOptions opts;
      opts.targets = targets;
      opts.cell_size = o->cell;
      opts.seed = o->seed;
      opts.balance_weight = o->balance_weight;
      opts.attribute_keys = parse_keys(o->attrs);
      if (opts.attribute_keys.empty()) opts.attribute_keys = ds.attribute_keys();
      std::vector<InputDigest> inputs{digest_file(o->samples, true)};
      if (!o->lock.empty()) {
        opts.locked = load_split_csv(o->lock);
        inputs.push_back(digest_file(o->lock, true));
      }
      const PartitionResult result = auto_partition(ds, opts);
      const std::string regions_text = regions_json_string(result.regions);
      write_text_file(fs::path(o->out_dir) / "regions.json", regions_text);
      write_split_artifacts(o->out_dir, make_split_artifacts(ds, result.split, result.cuts, inputs, created()));
    };
  });
}

void Runner::add_folds(CLI::App& app) {
  auto* cmd = app.add_subcommand("folds", "City-wise cross-validation folds");
  struct Opts {
    std::string samples, preset, folds, out, out_dir;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--samples", o->samples, "Samples file")->required()->check(CLI::ExistingFile);
  auto* preset = cmd->add_option("--preset", o->preset, "Built-in fold set")
                     ->check(CLI::IsMember(fold_preset_names()));
  auto* file = cmd->add_option("--folds", o->folds, "folds.json with custom fold definitions")
                   ->check(CLI::ExistingFile);
  preset->excludes(file);
  cmd->add_option("--out", o->out, "JSON summary path (stdout when empty)");
  cmd->add_option("--out-dir", o->out_dir, "Write one split CSV per fold here as fold_<name>.csv");
  cmd->callback([this, o] {
    if (o->preset.empty() && o->folds.empty()) throw CLI::RequiredError("--preset or --folds");
    action_ = [this, o] {
      const Dataset ds = load_dataset(o->samples);
      const auto specs = o->preset.empty() ? parse_folds(read_file(o->folds)) : fold_preset(o->preset);
      const auto folds = citywise_folds(ds, specs);
      if (!o->out_dir.empty()) {
        for (const auto& f : folds) {
          write_text_file(fs::path(o->out_dir) / ("fold_" + f.spec.name + ".csv"), split_csv_string(ds, f.split));
        }
      }
      emit(canonical_dump(folds_report_json(folds)), o->out);
    };
  });
}

void Runner::add_filter(CLI::App& app) {
  auto* cmd = app.add_subcommand("filter", "Drop val/test samples near train samples");
  struct Opts {
    std::string samples, split, out;
    double buffer = 60.0;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--samples", o->samples, "Samples file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--split", o->split, "split.csv")->required()->check(CLI::ExistingFile);
  cmd->add_option("--buffer", o->buffer, "Buffer distance in metres")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o->out, "Filtered split.csv path (stdout when empty)");
  cmd->callback([this, o] {
    action_ = [this, o] {
      const Dataset ds = load_dataset(o->samples);
      const auto filtered = buffer_filter(ds, load_split_csv(o->split), o->buffer);
      emit(split_csv_string(ds, filtered), o->out);
    };
  });
}

void Runner::add_eval(CLI::App& app) {
  auto* cmd = app.add_subcommand("eval", "Chamfer-matched AP of predicted map elements");
  struct Opts {
    std::string preds, gts, thresholds = "0.5,1.0,1.5", out, csv;
    double interval = kDefaultResampleInterval;
    bool iou = false;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--preds", o->preds, "Predicted elements (.jsonl, with confidence)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--gts", o->gts, "Ground-truth elements (.jsonl)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--thresholds", o->thresholds, "Chamfer thresholds in metres");
  cmd->add_option("--interval", o->interval, "Resampling interval in metres")->check(CLI::PositiveNumber);
  cmd->add_flag("--iou", o->iou, "Also report rasterised IoU per class");
  cmd->add_option("--out", o->out, "JSON report path (stdout when empty)");
  cmd->add_option("--csv", o->csv, "Write class,threshold,ap rows here");
  cmd->callback([this, o] {
    const auto thresholds = parse_doubles(o->thresholds, "--thresholds");
    action_ = [this, o, thresholds] {
      const auto preds = load_map_elements(o->preds, true);
      const auto gts = load_map_elements(o->gts, false);
      const EvalReport report = evaluate(preds, gts, thresholds, o->interval);
      json j = report;
      if (o->iou) j["iou"] = evaluate_iou(preds, gts);
      if (!o->csv.empty()) write_text_file(o->csv, eval_csv(report));
      emit(canonical_dump(j), o->out);
    };
  });
}

void Runner::add_validate(CLI::App& app) {
  auto* cmd = app.add_subcommand("validate", "Check a split against leakage, proportion and balance bounds");
  struct Opts {
    std::string samples, split, regions, targets = "0.70,0.15,0.15", attrs, out;
    ValidationOptions v;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--samples", o->samples, "Samples file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--split", o->split, "split.csv")->required()->check(CLI::ExistingFile);
  cmd->add_option("--regions", o->regions, "regions.json the split should agree with")->check(CLI::ExistingFile);
  cmd->add_option("--leak-threshold", o->v.leak_threshold, "Leakage distance in metres")->check(CLI::PositiveNumber);
  cmd->add_option("--leak-bound", o->v.leak_bound, "Largest tolerated val/test leakage ratio");
  cmd->add_option("--targets", o->targets, "train,val,test proportions");
  cmd->add_option("--proportion-tolerance", o->v.proportion_tolerance, "Allowed |proportion - target|");
  cmd->add_option("--balance-tolerance", o->v.balance_tolerance, "Allowed attribute ratio deviation");
  cmd->add_option("--attrs", o->attrs, "Attribute keys to check (all keys when empty)");
  cmd->add_option("--out", o->out, "JSON report path (stdout when empty)");
  cmd->callback([this, o] {
    o->v.targets = parse_targets(o->targets);
    o->v.attribute_keys = parse_keys(o->attrs);
    action_ = [this, o] {
      const Dataset ds = load_dataset(o->samples);
      std::optional<RegionSet> regions;
      if (!o->regions.empty()) regions = load_regions(o->regions);
      const auto report = validate_split(ds, load_split_csv(o->split), regions ? &*regions : nullptr, o->v);
      emit(canonical_dump(json(report)), o->out);
      if (!report.passed()) {
        for (const auto& c : report.checks) {
          if (!c.passed) err_ << "geosplit: validate: check '" << c.name << "' failed\n";
        }
        throw CheckFailed{};
      }
    };
  });
}

void Runner::add_serve(CLI::App& app) {
  auto* cmd = app.add_subcommand("serve", "Local HTTP API for the split designer");
  struct Opts {
    std::string samples, regions, ui_dir, project_dir = ".", project_id = "default";
    int port = kDefaultPort;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--samples", o->samples, "Samples file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--regions", o->regions, "Initial regions.json")->check(CLI::ExistingFile);
  cmd->add_option("--port", o->port, "TCP port on 127.0.0.1")->check(CLI::Range(1, 65535));
  cmd->add_option("--ui-dir", o->ui_dir, "Static UI assets served at /")->check(CLI::ExistingDirectory);
  cmd->add_option("--project-dir", o->project_dir, "Exports default to <project-dir>/export");
  cmd->add_option("--project-id", o->project_id, "Project name reported by /api/project");
  cmd->callback([this, o] {
    action_ = [this, o] {
      auto ds = std::make_shared<const Dataset>(load_dataset(o->samples));
      RegionSet initial;
      if (!o->regions.empty()) initial = load_regions(o->regions);
      ServiceOptions opts;
      opts.samples_path = o->samples;
      opts.project_dir = o->project_dir;
      opts.timestamp = globals_.timestamp;
      opts.project_id = o->project_id;
      opts.ui_dir = o->ui_dir;
      SplitService service(ds, opts, std::move(initial));
      err_ << "geosplit: serving on http://127.0.0.1:" << o->port << "\n";
      serve(service, o->port);
    };
  });
}

void Runner::add_bundle(CLI::App& app) {
  auto* cmd = app.add_subcommand("bundle", "Combine report JSON files with input digests");
  struct Opts {
    std::string audit, balance, histogram, eval, out;
    std::vector<std::string> inputs;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--audit", o->audit, "Output of audit (leakage and optional curve)")->check(CLI::ExistingFile);
  cmd->add_option("--balance", o->balance, "Output of balance")->check(CLI::ExistingFile);
  cmd->add_option("--histogram", o->histogram, "Output of histogram")->check(CLI::ExistingFile);
  cmd->add_option("--eval", o->eval, "Output of eval")->check(CLI::ExistingFile);
  cmd->add_option("--input", o->inputs, "Input file to digest (repeatable)")->check(CLI::ExistingFile);
  cmd->add_option("--out", o->out, "Bundle path (stdout when empty)");
  cmd->callback([this, o] {
    action_ = [this, o] {
      auto load = [](const std::string& path) {
        try {
          return json::parse(read_file(path));
        } catch (const json::parse_error& e) {
          throw Error(ErrorKind::parse, e.what(), path);
        }
      };
      ReportParts parts;
      try {
        if (!o->audit.empty()) {
          const json j = load(o->audit);
          parts.leakage = j.get<LeakageReport>();
          if (j.contains("distance_curve")) parts.curve = j["distance_curve"].get<std::vector<CurvePoint>>();
        }
        if (!o->balance.empty()) parts.balance = load(o->balance).get<BalanceReport>();
        if (!o->histogram.empty()) parts.histogram = load(o->histogram).get<CellHistogram>();
        if (!o->eval.empty()) parts.eval = load(o->eval).get<EvalReport>();
      } catch (const json::exception& e) {
        throw Error(ErrorKind::parse, e.what());
      }
      std::vector<fs::path> inputs(o->inputs.begin(), o->inputs.end());
      emit(bundle_string(bundle(std::move(parts), inputs, created())), o->out);
    };
  });
}

void Runner::add_verify(CLI::App& app) {
  auto* cmd = app.add_subcommand("verify", "Re-hash a bundle's inputs and re-check its reports");
  struct Opts {
    std::string bundle, base;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--bundle", o->bundle, "Bundle JSON")->required()->check(CLI::ExistingFile);
  cmd->add_option("--base", o->base, "Directory relative input paths resolve against (current when empty)");
  cmd->callback([this, o] {
    action_ = [this, o] {
      ReportBundle b;
      try {
        b = bundle_from_json(json::parse(read_file(o->bundle)));
      } catch (const json::exception& e) {
        throw Error(ErrorKind::parse, e.what(), o->bundle);
      }
      const auto result = verify_bundle(b, o->base);
      if (!result.ok) {
        for (const auto& p : result.problems) err_ << "geosplit: verify: " << p << "\n";
        throw CheckFailed{};
      }
      out_ << "ok\n";
    };
  });
}

void Runner::add_resample(CLI::App& app) {
  auto* cmd = app.add_subcommand("resample", "Thin each sequence by keyframe or stride");
  struct Opts {
    std::string samples, mode = "keyframes", out;
    std::size_t n = 1;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--samples", o->samples, "Samples file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--mode", o->mode, "keyframes, every_nth or all")
      ->check(CLI::IsMember({"keyframes", "every_nth", "all"}));
  cmd->add_option("--n", o->n, "Stride for every_nth")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o->out, "Output samples file; format from extension (jsonl to stdout when empty)");
  cmd->callback([this, o] {
    action_ = [this, o] {
      const Dataset ds = load_dataset(o->samples);
      ResampleMode mode = o->mode == "keyframes"   ? ResampleMode::keyframes_only()
                          : o->mode == "every_nth" ? ResampleMode::every_nth(o->n)
                                                   : ResampleMode::all();
      const Dataset thinned = resample_sequences(ds, mode);
      std::ostringstream ss;
      write_samples(ss, thinned, o->out.empty() ? SampleFormat::jsonl : sample_format_for(o->out));
      emit(ss.str(), o->out);
    };
  });
}

bool is_input_error(ErrorKind k) {
  switch (k) {
    case ErrorKind::parse:
    case ErrorKind::duplicate_id:
    case ErrorKind::non_monotone_time:
    case ErrorKind::missing_confidence:
    case ErrorKind::degenerate_polyline:
    case ErrorKind::invalid_polygon:
    case ErrorKind::duplicate_priority:
      return true;
    default:
      return false;
  }
}

int Runner::run(const std::vector<std::string>& args) {
  CLI::App app{"Geographic leakage auditor and split designer", "geosplit"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kToolVersion));
  app.add_option("--threads", globals_.threads, "Worker thread cap (0: GEOSPLIT_THREADS or all cores)");
  app.add_option("--timestamp", globals_.timestamp, "Pin the created timestamp written into outputs");

  add_audit(app);
  add_histogram(app);
  add_balance(app);
  add_assign(app);
  add_partition(app);
  add_folds(app);
  add_filter(app);
  add_eval(app);
  add_validate(app);
  add_serve(app);
  add_bundle(app);
  add_verify(app);
  add_resample(app);

  // CLI11 consumes a reversed argument vector.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out_, err_);
      return kExitOk;
    }
    err_ << "geosplit: " << e.what() << "\n";
    return kExitUsage;
  }
  if (globals_.threads != 0) set_max_threads(globals_.threads);

  try {
    action_();
  } catch (const CheckFailed&) {
    return kExitFailure;
  } catch (const Error& e) {
    err_ << "geosplit: " << e.what() << "\n";
    return is_input_error(e.kind()) ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    err_ << "geosplit: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return Runner(out, err).run(args);
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace geosplit
