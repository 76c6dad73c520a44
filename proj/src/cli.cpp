#include "facestat/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "facestat/pipeline.hpp"
#include "facestat/plot.hpp"

namespace facestat {

namespace fs = std::filesystem;

namespace {

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw Error(ErrorCode::Io, fmt::format("cannot create directory {}: {}", dir.string(),
                                           ec.message()));
}

void validate(const Config& c) {
  if (!(c.lo < c.hi)) throw Error(ErrorCode::Domain, "--lo must be smaller than --hi");
  if (c.size < 3) throw Error(ErrorCode::Domain, "--size must be at least 3");
  if (!(c.cap > 0)) throw Error(ErrorCode::Domain, "--cap must be positive");
}

// "real/sub/a.jpg" -> "sub__a.png"
std::string output_name(const std::string& rel_path) {
  fs::path p(rel_path);
  std::string flat;
  auto it = p.begin();
  ++it;  // class directory
  for (; it != p.end(); ++it) {
    if (!flat.empty()) flat += "__";
    flat += it->string();
  }
  return fs::path(flat).replace_extension(".png").string();
}

}  // namespace

int cmd_preprocess(const Config& config, std::ostream& out) {
  validate(config);
  const auto records = read_landmark_file(config.landmarks.string());

  std::map<std::string, std::vector<std::string>> candidates;
  std::map<std::string, std::size_t> rejected;
  for (ClassLabel c : kAllClasses) {
    candidates[std::string(class_name(c))];
    rejected[std::string(class_name(c))] = 0;
  }
  std::map<std::string, const LandmarkRecord*> by_path;
  for (const auto& rec : records) {
    const std::string cls = fs::path(rec.image_path).begin()->string();
    class_from_name(cls);  // validates the leading directory
    bool keep = false;
    try {
      keep = is_frontal(frontal_ratio(rec), config.lo, config.hi);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateLandmarks) throw;
    }
    if (keep) {
      candidates[cls].push_back(rec.image_path);
      by_path[rec.image_path] = &rec;
    } else {
      ++rejected[cls];
    }
  }
  for (ClassLabel c : kAllClasses) {
    const std::string name(class_name(c));
    out << fmt::format("{}: kept {} rejected {}\n", name, candidates[name].size(), rejected[name]);
  }

  const SplitManifest manifest = sample_split(candidates, config.counts, config.seed);
  ensure_directory(config.out);
  write_text_file(config.out / "split_manifest.json", manifest_to_json(manifest));

  struct Task {
    const LandmarkRecord* rec;
    fs::path target;
  };
  std::vector<Task> tasks;
  for (const auto& [cls, split] : manifest.classes) {
    const std::pair<const char*, const std::vector<std::string>*> parts[] = {
        {"train", &split.train}, {"val", &split.val}, {"test", &split.test}};
    for (const auto& [split_name, paths] : parts) {
      const fs::path dir = config.out / split_name / cls;
      ensure_directory(dir);
      for (const auto& p : *paths) tasks.push_back({by_path.at(p), dir / output_name(p)});
    }
  }
  parallel_for(tasks.size(), config.workers, [&](std::size_t i) {
    const Task& t = tasks[i];
    const RgbImage img = read_image((config.root / t.rec->image_path).string());
    write_png(extract_face(img, t.rec->face_box, config.size), t.target.string());
  });
  out << fmt::format("wrote {} face images and split_manifest.json to {}\n", tasks.size(),
                     config.out.string());
  return kExitOk;
}

int cmd_analyze(const Config& config, std::ostream& out) {
  validate(config);
  const DatasetManifest manifest = scan_dataset(config.root);
  const AnalysisResult result = analyze_dataset(manifest, config.workers);
  const auto aggregates = aggregate(result.records);
  const AnovaTable table = anova_table(result.records, config.cap, config.whole_image_only);

  ensure_directory(config.out);
  write_property_csv(result.records, config.out / "properties.csv");
  write_aggregate_json(aggregates, table, result.image_counts, config.cap,
                       config.out / "report.json");
  write_text_file(config.out / "errors.tsv", failure_sidecar(result.failures));

  for (ClassLabel c : kAllClasses)
    out << fmt::format("{}: {} images\n", class_name(c), result.image_counts[index_of(c)]);
  if (!result.failures.empty())
    out << fmt::format("skipped {} unreadable image(s); see errors.tsv\n", result.failures.size());
  out << fmt::format("anova cells: {}\n", table.size());
  return kExitOk;
}

int cmd_eval(const Config& config, std::ostream& out) {
  const auto predictions = read_prediction_log(config.predictions.string());
  const EvaluationReport report = evaluate(predictions);
  out << metrics_table(report);
  if (!config.out.empty()) {
    ensure_directory(config.out);
    write_text_file(config.out / "metrics.csv", metrics_csv(report));
    write_text_file(config.out / "metrics.json", metrics_json(report));
  }
  return kExitOk;
}

int cmd_plot(const Config& config, std::ostream& out) {
  const Report report = parse_report_json(read_text_file(config.report));
  if (report.regions.empty()) throw Error(ErrorCode::EmptySpec, "report contains no regions");

  std::vector<std::pair<std::string, std::string>> files;
  const auto class_series_label = [](ClassLabel c) { return std::string(class_name(c)); };

  bool has_grid = true;
  for (int r = 1; r < kRegionCount; ++r) has_grid = has_grid && report.regions.count(r) > 0;
  if (has_grid) {
    std::vector<std::string> ticks;
    for (int r = 1; r < kRegionCount; ++r) ticks.push_back(std::to_string(r));
    for (Property p : kAllProperties) {
      const int pi = static_cast<int>(p);
      const std::string name(property_name(p));

      PlotSpec line;
      line.title = fmt::format("Average {} per facial region", name);
      line.x_label = "region";
      line.y_label = name;
      line.ticks = ticks;
      for (ClassLabel c : kAllClasses) {
        PlotSeries s{class_series_label(c), {}, {}};
        for (int r = 1; r < kRegionCount; ++r)
          s.values.push_back(report.regions.at(r)[pi].class_means[index_of(c)]);
        line.series.push_back(std::move(s));
      }
      files.emplace_back("line_" + name + ".svg", render_line_plot(line));

      PlotSpec bars;
      bars.title = fmt::format("ANOVA -log10(p) for {} per facial region", name);
      bars.x_label = "region";
      bars.y_label = "-log10(p)";
      bars.ticks = ticks;
      PlotSeries s{"-log10(p)", {}, {}};
      for (int r = 1; r < kRegionCount; ++r) {
        s.values.push_back(report.regions.at(r)[pi].neg_log10_p);
        s.flagged.push_back(report.regions.at(r)[pi].capped);
      }
      bars.series.push_back(std::move(s));
      files.emplace_back("bars_" + name + ".svg", render_bar_plot(bars));
    }
  } else {
    out << "report has no per-region cells; rendering whole-image plots only\n";
  }

  if (const auto it = report.regions.find(0); it != report.regions.end()) {
    std::vector<std::string> ticks;
    for (Property p : kAllProperties) ticks.emplace_back(property_name(p));

    PlotSpec values;
    values.title = "Average property values, whole image";
    values.x_label = "property";
    values.y_label = "mean value";
    values.ticks = ticks;
    for (ClassLabel c : kAllClasses) {
      PlotSeries s{class_series_label(c), {}, {}};
      for (Property p : kAllProperties)
        s.values.push_back(it->second[static_cast<int>(p)].class_means[index_of(c)]);
      values.series.push_back(std::move(s));
    }
    files.emplace_back("whole_values.svg", render_bar_plot(values));

    PlotSpec bars;
    bars.title = "ANOVA -log10(p), whole image";
    bars.x_label = "property";
    bars.y_label = "-log10(p)";
    bars.ticks = ticks;
    PlotSeries s{"-log10(p)", {}, {}};
    for (Property p : kAllProperties) {
      s.values.push_back(it->second[static_cast<int>(p)].neg_log10_p);
      s.flagged.push_back(it->second[static_cast<int>(p)].capped);
    }
    bars.series.push_back(std::move(s));
    files.emplace_back("whole_neglogp.svg", render_bar_plot(bars));
  }

  ensure_directory(config.out);
  for (const auto& [name, svg] : files) write_text_file(config.out / name, svg);
  out << fmt::format("wrote {} SVG files to {}\n", files.size(), config.out.string());
  return kExitOk;
}

namespace {

constexpr const char* kPlotFooter =
    "Files written to --out:\n"
    "  line_<property>.svg   class means across regions 1-9\n"
    "  bars_<property>.svg   ANOVA -log10(p) across regions 1-9 (hatched = capped)\n"
    "  whole_values.svg      class means of all properties, whole image\n"
    "  whole_neglogp.svg     ANOVA -log10(p) of all properties, whole image\n"
    "<property> is one of brightness, sharpness, luminosity, red_mean, green_mean,\n"
    "blue_mean, contrast, detail.";

// Reads key=value lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config file " + path);
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int line_no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::Parse, fmt::format("{}:{}: expected key=value", path, line_no));
    entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return entries;
}

// Config file entries become flags unless the command line already sets them.
std::vector<std::string> merge_config_file(const std::vector<std::string>& args) {
  std::string config_path;
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[++i];
    } else if (args[i].starts_with("--config=")) {
      config_path = args[i].substr(9);
    } else {
      kept.push_back(args[i]);
    }
  }
  if (config_path.empty()) return args;

  std::set<std::string> given;
  for (const auto& a : kept)
    if (a.starts_with("--")) given.insert(a.substr(2, a.find('=') - 2));

  // Insert after the subcommand name so the flags reach the subcommand.
  std::vector<std::string> injected;
  for (const auto& [key, value] : read_config_file(config_path)) {
    if (given.count(key)) continue;
    if (key == "whole-image-only") {
      if (value == "true" || value == "1") injected.push_back("--whole-image-only");
      continue;
    }
    injected.push_back("--" + key);
    injected.push_back(value);
  }
  std::vector<std::string> merged;
  merged.push_back(kept.empty() ? "facestat" : kept.front());
  if (kept.size() > 1) merged.push_back(kept[1]);
  merged.insert(merged.end(), injected.begin(), injected.end());
  if (kept.size() > 2) merged.insert(merged.end(), kept.begin() + 2, kept.end());
  return merged;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Config config;
  CLI::App app{"facestat: per-region image statistics for real, deepfake and synthetic faces"};
  app.name("facestat");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  const auto config_flag = [](CLI::App* sub) {
    sub->add_option("--config", "key=value file of flag defaults (flags on the command line win)");
  };

  auto* pre = app.add_subcommand("preprocess", "Filter frontal faces, sample splits, extract face crops");
  pre->add_option("--root", config.root, "Directory the landmark image paths are relative to")->required();
  pre->add_option("--landmarks", config.landmarks, "Landmark file, one JSON object per line")->required();
  pre->add_option("--out", config.out, "Output directory")->required();
  pre->add_option("--lo", config.lo, "Lower frontal-ratio threshold (inclusive)")->capture_default_str();
  pre->add_option("--hi", config.hi, "Upper frontal-ratio threshold (inclusive)")->capture_default_str();
  pre->add_option("--size", config.size, "Side of the extracted square face")->capture_default_str();
  pre->add_option("--train", config.counts.train, "Training images per class")->capture_default_str();
  pre->add_option("--val", config.counts.val, "Validation images per class")->capture_default_str();
  pre->add_option("--test", config.counts.test, "Test images per class")->capture_default_str();
  pre->add_option("--seed", config.seed, "Split sampling seed")->capture_default_str();
  pre->add_option("--workers", config.workers, "Worker threads (0 = auto)")->capture_default_str();
  config_flag(pre);

  auto* ana = app.add_subcommand("analyze", "Measure every image and run per-region ANOVA");
  ana->add_option("--root", config.root, "Dataset root containing fake/, real/, synthetic/")->required();
  ana->add_option("--out", config.out, "Output directory")->required();
  ana->add_option("--cap", config.cap, "Ceiling for -log10(p)")->capture_default_str();
  ana->add_option("--workers", config.workers, "Worker threads (0 = auto)")->capture_default_str();
  ana->add_flag("--whole-image-only", config.whole_image_only, "Run ANOVA on region 0 only");
  config_flag(ana);

  auto* ev = app.add_subcommand("eval", "Per-class and class-averaged metrics from a prediction log");
  ev->add_option("--predictions", config.predictions, "Prediction log (image_path,true_label,predicted_label)")->required();
  ev->add_option("--out", config.out, "Directory for metrics.csv and metrics.json");
  config_flag(ev);

  auto* plt = app.add_subcommand("plot", "Render SVG figures from a report JSON");
  plt->add_option("--report", config.report, "report.json written by analyze")->required();
  plt->add_option("--out", config.out, "Output directory")->required();
  plt->footer(kPlotFooter);
  config_flag(plt);

  try {
    std::vector<std::string> args = merge_config_file(raw_args);
    if (args.empty()) args.emplace_back("facestat");
    // CLI11 consumes arguments in reverse order, without the program name.
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUserError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUserError;
  }

  try {
    if (pre->parsed()) return cmd_preprocess(config, out);
    if (ana->parsed()) return cmd_analyze(config, out);
    if (ev->parsed()) return cmd_eval(config, out);
    if (plt->parsed()) return cmd_plot(config, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return e.code() == ErrorCode::NonConvergence ? kExitInternalError : kExitUserError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return kExitInternalError;
}

}  // namespace facestat
