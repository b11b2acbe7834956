#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "wsol/analysis.hpp"
#include "wsol/cam.hpp"
#include "wsol/error.hpp"
#include "wsol/io.hpp"
#include "wsol/localize.hpp"
#include "wsol/metrics.hpp"
#include "wsol/normalize.hpp"
#include "wsol/parallel.hpp"
#include "wsol/sweep.hpp"
#include "wsol/synth.hpp"

namespace wsol::cli {
namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kMethodNames = {"minmax", "max", "pas", "ivr"};

struct CommonOptions {
  int threads = 1;
  int connectivity = 8;
};

// Normalization requested on the command line. An empty method means the
// input rasters are already normalized.
struct NormOptions {
  std::string method;
  std::optional<double> percentile;

  bool enabled() const { return !method.empty(); }

  NormMethod resolved_method() const { return parse_norm_method(method); }

  double resolved_percentile() const {
    const NormMethod m = resolved_method();
    if (m == NormMethod::kMinMax || m == NormMethod::kMax) return 0.0;
    if (percentile) return Percentile(*percentile).value();
    if (m == NormMethod::kPaS) return kDefaultPasPercentile;
    throw_invalid_argument("method ivr needs --percentile");
  }
};

void add_norm_options(CLI::App* cmd, NormOptions& norm, bool required) {
  auto* opt = cmd->add_option("--method", norm.method, "Normalization method")
                  ->check(CLI::IsMember(kMethodNames));
  if (required) opt->required();
  cmd->add_option("--percentile", norm.percentile,
                  "Percentile for pas (default 90) or ivr (required)");
}

void add_threads(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--threads", common.threads, "Worker threads (default: $WSOL_THREADS or 1)")
      ->check(CLI::PositiveNumber);
}

void add_connectivity(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--connectivity", common.connectivity, "Pixel connectivity for components")
      ->check(CLI::IsMember({4, 8}));
}

std::vector<double> parse_deltas(const std::string& text) {
  std::vector<double> deltas;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      size_t used = 0;
      deltas.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw_invalid_argument(fmt::format("'{}' is not an IoU threshold", item));
    }
  }
  for (double d : deltas) {
    if (!(d > 0.0 && d <= 1.0)) throw_invalid_argument(fmt::format("IoU threshold {} outside (0, 1]", d));
  }
  if (deltas.empty()) throw_invalid_argument("at least one IoU threshold is required");
  return deltas;
}

std::vector<NormalizedMap> load_maps(const std::string& index, const NormOptions& norm,
                                     int threads) {
  const io::Bundle bundle = io::load_bundle(index);
  if (!norm.enabled()) return io::load_normalized_maps(bundle);
  const std::vector<ScoreMap> raw = io::load_score_maps(bundle);
  const NormMethod method = norm.resolved_method();
  const double p = norm.resolved_percentile();
  std::vector<NormalizedMap> out(raw.size());
  parallel_for(raw.size(), threads, [&](size_t i) { out[i] = normalize(raw[i], method, p); });
  return out;
}

// Ground truth for `ids`, in that order. Sizes come from the sizes file when
// given, otherwise from the map dimensions.
std::vector<ImageBoxes> load_truth(const std::string& boxes_path, const std::string& sizes_path,
                                   const std::vector<std::pair<std::string, std::pair<int, int>>>& ids) {
  GroundTruthBoxes gt = io::load_boxes(boxes_path);
  io::ImageSizes sizes;
  if (!sizes_path.empty()) {
    sizes = io::load_image_sizes(sizes_path);
  } else {
    for (const auto& [id, wh] : ids) sizes[id] = wh;
  }
  for (const auto& [id, entry] : gt) {
    (void)entry;
    if (!sizes.count(id)) {
      throw_invalid_data(fmt::format("ground truth for unknown image '{}'", id));
    }
  }
  io::attach_sizes(gt, sizes);
  std::vector<ImageBoxes> out;
  for (const auto& [id, wh] : ids) {
    (void)wh;
    const auto it = gt.find(id);
    if (it == gt.end()) throw_invalid_data(fmt::format("image '{}' has no ground-truth box", id));
    out.push_back(it->second);
  }
  return out;
}

template <typename Map>
std::vector<std::pair<std::string, std::pair<int, int>>> ids_of(const std::vector<Map>& maps) {
  std::vector<std::pair<std::string, std::pair<int, int>>> ids;
  for (const auto& m : maps) ids.push_back({m.image_id, {m.width, m.height}});
  return ids;
}

// Masks in the order of `ids`.
std::vector<PixelMask> load_masks_for(const std::string& index,
                                      const std::vector<std::pair<std::string, std::pair<int, int>>>& ids) {
  std::map<std::string, PixelMask> by_id;
  for (PixelMask& m : io::load_masks(io::load_bundle(index))) {
    const std::string id = m.image_id;
    by_id.emplace(id, std::move(m));
  }
  std::vector<PixelMask> out;
  for (const auto& [id, wh] : ids) {
    (void)wh;
    auto it = by_id.find(id);
    if (it == by_id.end()) throw_invalid_data(fmt::format("image '{}' has no mask", id));
    out.push_back(it->second);
  }
  return out;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    io::write_text(path, text);
  }
}

// ---------------------------------------------------------------------------

struct CamArgs {
  std::string features;
  std::string weights;
  std::string out;
  int class_id = 0;
  bool nwc = false;
};

void run_cam(const CamArgs& a, const CommonOptions& common) {
  const io::Bundle bundle = io::load_bundle(a.features);
  if (bundle.entries.empty()) throw_invalid_data("feature bundle is empty");
  const int channels = bundle.entries.front().channels;
  for (const auto& e : bundle.entries) {
    if (e.channels != channels) throw_invalid_data("feature tensors disagree on channel count");
  }
  ClassWeights weights = io::load_class_weights(a.weights, channels, a.class_id);
  if (a.nwc) weights = clamp_negative_weights(weights);
  std::vector<ScoreMap> maps(bundle.entries.size());
  parallel_for(maps.size(), common.threads, [&](size_t i) {
    const auto& e = bundle.entries[i];
    const FeatureTensor f = io::load_feature_tensor(bundle.resolve(e), e.width, e.height, e.channels);
    maps[i] = compute_cam(f, weights, e.image_id);
  });
  io::store_score_maps(a.out, "maps.tsv", "maps", maps);
}

struct NormalizeArgs {
  std::string input;
  std::string out;
  NormOptions norm;
};

void run_normalize(const NormalizeArgs& a, const CommonOptions& common, std::ostream& out) {
  const std::vector<NormalizedMap> maps = load_maps(a.input, a.norm, common.threads);
  io::store_normalized_maps(a.out, "normalized.tsv", "normalized", maps);
  const auto degenerate = std::count_if(maps.begin(), maps.end(),
                                        [](const NormalizedMap& m) { return m.degenerate; });
  out << fmt::format("images,{}\ndegenerate_maps,{}\n", maps.size(), degenerate);
}

struct BoxesArgs {
  std::string input;
  std::string sizes;
  std::string out;
  double tau = 0.5;
  NormOptions norm;
};

void run_boxes(const BoxesArgs& a, const CommonOptions& common, std::ostream& out) {
  const std::vector<NormalizedMap> maps = load_maps(a.input, a.norm, common.threads);
  io::ImageSizes sizes;
  if (!a.sizes.empty()) sizes = io::load_image_sizes(a.sizes);
  const Connectivity conn = connectivity_from_int(common.connectivity);
  std::vector<std::string> lines(maps.size());
  parallel_for(maps.size(), common.threads, [&](size_t i) {
    NormalizedMap map = maps[i];
    if (!sizes.empty()) {
      const auto it = sizes.find(map.image_id);
      if (it == sizes.end()) throw_invalid_data(fmt::format("no image size for '{}'", map.image_id));
      map = at_resolution(map, it->second.first, it->second.second);
    }
    for (const Box& b : boxes_from_mask(threshold_mask(map, a.tau), conn)) {
      lines[i] += fmt::format("{} {} {} {} {}\n", map.image_id, b.x0, b.y0, b.x1, b.y1);
    }
  });
  std::string text;
  for (const auto& l : lines) text += l;
  emit(a.out, text, out);
}

struct BoxAccArgs {
  std::string input;
  std::string gt;
  std::string sizes;
  std::string csv;
  std::string report;
  std::string deltas = "0.3,0.5,0.7";
  int grid = 1000;
  NormOptions norm;
};

EvalReport box_report(const BoxAccArgs& a, const CommonOptions& common) {
  std::vector<NormalizedMap> maps = load_maps(a.input, a.norm, common.threads);
  if (maps.empty()) throw_invalid_data("input bundle is empty");
  const std::vector<ImageBoxes> truth = load_truth(a.gt, a.sizes, ids_of(maps));
  std::vector<BoxSample> samples(maps.size());
  for (size_t i = 0; i < maps.size(); ++i) samples[i] = {std::move(maps[i]), truth[i]};
  BoxEvalConfig config;
  config.grid = ThresholdGrid(a.grid);
  config.deltas = parse_deltas(a.deltas);
  config.connectivity = connectivity_from_int(common.connectivity);
  config.threads = common.threads;
  EvalReport report = max_box_acc_v2(samples, config);
  if (!a.norm.enabled()) {
    report.method = "precomputed";
    report.percentile.reset();
  }
  return report;
}

void run_boxacc(const BoxAccArgs& a, const CommonOptions& common, std::ostream& out) {
  const EvalReport report = box_report(a, common);
  const std::string text = format_report_text(report);
  out << text;
  if (!a.report.empty()) io::write_text(a.report, text);
  if (!a.csv.empty()) io::write_text(a.csv, format_report_csv(report));
}

struct PxapArgs {
  std::string input;
  std::string masks;
  std::string csv;
  int grid = 1000;
  bool exact = false;
  NormOptions norm;
};

void run_pxap(const PxapArgs& a, const CommonOptions& common, std::ostream& out) {
  std::vector<NormalizedMap> maps = load_maps(a.input, a.norm, common.threads);
  if (maps.empty()) throw_invalid_data("input bundle is empty");
  const std::vector<PixelMask> masks = load_masks_for(a.masks, ids_of(maps));
  std::vector<MaskSample> samples(maps.size());
  for (size_t i = 0; i < maps.size(); ++i) samples[i] = {std::move(maps[i]), masks[i]};
  PxapConfig config;
  config.mode = a.exact ? PxapMode::kExact : PxapMode::kGrid;
  config.grid = ThresholdGrid(a.grid);
  config.threads = common.threads;
  const PrCurve curve = pr_curve(samples, config);
  out << fmt::format("PxAP,{:.6f}\n", curve.average_precision());
  if (!a.csv.empty()) io::write_text(a.csv, format_pr_curve_csv(curve));
}

struct SweepArgs {
  std::string input;
  std::string gt;
  std::string sizes;
  std::string masks;
  std::string csv;
  std::string method = "ivr";
  std::string grid = "0:90:5";
  std::string metric = "boxaccv2";
  std::string deltas = "0.3,0.5,0.7";
  std::string tag;
  int thresholds = 1000;
  bool exact = false;
};

void run_sweep(const SweepArgs& a, const CommonOptions& common, std::ostream& out) {
  const NormMethod method = parse_norm_method(a.method);
  const SweepMetric metric = parse_sweep_metric(a.metric);
  const std::vector<double> grid = parse_percentile_grid(a.grid);
  SweepConfig config;
  config.box.grid = ThresholdGrid(a.thresholds);
  config.box.deltas = parse_deltas(a.deltas);
  config.box.connectivity = connectivity_from_int(common.connectivity);
  config.box.threads = common.threads;
  config.pxap.grid = ThresholdGrid(a.thresholds);
  config.pxap.mode = a.exact ? PxapMode::kExact : PxapMode::kGrid;
  config.pxap.threads = common.threads;
  config.tag = a.tag;

  RawDataset raw;
  raw.maps = io::load_score_maps(io::load_bundle(a.input));
  if (raw.maps.empty()) throw_invalid_data("input bundle is empty");
  if (metric == SweepMetric::kMaxBoxAccV2) {
    if (a.gt.empty()) throw_invalid_argument("metric boxaccv2 needs --gt");
    raw.boxes = load_truth(a.gt, a.sizes, ids_of(raw.maps));
  } else {
    if (a.masks.empty()) throw_invalid_argument("metric pxap needs --masks");
    raw.masks = load_masks_for(a.masks, ids_of(raw.maps));
  }
  const SweepResult result = sweep_percentile(raw, method, grid, metric, config);
  if (!a.csv.empty()) io::write_text(a.csv, format_sweep_csv(result));
  out << fmt::format("metric,{}\nbest_p,{:.6f}\nbest_score,{:.6f}\n", to_string(metric),
                     result.best_p, result.best_score);
}

struct StatsArgs {
  std::string input;
  std::string gt;
  std::string sizes;
  std::string csv;
  std::optional<double> tau;
  double delta = 0.7;
  double cutoff = kDefaultRatioCutoff;
  int grid = 1000;
  NormOptions norm{"minmax", std::nullopt};
};

void run_stats(const StatsArgs& a, const CommonOptions& common, std::ostream& out) {
  const std::vector<ScoreMap> maps = io::load_score_maps(io::load_bundle(a.input));
  if (maps.empty()) throw_invalid_data("input bundle is empty");
  const std::vector<ImageBoxes> truth = load_truth(a.gt, a.sizes, ids_of(maps));
  const NormMethod method = a.norm.resolved_method();
  const double p = a.norm.resolved_percentile();
  const Connectivity conn = connectivity_from_int(common.connectivity);

  double tau = 0.0;
  if (a.tau) {
    tau = *a.tau;
  } else {
    RawDataset raw{maps, truth, {}};
    BoxEvalConfig config;
    config.grid = ThresholdGrid(a.grid);
    config.deltas = {a.delta};
    config.connectivity = conn;
    config.threads = common.threads;
    tau = max_box_acc_v2(normalize_box_dataset(raw, method, p, common.threads), config)
              .curves.front()
              .best_tau;
  }
  const auto records = extrema_scatter(maps, truth, method, p, tau, a.delta, conn, common.threads);
  const RatioStat stat = std_ratio(records);
  if (!a.csv.empty()) io::write_text(a.csv, format_scatter_csv(records));
  {
    const auto hits = std::count_if(records.begin(), records.end(),
                                    [](const ExtremaRecord& r) { return r.hit; });
    out << fmt::format("tau,{:.6f}\ndelta,{:.2f}\nhits,{}\nimages,{}\n", tau, a.delta, hits,
                       records.size());
    out << fmt::format("std_max,{:.9g}\nstd_min,{:.9g}\n", stat.std_max, stat.std_min);
    out << (stat.infinite ? std::string("ratio,inf\n") : fmt::format("ratio,{:.6f}\n", stat.ratio));
    out << fmt::format("recommendation,{}\n", to_string(recommend_norm(stat, a.cutoff)));
  }
}

struct SynthArgs {
  SynthSpec spec;
  std::string out;
};

void add_synth_options(CLI::App* cmd, SynthSpec& spec) {
  cmd->add_option("--count", spec.count, "Number of images")->check(CLI::NonNegativeNumber);
  cmd->add_option("--q", spec.sinkhole_probability, "Sinkhole probability")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--seed", spec.seed, "Random seed");
  cmd->add_option("--width", spec.width, "Map width")->check(CLI::PositiveNumber);
  cmd->add_option("--height", spec.height, "Map height")->check(CLI::PositiveNumber);
  cmd->add_option("--noise", spec.noise_level, "Background amplitude as a fraction of the peak");
  cmd->add_option("--depth-min", spec.sinkhole_depth_min, "Deepest sinkhole centre value");
  cmd->add_option("--depth-max", spec.sinkhole_depth_max, "Shallowest sinkhole centre value");
  cmd->add_option("--radius", spec.sinkhole_radius, "Sinkhole radius in pixels");
}

void run_synth(const SynthArgs& a, const CommonOptions& common, std::ostream& out) {
  const std::vector<SynthImage> images = generate(a.spec, common.threads);
  const fs::path dir = a.out;
  std::vector<ScoreMap> maps;
  std::vector<PixelMask> masks;
  GroundTruthBoxes boxes;
  io::ImageSizes sizes;
  std::string sinkholes;
  for (const SynthImage& img : images) {
    maps.push_back(img.map);
    masks.push_back(img.mask);
    boxes[img.truth.image_id] = img.truth;
    sizes[img.truth.image_id] = {img.truth.width, img.truth.height};
    sinkholes += fmt::format("{}\t{}\n", img.map.image_id, img.has_sinkhole ? 1 : 0);
  }
  io::store_score_maps(dir, "maps.tsv", "maps", maps);
  io::store_masks(dir, "masks.tsv", "masks", masks);
  io::store_boxes(dir / "boxes.tsv", boxes);
  io::store_image_sizes(dir / "sizes.tsv", sizes);
  io::write_text(dir / "sinkholes.tsv", sinkholes);
  const auto with = std::count_if(images.begin(), images.end(),
                                  [](const SynthImage& i) { return i.has_sinkhole; });
  out << fmt::format("images,{}\nsinkhole_images,{}\n", images.size(), with);
}

struct HeatmapArgs {
  std::string input;
  std::string id;
  std::string out;
  NormOptions norm;
};

void run_heatmap(const HeatmapArgs& a, const CommonOptions& common) {
  const std::vector<NormalizedMap> maps = load_maps(a.input, a.norm, common.threads);
  if (!a.id.empty()) {
    const auto it = std::find_if(maps.begin(), maps.end(),
                                 [&](const NormalizedMap& m) { return m.image_id == a.id; });
    if (it == maps.end()) throw_invalid_data(fmt::format("no map with id '{}'", a.id));
    io::store_pgm(a.out, *it);
    return;
  }
  for (const NormalizedMap& m : maps) io::store_pgm(fs::path(a.out) / (m.image_id + ".pgm"), m);
}

struct ExperimentArgs {
  SynthSpec spec;
  std::string methods = "minmax,max,pas:90,ivr:10";
  std::string deltas = "0.3,0.5,0.7";
  std::string csv;
  int grid = 1000;
};

std::vector<MethodChoice> parse_methods(const std::string& text) {
  std::vector<MethodChoice> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto colon = item.find(':');
    MethodChoice c;
    c.method = parse_norm_method(item.substr(0, colon));
    if (colon != std::string::npos) {
      try {
        c.percentile = Percentile(std::stod(item.substr(colon + 1))).value();
      } catch (const std::invalid_argument&) {
        throw_invalid_argument(fmt::format("bad percentile in '{}'", item));
      }
    } else if (c.method == NormMethod::kPaS) {
      c.percentile = kDefaultPasPercentile;
    } else if (c.method == NormMethod::kIvr) {
      throw_invalid_argument("ivr needs a percentile, e.g. ivr:10");
    }
    out.push_back(c);
  }
  if (out.empty()) throw_invalid_argument("no methods given");
  return out;
}

void run_experiment(const ExperimentArgs& a, const CommonOptions& common, std::ostream& out) {
  const std::vector<MethodChoice> methods = parse_methods(a.methods);
  BoxEvalConfig config;
  config.grid = ThresholdGrid(a.grid);
  config.deltas = parse_deltas(a.deltas);
  config.connectivity = connectivity_from_int(common.connectivity);
  config.threads = common.threads;
  const SinkholeExperiment result = sinkhole_experiment(a.spec, methods, config);
  emit(a.csv, format_experiment_csv(result), out);
}

int fail(std::ostream& err, int code, std::string_view kind, const std::string& message) {
  std::string line = message;
  std::replace(line.begin(), line.end(), '\n', ' ');
  err << "error:" << kind << ":" << line << "\n";
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Score-map normalization and localization metrics for weakly supervised "
               "object localization"};
  app.name(args.empty() ? "wsol" : fs::path(args.front()).filename().string());
  app.require_subcommand(1);

  CommonOptions common;
  common.threads = default_thread_count();

  CamArgs cam;
  auto* cam_cmd = app.add_subcommand("cam", "Build class activation maps from feature tensors");
  cam_cmd->add_option("--features", cam.features, "Feature bundle index")->required();
  cam_cmd->add_option("--weights", cam.weights, "Classifier weights raster (1x1xK)")->required();
  cam_cmd->add_option("--class-id", cam.class_id, "Class label recorded with the weights");
  cam_cmd->add_flag("--nwc", cam.nwc, "Clamp negative weights to zero");
  cam_cmd->add_option("--out", cam.out, "Output directory")->required();
  add_threads(cam_cmd, common);

  NormalizeArgs norm;
  auto* norm_cmd = app.add_subcommand("normalize", "Normalize raw score maps into [0, 1]");
  norm_cmd->add_option("--input", norm.input, "Raw score-map bundle index")->required();
  norm_cmd->add_option("--out", norm.out, "Output directory")->required();
  add_norm_options(norm_cmd, norm.norm, true);
  add_threads(norm_cmd, common);

  BoxesArgs boxes;
  auto* boxes_cmd = app.add_subcommand("boxes", "Extract estimated boxes at one threshold");
  boxes_cmd->add_option("--input", boxes.input, "Score-map bundle index")->required();
  boxes_cmd->add_option("--tau", boxes.tau, "Threshold")->check(CLI::Range(0.0, 1.0));
  boxes_cmd->add_option("--sizes", boxes.sizes, "Image sizes; maps are resized to them");
  boxes_cmd->add_option("--out", boxes.out, "Output file (default stdout)");
  add_norm_options(boxes_cmd, boxes.norm, false);
  add_connectivity(boxes_cmd, common);
  add_threads(boxes_cmd, common);

  BoxAccArgs boxacc;
  auto* boxacc_cmd = app.add_subcommand("boxacc", "MaxBoxAccV2 over a threshold grid");
  boxacc_cmd->add_option("--input", boxacc.input, "Score-map bundle index")->required();
  boxacc_cmd->add_option("--gt", boxacc.gt, "Ground-truth boxes")->required();
  boxacc_cmd->add_option("--sizes", boxacc.sizes, "Image sizes (default: map sizes)");
  boxacc_cmd->add_option("--grid", boxacc.grid, "Number of thresholds")->check(CLI::Range(2, 1 << 24));
  boxacc_cmd->add_option("--deltas", boxacc.deltas, "Comma-separated IoU thresholds");
  boxacc_cmd->add_option("--csv", boxacc.csv, "Per-(delta, tau) CSV output");
  boxacc_cmd->add_option("--report", boxacc.report, "Also write the text report here");
  add_norm_options(boxacc_cmd, boxacc.norm, false);
  add_connectivity(boxacc_cmd, common);
  add_threads(boxacc_cmd, common);

  PxapArgs px;
  auto* px_cmd = app.add_subcommand("pxap", "Pixel-wise average precision against masks");
  px_cmd->add_option("--input", px.input, "Score-map bundle index")->required();
  px_cmd->add_option("--masks", px.masks, "Mask bundle index")->required();
  auto* px_grid = px_cmd->add_option("--grid", px.grid, "Number of thresholds")
                      ->check(CLI::Range(2, 1 << 24));
  px_cmd->add_flag("--exact", px.exact, "Use every distinct score as a threshold")
      ->excludes(px_grid);
  px_cmd->add_option("--csv", px.csv, "Precision-recall curve CSV output");
  add_norm_options(px_cmd, px.norm, false);
  add_threads(px_cmd, common);

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep-percentile", "Validation grid search of the percentile");
  sweep_cmd->add_option("--input", sweep.input, "Raw score-map bundle index")->required();
  sweep_cmd->add_option("--gt", sweep.gt, "Ground-truth boxes (boxaccv2)");
  sweep_cmd->add_option("--sizes", sweep.sizes, "Image sizes (default: map sizes)");
  sweep_cmd->add_option("--masks", sweep.masks, "Mask bundle index (pxap)");
  sweep_cmd->add_option("--method", sweep.method, "pas or ivr")->check(CLI::IsMember({"pas", "ivr"}));
  sweep_cmd->add_option("--grid", sweep.grid, "Percentiles: start:stop:step or a comma list");
  sweep_cmd->add_option("--metric", sweep.metric, "boxaccv2 or pxap")
      ->check(CLI::IsMember({"boxaccv2", "pxap"}));
  sweep_cmd->add_option("--thresholds", sweep.thresholds, "Number of score thresholds")
      ->check(CLI::Range(2, 1 << 24));
  sweep_cmd->add_option("--deltas", sweep.deltas, "Comma-separated IoU thresholds");
  sweep_cmd->add_flag("--exact", sweep.exact, "Exact-mode PxAP");
  sweep_cmd->add_option("--tag", sweep.tag, "Dataset tag");
  sweep_cmd->add_option("--csv", sweep.csv, "Curve CSV output");
  add_connectivity(sweep_cmd, common);
  add_threads(sweep_cmd, common);

  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Per-image extrema scatter and std ratio");
  stats_cmd->add_option("--input", stats.input, "Raw score-map bundle index")->required();
  stats_cmd->add_option("--gt", stats.gt, "Ground-truth boxes")->required();
  stats_cmd->add_option("--sizes", stats.sizes, "Image sizes (default: map sizes)");
  stats_cmd->add_option("--tau", stats.tau, "Operating threshold (default: tau* at --delta)")
      ->check(CLI::Range(0.0, 1.0));
  stats_cmd->add_option("--delta", stats.delta, "IoU threshold for the hit flag")
      ->check(CLI::Range(0.0, 1.0));
  stats_cmd->add_option("--grid", stats.grid, "Thresholds used to find tau*")
      ->check(CLI::Range(2, 1 << 24));
  stats_cmd->add_option("--cutoff", stats.cutoff, "Ratio at or above which max is recommended");
  stats_cmd->add_option("--csv", stats.csv, "Scatter CSV output");
  add_norm_options(stats_cmd, stats.norm, false);
  add_connectivity(stats_cmd, common);
  add_threads(stats_cmd, common);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic sinkhole dataset");
  add_synth_options(synth_cmd, synth.spec);
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  add_threads(synth_cmd, common);

  HeatmapArgs heat;
  auto* heat_cmd = app.add_subcommand("heatmap", "Export normalized maps as PGM images");
  heat_cmd->add_option("--input", heat.input, "Score-map bundle index")->required();
  heat_cmd->add_option("--id", heat.id, "Single image id (default: all, --out is a directory)");
  heat_cmd->add_option("--out", heat.out, "Output file or directory")->required();
  add_norm_options(heat_cmd, heat.norm, false);
  add_threads(heat_cmd, common);

  ExperimentArgs exp;
  auto* exp_cmd = app.add_subcommand("sinkhole-experiment",
                                     "Compare normalizers on a generated sinkhole dataset");
  add_synth_options(exp_cmd, exp.spec);
  exp_cmd->add_option("--methods", exp.methods, "Comma list like minmax,max,ivr:10");
  exp_cmd->add_option("--grid", exp.grid, "Number of thresholds")->check(CLI::Range(2, 1 << 24));
  exp_cmd->add_option("--deltas", exp.deltas, "Comma-separated IoU thresholds");
  exp_cmd->add_option("--csv", exp.csv, "CSV output (default stdout)");
  add_connectivity(exp_cmd, common);
  add_threads(exp_cmd, common);
  exp.spec.sinkhole_probability = 0.3;

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("wsol");

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ValidationError& e) {
    return fail(err, kExitConfig, "config", e.what());
  } catch (const CLI::ParseError& e) {
    return fail(err, kExitUsage, "usage", e.what());
  }

  try {
    if (*cam_cmd) run_cam(cam, common);
    else if (*norm_cmd) run_normalize(norm, common, out);
    else if (*boxes_cmd) run_boxes(boxes, common, out);
    else if (*boxacc_cmd) run_boxacc(boxacc, common, out);
    else if (*px_cmd) run_pxap(px, common, out);
    else if (*sweep_cmd) run_sweep(sweep, common, out);
    else if (*stats_cmd) run_stats(stats, common, out);
    else if (*synth_cmd) run_synth(synth, common, out);
    else if (*heat_cmd) run_heatmap(heat, common);
    else if (*exp_cmd) run_experiment(exp, common, out);
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::kInvalidArgument: return fail(err, kExitConfig, "config", e.what());
      case ErrorKind::kIo: return fail(err, kExitIo, "io", e.what());
      case ErrorKind::kInvalidData: return fail(err, kExitData, "data", e.what());
    }
  } catch (const std::exception& e) {
    return fail(err, kExitInternal, "internal", e.what());
  }
  return kExitOk;
}

}  // namespace wsol::cli
