#include "bustop/cli.hpp"

#include <glob.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bustop/error.hpp"
#include "bustop/eta.hpp"
#include "bustop/evaluation.hpp"
#include "bustop/report.hpp"
#include "bustop/synth.hpp"
#include "text_util.hpp"

namespace bustop {

namespace fs = std::filesystem;
using nlohmann::json;

std::string PipelineConfig::to_json() const {
  const auto& f = train.forest;
  json j = {{"chi", cluster.chi},
            {"rho", cluster.rho},
            {"max_gap_ms", cluster.max_gap_ms},
            {"mfcc",
             {{"frame_len", mfcc.frame_len},
              {"hop", mfcc.hop},
              {"fft_size", mfcc.fft_size},
              {"n_mel", mfcc.n_mel},
              {"n_ceps", mfcc.n_ceps},
              {"log_floor", mfcc.log_floor}}},
            {"forest",
             {{"n_trees", f.n_trees},
              {"max_depth", f.max_depth},
              {"features_per_split", f.features_per_split},
              {"min_leaf", f.min_leaf},
              {"threads", f.threads}}},
            {"selector_trees", train.selector_trees},
            {"k_max", train.k_max},
            {"smote_k", train.smote_k},
            {"seed", seed},
            {"speed_mps", speed_mps},
            {"zoom", zoom},
            {"box_m", box_m},
            {"box_n", box_n},
            {"utc_offset_min", utc_offset_min},
            {"tiles", tiles}};
  return j.dump(2);
}

void PipelineConfig::merge_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::MalformedRecord, "config: expected a JSON object");
  static const std::set<std::string> known = {"chi",        "rho",     "max_gap_ms", "mfcc",  "forest",
                                              "selector_trees", "k_max", "smote_k",   "seed",  "speed_mps",
                                              "zoom",       "box_m",   "box_n",      "utc_offset_min", "tiles"};
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw Error(ErrorCode::MalformedRecord, "config: unknown key '" + k + "'");
  }
  try {
    auto take = [](const json& o, const char* key, auto& dst) {
      if (o.contains(key)) dst = o.at(key).get<std::decay_t<decltype(dst)>>();
    };
    take(j, "chi", cluster.chi);
    take(j, "rho", cluster.rho);
    take(j, "max_gap_ms", cluster.max_gap_ms);
    if (j.contains("mfcc")) {
      const auto& m = j.at("mfcc");
      take(m, "frame_len", mfcc.frame_len);
      take(m, "hop", mfcc.hop);
      take(m, "fft_size", mfcc.fft_size);
      take(m, "n_mel", mfcc.n_mel);
      take(m, "n_ceps", mfcc.n_ceps);
      take(m, "log_floor", mfcc.log_floor);
    }
    if (j.contains("forest")) {
      const auto& f = j.at("forest");
      take(f, "n_trees", train.forest.n_trees);
      take(f, "max_depth", train.forest.max_depth);
      take(f, "features_per_split", train.forest.features_per_split);
      take(f, "min_leaf", train.forest.min_leaf);
      take(f, "threads", train.forest.threads);
    }
    take(j, "selector_trees", train.selector_trees);
    take(j, "k_max", train.k_max);
    take(j, "smote_k", train.smote_k);
    take(j, "seed", seed);
    take(j, "speed_mps", speed_mps);
    take(j, "zoom", zoom);
    take(j, "box_m", box_m);
    take(j, "box_n", box_n);
    take(j, "utc_offset_min", utc_offset_min);
    take(j, "tiles", tiles);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("config: ") + e.what());
  }
}

FeatureConfig PipelineConfig::feature_config() const {
  FeatureConfig fc;
  fc.mfcc = mfcc;
  fc.box_m = box_m;
  fc.box_n = box_n;
  return fc;
}

namespace {

struct Flags {
  std::string config_path;
  bool print_config = false;
  std::optional<std::uint64_t> seed;
  std::optional<double> chi, rho, speed;
  std::optional<int> trees, depth, selector_trees, k_max, threads, utc_offset, zoom;
  std::optional<std::string> tiles;

  // Per-command inputs.
  std::vector<std::string> trips, features, stays;
  std::string out, model, profile, trips_glob, daywise_out, cv = "5x10", types = "predicted", tile_dir;
  int stays_per_type = 100, n_trips = 10, confounded = 2;
  bool exact = false;
};

std::vector<StayLocation> stays_for_trip(const TripTrace& trace, const PipelineConfig& cfg) {
  return detect_stays(trace, cfg.cluster, cfg.utc_offset_min);
}

TileStore open_tiles(const PipelineConfig& cfg) {
  if (cfg.tiles.empty()) throw Error(ErrorCode::UsageError, "--tiles is required");
  return TileStore::open(cfg.tiles, cfg.zoom);
}

Dataset load_dataset(const std::vector<std::string>& paths) {
  Dataset d;
  for (const auto& p : paths) {
    auto rows = read_features(p);
    d.rows.insert(d.rows.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
  }
  // Unlabelled stays carry nothing to learn from.
  std::erase_if(d.rows, [](const FeatureRow& r) { return r.labels.empty(); });
  d.validate();
  return d;
}

CvConfig parse_cv(const std::string& text) {
  const auto x = text.find('x');
  CvConfig cv;
  if (x == std::string::npos || !detail::parse_number(std::string_view(text).substr(0, x), cv.folds) ||
      !detail::parse_number(std::string_view(text).substr(x + 1), cv.repeats) || cv.folds < 2 || cv.repeats < 1) {
    throw Error(ErrorCode::UsageError, "--cv expects <folds>x<repeats>, e.g. 5x10");
  }
  return cv;
}

std::vector<std::string> expand_glob(const std::string& pattern) {
  glob_t g{};
  std::vector<std::string> out;
  if (::glob(pattern.c_str(), 0, nullptr, &g) == 0) {
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  }
  ::globfree(&g);
  std::sort(out.begin(), out.end());
  return out;
}

int cmd_synth(const PipelineConfig& cfg, const Flags& f, std::ostream& out) {
  SynthConfig sc;
  sc.seed = cfg.seed;
  sc.stays_per_type.fill(f.stays_per_type);
  sc.n_trips = f.n_trips;
  sc.confounded_slots = f.confounded;
  sc.exact = f.exact;
  sc.utc_offset_min = cfg.utc_offset_min;
  const auto summary = write_bundle(sc, f.out);
  out << "trips=" << summary.trip_dirs.size() << " stays=" << summary.n_stays << " tiles=" << summary.n_tiles
      << " out=" << f.out << '\n';
  return 0;
}

int cmd_ingest_check(const PipelineConfig& cfg, const Flags& f, std::ostream& out, std::ostream& err) {
  std::size_t bad = 0;
  for (const auto& dir : f.trips) {
    const auto trace = parse_trip(dir);
    auto report = validate_trace(trace);
    if (report.ok()) {
      std::vector<std::size_t> unmatched;
      detect_stays(trace, cfg.cluster, cfg.utc_offset_min, &unmatched);
      report_unmatched_marks(report, trace.marks, unmatched);
    }
    out << trace.trip_id << ": gps=" << report.n_gps << " imu=" << report.n_imu << " audio=" << report.n_audio_samples
        << " wifi=" << report.n_wifi_scans << " marks=" << report.n_marks << " span=[" << report.span_start << ','
        << report.span_end << "] violations=" << report.violations.size() << '\n';
    for (const auto& v : report.violations) out << "  " << v.kind << ": " << v.detail << '\n';
    bad += report.violations.size();
  }
  if (bad > 0) {
    err << "error: InvalidTrace: " << bad << " violation(s)\n";
    return 1;
  }
  return 0;
}

int cmd_cluster(const PipelineConfig& cfg, const Flags& f, std::ostream& out) {
  const auto trace = parse_trip(f.trips.front());
  const auto stays = stays_for_trip(trace, cfg);
  write_stays(stays, f.out);
  out << "stays=" << stays.size() << " out=" << f.out << '\n';
  return 0;
}

int cmd_featurize(const PipelineConfig& cfg, const Flags& f, std::ostream& out, std::ostream& err) {
  const auto tiles = open_tiles(cfg);
  if (!f.stays.empty() && f.stays.size() != f.trips.size()) {
    throw Error(ErrorCode::UsageError, "--stays must be given once per --trip");
  }
  std::vector<FeatureRow> rows;
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < f.trips.size(); ++i) {
    const auto trace = parse_trip(f.trips[i]);
    const auto stays = f.stays.empty() ? stays_for_trip(trace, cfg) : read_stays(f.stays[i]);
    auto res = featurize_trip(trace, stays, tiles, cfg.feature_config());
    for (const auto& s : res.skipped) err << "skipped " << s << '\n';
    skipped += res.skipped.size();
    rows.insert(rows.end(), std::make_move_iterator(res.rows.begin()), std::make_move_iterator(res.rows.end()));
  }
  write_features(rows, f.out);
  out << "rows=" << rows.size() << " skipped=" << skipped << " out=" << f.out << '\n';
  return 0;
}

int cmd_tiles_check(const PipelineConfig& cfg, const Flags& f, std::ostream& out, std::ostream& err) {
  const auto tiles = TileStore::open(f.tile_dir, cfg.zoom);
  std::vector<LatLon> centers;
  for (const auto& p : f.stays) {
    for (const auto& s : read_stays(p)) centers.push_back(s.centroid);
  }
  const auto missing = missing_tiles(tiles, centers, cfg.box_m, cfg.box_n);
  for (const auto& k : missing) out << "missing " << k.zoom << '/' << k.x << '_' << k.y << ".ppm\n";
  out << "stays=" << centers.size() << " missing=" << missing.size() << '\n';
  if (!missing.empty()) {
    err << "error: MissingTile: " << missing.size() << " tile(s) absent\n";
    return 1;
  }
  return 0;
}

int cmd_train(const PipelineConfig& cfg, const Flags& f, std::ostream& out) {
  const auto data = load_dataset(f.features);
  const auto model = train_bustop(data, cfg.train, cfg.seed);
  write_model(model, f.out);
  for (const auto& m : model.models) out << to_string(m.type) << ": mask=" << format_mask(m.mask) << '\n';
  out << "out=" << f.out << '\n';
  return 0;
}

int cmd_eval(const PipelineConfig& cfg, const Flags& f, std::ostream& out) {
  const auto data = load_dataset(f.features);
  const auto report = cross_validate(data, parse_cv(f.cv), cfg.train, cfg.seed);
  const auto csv = cv_report_to_csv(report, "selected");
  detail::write_file(f.out, csv);
  out << csv;
  return 0;
}

int cmd_ablate(const PipelineConfig& cfg, const Flags& f, std::ostream& out) {
  const auto data = load_dataset(f.features);
  const auto rep = ablate_feature_groups(data, parse_cv(f.cv), cfg.train, cfg.seed);
  const auto csv = cv_report_to_csv(rep.spatial, "spatial") + cv_report_to_csv(rep.temporal, "temporal", false) +
                   cv_report_to_csv(rep.full, "full", false);
  detail::write_file(f.out, csv);
  out << csv;
  return 0;
}

int cmd_predict(const Flags& f, std::ostream& out) {
  const auto model = read_model(f.model);
  std::ostringstream csv;
  csv << "stay_id,predicted,truth\n";
  std::size_t n = 0;
  for (const auto& p : f.features) {
    for (const auto& r : read_features(p)) {
      csv << r.stay_id << ',' << format_type_set(predict_stay_types(model, r.features)) << ','
          << format_type_set(r.labels) << '\n';
      ++n;
    }
  }
  detail::write_file(f.out, csv.str());
  out << "rows=" << n << " out=" << f.out << '\n';
  return 0;
}

int cmd_profile(const Flags& f, std::ostream& out) {
  std::vector<ProfileSample> samples;
  for (const auto& p : f.stays) {
    const auto s = profile_samples(read_stays(p));
    samples.insert(samples.end(), s.begin(), s.end());
  }
  write_profile(fit_stay_profile(samples), f.out);
  out << "stays=" << samples.size() << " out=" << f.out << '\n';
  return 0;
}

EtaOptions eta_options(const PipelineConfig& cfg, const Flags& f) {
  EtaOptions opt;
  opt.speed_mps = cfg.speed_mps;
  opt.utc_offset_min = cfg.utc_offset_min;
  if (f.types == "truth") opt.types = TypeSource::Truth;
  else if (f.types == "predicted") opt.types = TypeSource::Predicted;
  else throw Error(ErrorCode::UsageError, "--types must be 'predicted' or 'truth'");
  return opt;
}

int cmd_eta(const PipelineConfig& cfg, const Flags& f, std::ostream& out, std::ostream& err) {
  const auto opt = eta_options(cfg, f);
  const auto profile = read_profile(f.profile);
  const auto trace = parse_trip(f.trips.front());
  const auto stays = stays_for_trip(trace, cfg);
  std::vector<TypeSet> predicted(stays.size());
  if (opt.types == TypeSource::Predicted) {
    const auto model = read_model(f.model);
    const auto tiles = open_tiles(cfg);
    const TripContext ctx(trace);
    const FeatureBuilder builder(tiles, cfg.feature_config());
    for (std::size_t i = 0; i < stays.size(); ++i) {
      try {
        predicted[i] = predict_stay_types(model, builder.build(ctx, i ? &stays[i - 1] : nullptr, stays[i]));
      } catch (const Error& e) {
        err << "unclassified " << stays[i].stay_id << ": " << e.what() << '\n';
      }
    }
  }
  if (stays.empty()) throw Error(ErrorCode::InvalidArgument, "trip has no stays");
  const auto chain = build_chain(trace.trip_id, stays, predicted);
  detail::write_file(f.out, chain_to_csv(chain, profile, opt));
  out << "stops=" << chain.stops.size() << " out=" << f.out << '\n';
  return 0;
}

int cmd_eta_table(const PipelineConfig& cfg, const Flags& f, std::ostream& out) {
  const auto opt = eta_options(cfg, f);
  const auto profile = read_profile(f.profile);
  std::vector<RouteChain> chains;
  const auto files = expand_glob(f.trips_glob);
  if (files.empty()) throw Error(ErrorCode::MissingFile, "no files match " + f.trips_glob);
  for (const auto& p : files) {
    auto c = chains_from_csv(detail::read_file(p));
    chains.insert(chains.end(), std::make_move_iterator(c.begin()), std::make_move_iterator(c.end()));
  }
  assign_canonical(chains, cfg.cluster.rho);
  const auto table = eta_error_table(chains, profile, opt);
  detail::write_file(f.out, eta_table_to_csv(table));
  if (!f.daywise_out.empty()) detail::write_file(f.daywise_out, daywise_to_csv(daywise_error(chains, profile, opt)));
  out << "trips=" << chains.size() << " bus_stops=" << table.canonical.size() << " out=" << f.out << '\n';
  return 0;
}

int cmd_report(const PipelineConfig& cfg, const Flags& f, std::ostream& out, std::ostream& err) {
  std::vector<FeatureRow> rows;
  for (const auto& p : f.features) {
    auto r = read_features(p);
    rows.insert(rows.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
  }
  std::map<std::string, double> snr;
  for (const auto& dir : f.trips) {
    const auto trace = parse_trip(dir);
    for (const auto& s : stays_for_trip(trace, cfg)) {
      try {
        snr[s.stay_id] = snr_db(trace, s, cfg.mfcc);
      } catch (const Error& e) {
        err << "no SNR for " << s.stay_id << ": " << e.what() << '\n';
      }
    }
  }
  const auto rep = pilot_report(pilot_records(rows, snr));
  for (const auto& n : rep.notes) err << "note: " << n << '\n';
  detail::write_file(f.out, pilot_report_to_csv(rep));
  out << "rows=" << rep.rows.size() << " out=" << f.out << '\n';
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bus stay-location detection, characterisation and arrival-time estimation.", "bustop"};
  app.fallthrough();
  app.require_subcommand(0, 1);
  Flags f;

  app.add_option("--config", f.config_path, "JSON file overriding defaults");
  app.add_flag("--print-config", f.print_config, "Print the resolved configuration");
  app.add_option("--seed", f.seed, "Random seed (default 7, or BUSTOP_SEED)");
  app.add_option("--chi", f.chi, "Zero-speed threshold, m/s");
  app.add_option("--rho", f.rho, "Cluster radius, m");
  app.add_option("--trees", f.trees, "Trees per forest");
  app.add_option("--depth", f.depth, "Maximum tree depth");
  app.add_option("--selector-trees", f.selector_trees, "Trees in the importance ensemble");
  app.add_option("--k-max", f.k_max, "Largest selected feature count");
  app.add_option("--threads", f.threads, "Worker threads for forest training");
  app.add_option("--utc-offset", f.utc_offset, "Local time offset from UTC, minutes");
  app.add_option("--speed", f.speed, "Bus speed for arrival estimates, m/s");
  app.add_option("--zoom", f.zoom, "Map tile zoom level");
  app.add_option("--tiles", f.tiles, "Map tile directory");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic trip bundle");
  synth->add_option("--stays-per-type", f.stays_per_type, "Stays of each type")->check(CLI::NonNegativeNumber);
  synth->add_option("--trips", f.n_trips, "Trip count")->check(CLI::PositiveNumber);
  synth->add_option("--confounded", f.confounded, "Bus-stop-at-signal slots")->check(CLI::NonNegativeNumber);
  synth->add_flag("--exact", f.exact, "Durations at their means, speed exactly 17 m/s");
  synth->add_option("--out", f.out, "Output directory")->required();

  auto* ingest = app.add_subcommand("ingest-check", "Validate trip directories");
  ingest->add_option("--trip", f.trips, "Trip directory")->required();

  auto* cluster = app.add_subcommand("cluster", "Detect stay-locations in a trip");
  cluster->add_option("--trip", f.trips, "Trip directory")->required()->expected(1);
  cluster->add_option("--out", f.out, "stays.json")->required();

  auto* featurize = app.add_subcommand("featurize", "Compute f1..f13 for every stay");
  featurize->add_option("--trip", f.trips, "Trip directory")->required();
  featurize->add_option("--stays", f.stays, "stays.json per trip (default: detect)");
  featurize->add_option("--out", f.out, "features.csv")->required();

  auto* tiles_check = app.add_subcommand("tiles-check", "Check tile coverage around stays");
  tiles_check->add_option("tiledir", f.tile_dir, "Tile directory")->required();
  tiles_check->add_option("--stays", f.stays, "stays.json")->required();

  auto* train = app.add_subcommand("train", "Train the five one-vs-all forests");
  train->add_option("--features", f.features, "features.csv")->required();
  train->add_option("--out", f.out, "model.json")->required();

  auto* eval = app.add_subcommand("eval", "Stratified cross-validation");
  eval->add_option("--features", f.features, "features.csv")->required();
  eval->add_option("--cv", f.cv, "<folds>x<repeats>");
  eval->add_option("--out", f.out, "CSV report")->required();

  auto* ablate = app.add_subcommand("ablate", "Spatial / temporal / full feature-group comparison");
  ablate->add_option("--features", f.features, "features.csv")->required();
  ablate->add_option("--cv", f.cv, "<folds>x<repeats>");
  ablate->add_option("--out", f.out, "CSV report")->required();

  auto* predict = app.add_subcommand("predict", "Predict stay types for featurized stays");
  predict->add_option("--model", f.model, "model.json")->required();
  predict->add_option("--features", f.features, "features.csv")->required();
  predict->add_option("--out", f.out, "predictions.csv")->required();

  auto* profile = app.add_subcommand("profile", "Fit mean stay durations per type and band");
  profile->add_option("--stays", f.stays, "Labelled stays.json")->required();
  profile->add_option("--out", f.out, "profile.json")->required();

  auto* eta = app.add_subcommand("eta", "Arrival-time estimates along one trip");
  eta->add_option("--model", f.model, "model.json");
  eta->add_option("--profile", f.profile, "profile.json")->required();
  eta->add_option("--trip", f.trips, "Trip directory")->required()->expected(1);
  eta->add_option("--types", f.types, "predicted|truth");
  eta->add_option("--out", f.out, "eta.csv")->required();

  auto* eta_table = app.add_subcommand("eta-table", "Pairwise bus-stop arrival error table");
  eta_table->add_option("--trips", f.trips_glob, "Glob of eta.csv files")->required();
  eta_table->add_option("--profile", f.profile, "profile.json")->required();
  eta_table->add_option("--types", f.types, "predicted|truth");
  eta_table->add_option("--daywise", f.daywise_out, "Per-day / per-band error quartiles CSV");
  eta_table->add_option("--out", f.out, "table.csv")->required();

  auto* report = app.add_subcommand("report", "Per-type stay statistics");
  report->add_option("--features", f.features, "features.csv")->required();
  report->add_option("--trip", f.trips, "Trip directories for SNR");
  report->add_option("--out", f.out, "CSV report")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return 2;
  }

  try {
    PipelineConfig cfg;
    if (const char* env = std::getenv("BUSTOP_SEED")) {
      if (!detail::parse_number(std::string_view(env), cfg.seed)) {
        throw Error(ErrorCode::UsageError, "BUSTOP_SEED must be an unsigned integer");
      }
    }
    if (!f.config_path.empty()) cfg.merge_json(detail::read_file(f.config_path));
    if (f.seed) cfg.seed = *f.seed;
    if (f.chi) cfg.cluster.chi = *f.chi;
    if (f.rho) cfg.cluster.rho = *f.rho;
    if (f.trees) cfg.train.forest.n_trees = *f.trees;
    if (f.depth) cfg.train.forest.max_depth = *f.depth;
    if (f.selector_trees) cfg.train.selector_trees = *f.selector_trees;
    if (f.k_max) cfg.train.k_max = *f.k_max;
    if (f.threads) cfg.train.forest.threads = *f.threads;
    if (f.utc_offset) cfg.utc_offset_min = *f.utc_offset;
    if (f.speed) cfg.speed_mps = *f.speed;
    if (f.zoom) cfg.zoom = *f.zoom;
    if (f.tiles) cfg.tiles = *f.tiles;
    cfg.cluster.validate();
    cfg.mfcc.validate();
    cfg.train.forest.validate();

    if (f.print_config) out << cfg.to_json() << '\n';
    if (app.get_subcommands().empty()) {
      if (f.print_config) return 0;
      err << "usage error: a subcommand is required\n" << app.help();
      return 2;
    }
    if (synth->parsed()) return cmd_synth(cfg, f, out);
    if (ingest->parsed()) return cmd_ingest_check(cfg, f, out, err);
    if (cluster->parsed()) return cmd_cluster(cfg, f, out);
    if (featurize->parsed()) return cmd_featurize(cfg, f, out, err);
    if (tiles_check->parsed()) return cmd_tiles_check(cfg, f, out, err);
    if (train->parsed()) return cmd_train(cfg, f, out);
    if (eval->parsed()) return cmd_eval(cfg, f, out);
    if (ablate->parsed()) return cmd_ablate(cfg, f, out);
    if (predict->parsed()) return cmd_predict(f, out);
    if (profile->parsed()) return cmd_profile(f, out);
    if (eta->parsed()) {
      if (f.types != "truth" && f.model.empty()) throw Error(ErrorCode::UsageError, "--model is required");
      return cmd_eta(cfg, f, out, err);
    }
    if (eta_table->parsed()) return cmd_eta_table(cfg, f, out);
    if (report->parsed()) return cmd_report(cfg, f, out, err);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UsageError) {
      err << "usage error: " << e.what() << '\n';
      return 2;
    }
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: MissingFile: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace bustop
