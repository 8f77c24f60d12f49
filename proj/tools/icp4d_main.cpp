#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "icp4d/geometry.hpp"
#include "icp4d/hash.hpp"
#include "icp4d/io.hpp"
#include "icp4d/metrics.hpp"
#include "icp4d/registration.hpp"
#include "icp4d/rng.hpp"
#include "icp4d/synthetic.hpp"
#include "icp4d/tracker.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace icp4d;

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream iss(s);
  for (std::string item; std::getline(iss, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw FormatError("cannot parse " + what + " value '" + s + "'");
  }
}

long parse_long(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw FormatError("cannot parse " + what + " value '" + s + "'");
  }
}

uint64_t parse_u64(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const uint64_t v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw FormatError("cannot parse " + what + " value '" + s + "'");
  }
}

bool parse_bool(const std::string& s, const std::string& what) {
  if (s == "true" || s == "1" || s == "on") return true;
  if (s == "false" || s == "0" || s == "off") return false;
  throw FormatError("cannot parse " + what + " value '" + s + "'");
}

// ---------------------------------------------------------------------------
// Run configuration: defaults, flat config file, flag overrides.

struct RunSettings {
  TrackerConfig tracker;
  uint64_t seed = 0;
  std::string report = "text";
};

void apply_setting(RunSettings& rs, const std::string& key, const std::string& value) {
  TrackerConfig& t = rs.tracker;
  if (key == "tau_center") {
    t.static_gate.tau_center = parse_double(value, key);
  } else if (key == "tau_cov") {
    t.static_gate.tau_cov = parse_double(value, key);
  } else if (key == "tau_dist") {
    t.icp.tau_dist = parse_double(value, key);
  } else if (key == "tau_iou") {
    t.icp.tau_iou = parse_double(value, key);
  } else if (key == "epsilon") {
    t.icp.epsilon = parse_double(value, key);
  } else if (key == "max_iterations") {
    t.icp.max_iterations = static_cast<int>(parse_long(value, key));
  } else if (key == "histogram_init") {
    t.icp.use_histogram_init = parse_bool(value, key);
  } else if (key == "convergence_delta") {
    t.icp.convergence_delta = parse_double(value, key);
  } else if (key == "subsample_limit") {
    t.icp.subsample_limit = static_cast<std::size_t>(parse_u64(value, key));
  } else if (key == "gamma_t") {
    t.assignment.gamma_t = parse_double(value, key);
  } else if (key == "gamma_r") {
    t.assignment.gamma_r = parse_double(value, key);
  } else if (key == "gamma_s") {
    t.assignment.gamma_s = parse_double(value, key);
  } else if (key == "matching") {
    if (value == "greedy")
      t.assigner = AssignerMode::kGreedy;
    else if (value == "hungarian")
      t.assigner = AssignerMode::kHungarian;
    else
      throw FormatError("matching must be greedy or hungarian, got '" + value + "'");
  } else if (key == "correspondence") {
    if (value == "sinkhorn")
      t.icp.correspondence_mode = CorrespondenceMode::kSinkhorn;
    else if (value == "nn")
      t.icp.correspondence_mode = CorrespondenceMode::kNearestNeighbor;
    else
      throw FormatError("correspondence must be sinkhorn or nn, got '" + value + "'");
  } else if (key == "static_stage") {
    t.enable_static_stage = parse_bool(value, key);
  } else if (key == "w_mem") {
    t.w_mem = static_cast<int>(parse_long(value, key));
  } else if (key == "dbscan") {
    if (value.empty()) {
      t.dbscan.reset();
    } else {
      const std::vector<std::string> parts = split_csv(value);
      if (parts.size() != 2) throw FormatError("dbscan expects 'eps,min_points'");
      t.dbscan = DbscanConfig{parse_double(parts[0], "dbscan eps"),
                              static_cast<int>(parse_long(parts[1], "dbscan min_points"))};
    }
  } else if (key == "thing_classes") {
    t.thing_classes.clear();
    for (const std::string& c : split_csv(value))
      t.thing_classes.insert(static_cast<uint32_t>(parse_u64(c, key)));
  } else if (key == "threads") {
    t.threads = static_cast<unsigned>(parse_u64(value, key));
  } else if (key == "seed") {
    rs.seed = parse_u64(value, key);
  } else if (key == "report") {
    if (value != "text" && value != "structured")
      throw FormatError("report must be text or structured, got '" + value + "'");
    rs.report = value;
  } else {
    throw FormatError("unknown configuration key '" + key + "'");
  }
}

// Every key apply_setting understands, with the current value; feeding the
// result back through apply_setting reproduces the settings.
std::map<std::string, std::string> serialize_settings(const RunSettings& rs) {
  const TrackerConfig& t = rs.tracker;
  std::map<std::string, std::string> kv;
  kv["tau_center"] = fmt_double(t.static_gate.tau_center);
  kv["tau_cov"] = fmt_double(t.static_gate.tau_cov);
  kv["tau_dist"] = fmt_double(t.icp.tau_dist);
  kv["tau_iou"] = fmt_double(t.icp.tau_iou);
  kv["epsilon"] = fmt_double(t.icp.epsilon);
  kv["max_iterations"] = std::to_string(t.icp.max_iterations);
  kv["histogram_init"] = t.icp.use_histogram_init ? "true" : "false";
  kv["convergence_delta"] = fmt_double(t.icp.convergence_delta);
  kv["subsample_limit"] = std::to_string(t.icp.subsample_limit);
  kv["gamma_t"] = fmt_double(t.assignment.gamma_t);
  kv["gamma_r"] = fmt_double(t.assignment.gamma_r);
  kv["gamma_s"] = fmt_double(t.assignment.gamma_s);
  kv["matching"] = t.assigner == AssignerMode::kGreedy ? "greedy" : "hungarian";
  kv["correspondence"] =
      t.icp.correspondence_mode == CorrespondenceMode::kSinkhorn ? "sinkhorn" : "nn";
  kv["static_stage"] = t.enable_static_stage ? "true" : "false";
  kv["w_mem"] = std::to_string(t.w_mem);
  kv["dbscan"] = t.dbscan ? fmt_double(t.dbscan->eps) + "," + std::to_string(t.dbscan->min_points)
                          : "";
  std::vector<uint32_t> classes(t.thing_classes.begin(), t.thing_classes.end());
  std::sort(classes.begin(), classes.end());
  std::string joined;
  for (uint32_t c : classes) joined += (joined.empty() ? "" : ",") + std::to_string(c);
  kv["thing_classes"] = joined;
  kv["threads"] = std::to_string(t.threads);
  kv["seed"] = std::to_string(rs.seed);
  kv["report"] = rs.report;
  return kv;
}

std::map<std::string, std::string> read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::map<std::string, std::string> kv;
  for (std::string line; std::getline(in, line);) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError(path.string() + ": expected 'key = value', got '" + line + "'");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

void write_config_echo(const fs::path& path, const RunSettings& rs) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "# effective configuration; feed back via --config to reproduce\n";
  for (const auto& [k, v] : serialize_settings(rs)) out << k << " = " << v << "\n";
  if (!out) throw IoError("write failed on " + path.string());
}

struct Options {
  std::string input, output, config_path, gt, pred;
  std::string format = "generic";
  std::string matching = "greedy";
  std::string correspondence = "sinkhorn";
  std::string dbscan_spec;
  std::string report = "text";
  bool no_static = false;
  bool no_bank = false;
  uint64_t seed = 0;
  unsigned threads = 0;
  int frames = 12;
  int bodies = 4;
  double noise = 0.02;
  double dropout = 0.05;
  std::string sizes_csv = "128,256,512,1024";
  std::string modes_csv = "sinkhorn,nn";
  int repeats = 3;
};

// Defaults, then the config file, then whichever flags were actually passed.
RunSettings settings_from(const Options& o, const CLI::App& sub) {
  RunSettings rs;
  if (!o.config_path.empty())
    for (const auto& [k, v] : read_config_file(o.config_path)) apply_setting(rs, k, v);
  const auto was_set = [&sub](const std::string& name) {
    const CLI::Option* opt = sub.get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (was_set("--matching")) apply_setting(rs, "matching", o.matching);
  if (was_set("--correspondence")) apply_setting(rs, "correspondence", o.correspondence);
  if (was_set("--dbscan")) apply_setting(rs, "dbscan", o.dbscan_spec);
  if (was_set("--seed")) rs.seed = o.seed;
  if (was_set("--threads")) rs.tracker.threads = o.threads;
  if (was_set("--report")) apply_setting(rs, "report", o.report);
  if (o.no_static) rs.tracker.enable_static_stage = false;
  if (o.no_bank) rs.tracker.w_mem = 0;
  return rs;
}

// ---------------------------------------------------------------------------
// Input discovery.

std::vector<fs::path> list_files(const fs::path& dir, const std::string& ext) {
  if (!fs::is_directory(dir)) throw IoError("no such directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ext)
      out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

struct LoadedSequence {
  std::vector<Scan> scans;
  std::vector<std::string> names;  // per-frame output stem
  json input_hashes = json::object();
};

LoadedSequence load_input(const Options& o) {
  LoadedSequence seq;
  const fs::path in(o.input);
  if (o.format == "kitti") {
    const fs::path poses_path = in / "poses.txt";
    const fs::path calib_path = in / "calib.txt";
    const std::vector<Pose> poses = load_poses(poses_path, calib_path);
    const std::vector<fs::path> bins = list_files(in / "velodyne", ".bin");
    const std::vector<fs::path> labels = list_files(in / "labels", ".label");
    if (bins.size() != labels.size())
      throw FormatError(in.string() + ": " + std::to_string(bins.size()) + " bin files vs " +
                        std::to_string(labels.size()) + " label files");
    if (poses.size() != bins.size())
      throw FormatError(poses_path.string() + ": " + std::to_string(poses.size()) +
                        " poses for " + std::to_string(bins.size()) + " scans");
    for (std::size_t i = 0; i < bins.size(); ++i) {
      Scan scan = load_kitti_scan(bins[i], labels[i], poses[i]);
      scan.frame_index = static_cast<int>(i);
      seq.scans.push_back(std::move(scan));
      seq.names.push_back(bins[i].stem().string());
      seq.input_hashes["velodyne/" + bins[i].filename().string()] =
          fnv1a_file_hex(bins[i].string());
      seq.input_hashes["labels/" + labels[i].filename().string()] =
          fnv1a_file_hex(labels[i].string());
    }
    seq.input_hashes["poses.txt"] = fnv1a_file_hex(poses_path.string());
    seq.input_hashes["calib.txt"] = fnv1a_file_hex(calib_path.string());
  } else if (o.format == "generic" || o.format == "synth") {
    const fs::path dir = fs::is_directory(in / "scans") ? in / "scans" : in;
    const std::vector<fs::path> files = list_files(dir, ".i4ds");
    if (files.empty()) throw FormatError("no .i4ds scans in " + dir.string());
    for (std::size_t i = 0; i < files.size(); ++i) {
      Scan scan = load_generic_scan(files[i]);
      scan.frame_index = static_cast<int>(i);
      seq.scans.push_back(std::move(scan));
      seq.names.push_back(files[i].stem().string());
      seq.input_hashes[files[i].filename().string()] = fnv1a_file_hex(files[i].string());
    }
  } else {
    throw FormatError("unknown format '" + o.format + "'");
  }
  return seq;
}

void write_manifest(const fs::path& path, const json& manifest) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << manifest.dump(2) << "\n";
  if (!out) throw IoError("write failed on " + path.string());
}

std::string frame_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06d", i);
  return buf;
}

// ---------------------------------------------------------------------------
// Subcommands.

int cmd_associate(const Options& o, const RunSettings& rs) {
  const auto t_start = std::chrono::steady_clock::now();
  LoadedSequence seq = load_input(o);
  fs::create_directories(fs::path(o.output) / "labels");

  Tracker tracker(rs.tracker);
  json outputs = json::object();
  for (std::size_t i = 0; i < seq.scans.size(); ++i) {
    const std::vector<uint32_t> ids = tracker.step(seq.scans[i]);
    const std::string name = "labels/" + seq.names[i] + ".label";
    const fs::path out_path = fs::path(o.output) / name;
    write_labels(seq.scans[i], ids, out_path);
    outputs[name] = fnv1a_file_hex(out_path.string());
  }
  const double total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  const StageStats& st = tracker.stats();
  json manifest;
  manifest["command"] = "associate";
  manifest["format"] = o.format;
  manifest["config"] = serialize_settings(rs);
  manifest["inputs"] = seq.input_hashes;
  manifest["outputs"] = outputs;
  manifest["counts"] = {{"frames", seq.scans.size()},
                        {"static_matches", st.static_matches},
                        {"dynamic_matches", st.dynamic_matches},
                        {"bank_matches", st.bank_matches},
                        {"fresh_tracks", st.fresh_tracks}};
  manifest["timings"] = {{"refine_seconds", st.refine_seconds},
                         {"static_seconds", st.static_seconds},
                         {"dynamic_seconds", st.dynamic_seconds},
                         {"bank_seconds", st.bank_seconds},
                         {"total_seconds", total}};
  write_manifest(fs::path(o.output) / "manifest.json", manifest);
  write_config_echo(fs::path(o.output) / "effective.config", rs);

  std::cout << "frames=" << seq.scans.size() << "\n"
            << "static_matches=" << st.static_matches << "\n"
            << "dynamic_matches=" << st.dynamic_matches << "\n"
            << "bank_matches=" << st.bank_matches << "\n"
            << "fresh_tracks=" << st.fresh_tracks << "\n";
  return 0;
}

int cmd_evaluate(const Options& o, const RunSettings& rs) {
  const auto t_start = std::chrono::steady_clock::now();
  const std::vector<fs::path> gt_files = list_files(o.gt, ".label");
  const std::vector<fs::path> pred_files = list_files(o.pred, ".label");
  if (gt_files.size() != pred_files.size())
    throw FormatError("frame count mismatch: " + std::to_string(gt_files.size()) +
                      " ground-truth vs " + std::to_string(pred_files.size()) +
                      " prediction label files");

  json inputs = json::object();
  std::vector<EvalFrame> frames;
  for (std::size_t i = 0; i < gt_files.size(); ++i) {
    auto [gt_sem, gt_inst] = load_labels(gt_files[i]);
    auto [pred_sem, pred_inst] = load_labels(pred_files[i]);
    if (gt_sem.size() != pred_sem.size())
      throw FormatError("frame " + std::to_string(i) + ": " + std::to_string(gt_sem.size()) +
                        " ground-truth points vs " + std::to_string(pred_sem.size()) +
                        " predicted");
    EvalFrame f;
    f.gt_semantic = std::move(gt_sem);
    f.gt_instance = std::move(gt_inst);
    f.pred_semantic = std::move(pred_sem);
    f.pred_instance = std::move(pred_inst);
    frames.push_back(std::move(f));
    inputs["gt/" + gt_files[i].filename().string()] = fnv1a_file_hex(gt_files[i].string());
    inputs["pred/" + pred_files[i].filename().string()] =
        fnv1a_file_hex(pred_files[i].string());
  }

  const MetricReport rep = evaluate(frames);
  json class_iou = json::object();
  for (const auto& [c, iou] : rep.class_iou) class_iou[std::to_string(c)] = iou;
  const json metrics = {{"lstq", rep.lstq},       {"s_assoc", rep.s_assoc},
                        {"s_cls", rep.s_cls},     {"class_iou", class_iou},
                        {"motsa", rep.motsa},     {"smotsa", rep.smotsa},
                        {"ptq", rep.ptq},         {"sptq", rep.sptq},
                        {"id_switches", rep.id_switches},
                        {"tp", rep.tp},           {"fp", rep.fp},
                        {"fn", rep.fn},           {"frames", frames.size()}};

  if (rs.report == "structured") {
    std::cout << metrics.dump(2) << "\n";
  } else {
    std::cout << "lstq=" << fmt_double(rep.lstq) << "\n"
              << "s_assoc=" << fmt_double(rep.s_assoc) << "\n"
              << "s_cls=" << fmt_double(rep.s_cls) << "\n"
              << "motsa=" << fmt_double(rep.motsa) << "\n"
              << "smotsa=" << fmt_double(rep.smotsa) << "\n"
              << "ptq=" << fmt_double(rep.ptq) << "\n"
              << "sptq=" << fmt_double(rep.sptq) << "\n"
              << "id_switches=" << rep.id_switches << "\n"
              << "tp=" << rep.tp << "\n"
              << "fp=" << rep.fp << "\n"
              << "fn=" << rep.fn << "\n";
    for (const auto& [c, iou] : rep.class_iou)
      std::cout << "class_iou." << c << "=" << fmt_double(iou) << "\n";
  }

  fs::create_directories(o.output);
  write_manifest(fs::path(o.output) / "report.json", metrics);
  const double total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  json manifest;
  manifest["command"] = "evaluate";
  manifest["config"] = serialize_settings(rs);
  manifest["inputs"] = inputs;
  manifest["metrics"] = metrics;
  manifest["timings"] = {{"total_seconds", total}};
  write_manifest(fs::path(o.output) / "manifest.json", manifest);
  return 0;
}

int cmd_synth(const Options& o, const RunSettings& rs) {
  const auto t_start = std::chrono::steady_clock::now();
  if (o.frames < 1) throw FormatError("synth needs at least one frame");
  if (o.bodies < 1) throw FormatError("synth needs at least one body");

  Rng rng(rs.seed);
  const auto cloud = [&rng](std::size_t n, double extent) {
    std::vector<Point3> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      pts.push_back({rng.uniform(-extent, extent), rng.uniform(-extent, extent),
                     rng.uniform(-extent, extent)});
    return pts;
  };

  SyntheticScene scene;
  scene.noise_sigma = o.noise;
  scene.dropout = o.dropout;
  for (int b = 1; b <= o.bodies; ++b) {
    RigidBody body;
    body.body_id = static_cast<uint32_t>(b);
    body.class_id = 1 + static_cast<uint32_t>((b - 1) % 3);
    body.template_points = cloud(60 + rng.below(60), 0.8);
    const Vec3 start{rng.uniform(-15.0, 15.0), rng.uniform(-15.0, 15.0), rng.uniform(0.0, 2.0)};
    const Vec3 velocity{rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2), 0.0};
    const double yaw_rate = rng.uniform(-0.05, 0.05);
    for (int f = 0; f < o.frames; ++f) {
      RigidTransform pose;
      pose.rotation = rot_z(yaw_rate * f);
      pose.translation = start + velocity * static_cast<double>(f);
      body.trajectory.push_back(pose);
    }
    scene.bodies.push_back(std::move(body));
  }
  BackgroundSegment bg;
  bg.class_id = 10;
  bg.points = cloud(200, 25.0);
  scene.background.push_back(bg);

  const SyntheticSequence seq = generate_synthetic(scene, rs.seed);
  fs::create_directories(fs::path(o.output) / "scans");
  fs::create_directories(fs::path(o.output) / "gt");
  json outputs = json::object();
  for (std::size_t f = 0; f < seq.scans.size(); ++f) {
    const std::string stem = frame_name(static_cast<int>(f));
    const fs::path scan_path = fs::path(o.output) / "scans" / (stem + ".i4ds");
    const fs::path gt_path = fs::path(o.output) / "gt" / (stem + ".label");
    write_generic_scan(seq.scans[f], scan_path);
    write_labels(seq.scans[f], seq.gt_ids[f], gt_path);
    outputs["scans/" + stem + ".i4ds"] = fnv1a_file_hex(scan_path.string());
    outputs["gt/" + stem + ".label"] = fnv1a_file_hex(gt_path.string());
  }
  const double total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  json manifest;
  manifest["command"] = "synth";
  manifest["config"] = {{"frames", o.frames},
                        {"bodies", o.bodies},
                        {"noise", o.noise},
                        {"dropout", o.dropout},
                        {"seed", rs.seed}};
  manifest["outputs"] = outputs;
  manifest["timings"] = {{"total_seconds", total}};
  write_manifest(fs::path(o.output) / "manifest.json", manifest);

  std::cout << "frames=" << seq.scans.size() << "\n"
            << "bodies=" << o.bodies << "\n";
  return 0;
}

int cmd_bench(const Options& o, const RunSettings& rs) {
  std::vector<std::size_t> sizes;
  for (const std::string& s : split_csv(o.sizes_csv)) sizes.push_back(parse_u64(s, "size"));
  const std::vector<std::string> modes = split_csv(o.modes_csv);
  for (const std::string& m : modes)
    if (m != "sinkhorn" && m != "nn") throw FormatError("unknown mode '" + m + "'");
  if (sizes.empty() || modes.empty()) throw FormatError("bench needs sizes and modes");

  json rows = json::array();
  std::vector<double> log_n, log_t;
  for (const std::string& mode : modes) {
    for (const std::size_t n : sizes) {
      Rng rng(rs.seed + n);
      std::vector<Point3> src_pts;
      src_pts.reserve(n);
      for (std::size_t i = 0; i < n; ++i)
        src_pts.push_back(
            {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)});
      RigidTransform motion;
      motion.rotation = rot_z(rng.uniform(-0.5, 0.5));
      motion.translation = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                            rng.uniform(-0.2, 0.2)};
      const InstanceSegment src = make_segment(1, 1, src_pts);
      const InstanceSegment dst = make_segment(2, 1, apply_transform(motion, src_pts));

      IcpConfig cfg = rs.tracker.icp;
      cfg.correspondence_mode =
          mode == "sinkhorn" ? CorrespondenceMode::kSinkhorn : CorrespondenceMode::kNearestNeighbor;
      double best = 0.0;
      int iterations = 0;
      for (int r = 0; r < std::max(1, o.repeats); ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        const RegistrationResult res = register_segments(src, dst, cfg);
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        iterations = res.iterations_run;
        if (r == 0 || dt < best) best = dt;
      }
      const double per_iter = best / std::max(1, iterations);
      std::cout << "mode=" << mode << " n=" << n << " seconds=" << fmt_double(best)
                << " iterations=" << iterations
                << " seconds_per_iteration=" << fmt_double(per_iter) << "\n";
      rows.push_back({{"mode", mode},
                      {"n", n},
                      {"seconds", best},
                      {"iterations", iterations},
                      {"seconds_per_iteration", per_iter}});
      if (mode == "sinkhorn") {
        log_n.push_back(std::log(static_cast<double>(n)));
        log_t.push_back(std::log(per_iter));
      }
    }
  }

  json manifest;
  manifest["command"] = "bench";
  manifest["config"] = serialize_settings(rs);
  manifest["rows"] = rows;
  if (log_n.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
      mx += log_n[i];
      my += log_t[i];
    }
    mx /= static_cast<double>(log_n.size());
    my /= static_cast<double>(log_n.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
      num += (log_n[i] - mx) * (log_t[i] - my);
      den += (log_n[i] - mx) * (log_n[i] - mx);
    }
    const double slope = num / den;
    std::cout << "sinkhorn_scaling_exponent=" << fmt_double(slope) << "\n";
    manifest["sinkhorn_scaling_exponent"] = slope;
  }
  if (!o.output.empty()) {
    fs::create_directories(o.output);
    write_manifest(fs::path(o.output) / "manifest.json", manifest);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal instance association for 4D LiDAR panoptic segmentation"};
  app.require_subcommand(1);
  Options o;

  const auto add_run_flags = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "flat key=value configuration file");
    sub->add_option("--matching", o.matching, "assignment solver")
        ->check(CLI::IsMember({"greedy", "hungarian"}));
    sub->add_option("--correspondence", o.correspondence, "icp correspondence mode")
        ->check(CLI::IsMember({"sinkhorn", "nn"}));
    sub->add_option("--dbscan", o.dbscan_spec, "refine instances first: 'eps,min_points'");
    sub->add_flag("--no-static-stage", o.no_static, "skip the static-instance gates");
    sub->add_flag("--no-bank", o.no_bank, "disable the occlusion memory bank");
    sub->add_option("--seed", o.seed, "rng seed");
    sub->add_option("--threads", o.threads, "worker threads; 0 = hardware, 1 = serial");
    sub->add_option("--report", o.report, "stdout report style")
        ->check(CLI::IsMember({"text", "structured"}));
  };

  CLI::App* assoc = app.add_subcommand("associate", "assign consistent instance ids");
  assoc->add_option("--input", o.input, "sequence directory")->required();
  assoc->add_option("--format", o.format, "input layout")
      ->check(CLI::IsMember({"kitti", "generic", "synth"}));
  assoc->add_option("--output", o.output, "output directory")->required();
  add_run_flags(assoc);

  CLI::App* eval = app.add_subcommand("evaluate", "score predictions against ground truth");
  eval->add_option("--gt", o.gt, "ground-truth label directory")->required();
  eval->add_option("--pred", o.pred, "predicted label directory")->required();
  eval->add_option("--output", o.output, "output directory")->required();
  add_run_flags(eval);

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic sequence");
  synth->add_option("--output", o.output, "output directory")->required();
  synth->add_option("--frames", o.frames, "frame count");
  synth->add_option("--bodies", o.bodies, "moving body count");
  synth->add_option("--noise", o.noise, "gaussian noise sigma, meters");
  synth->add_option("--dropout", o.dropout, "point dropout fraction [0,1)");
  add_run_flags(synth);

  CLI::App* bench = app.add_subcommand("bench", "time registration over a size ladder");
  bench->add_option("--sizes", o.sizes_csv, "comma-separated point counts");
  bench->add_option("--modes", o.modes_csv, "comma-separated subset of sinkhorn,nn");
  bench->add_option("--repeats", o.repeats, "timing repetitions per cell");
  bench->add_option("--output", o.output, "optional manifest directory");
  add_run_flags(bench);

  int rc = 0;
  assoc->callback([&]() { rc = cmd_associate(o, settings_from(o, *assoc)); });
  eval->callback([&]() { rc = cmd_evaluate(o, settings_from(o, *eval)); });
  synth->callback([&]() { rc = cmd_synth(o, settings_from(o, *synth)); });
  bench->callback([&]() { rc = cmd_bench(o, settings_from(o, *bench)); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
