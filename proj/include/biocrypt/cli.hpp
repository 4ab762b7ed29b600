#pragma once

// Command-line surface: train, enroll, auth, encrypt, decrypt, analyze.
//
// Exit codes: 0 success, 1 usage or unexpected error, 2 empty input
// directory, 3 I/O or unreadable file, 4 no face, 5 multiple faces,
// 6 duplicate user, 7 authentication failed, 8 malformed envelope.

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "biocrypt/cipher.hpp"
#include "biocrypt/enrollment.hpp"
#include "biocrypt/metrics.hpp"

namespace biocrypt::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kEmptyInput = 2,
  kIoError = 3,
  kNoFace = 4,
  kMultipleFaces = 5,
  kDuplicateUser = 6,
  kAuthFailed = 7,
  kMalformedEnvelope = 8,
};

inline int exit_code_for(Errc e) {
  switch (e) {
    case Errc::empty_input: return kEmptyInput;
    case Errc::io:
    case Errc::bad_format: return kIoError;
    case Errc::no_face:
    case Errc::blank_encoding: return kNoFace;
    case Errc::multiple_faces: return kMultipleFaces;
    case Errc::duplicate_user: return kDuplicateUser;
    case Errc::unknown_user: return kAuthFailed;
    case Errc::malformed_envelope: return kMalformedEnvelope;
    default: return kUsage;
  }
}

struct Config {
  fs::path store_path = "biocrypt.store";
  fs::path model_path = "biocrypt.model";
  double auth_threshold = kDefaultAuthThreshold;
  double detect_threshold = 0.0;
  double nms_iou = 0.3;
  double perturb_fraction = 0.5;
  std::uint64_t perturb_seed = 42;
  std::string analyze_iv_hex = "000102030405060708090a0b0c0d0e0f";
  bool pkcs7 = false;

  DetectOptions detect_options() const {
    DetectOptions o;
    o.threshold = detect_threshold;
    o.iou_threshold = nms_iou;
    return o;
  }
  Padding padding() const { return pkcs7 ? Padding::pkcs7 : Padding::null_bytes; }
};

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

/// Regular files directly under `dir`, sorted by name. Missing directory is
/// an I/O error.
inline std::vector<fs::path> list_files(const fs::path& dir, std::string_view extension = {}) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) fail(Errc::io, "not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    if (!extension.empty()) {
      auto ext = entry.path().extension().string();
      std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
      if (ext != extension) continue;
    }
    files.push_back(entry.path());
  }
  if (ec) fail(Errc::io, "cannot list " + dir.string());
  std::sort(files.begin(), files.end());
  return files;
}

inline LinearSvmModel read_model(const Config& cfg) { return load_model(read_file(cfg.model_path)); }

inline GrayImage read_window(const fs::path& path) {
  auto img = read_pgm_file(path);
  if (img.width() != kWindowSide || img.height() != kWindowSide) img = resize_bilinear(img, kWindowSide, kWindowSide);
  return img;
}

inline int cmd_train(const Config& cfg, const fs::path& positives, const fs::path& negatives, Streams io,
                     double lambda = kDefaultLambda, std::uint32_t epochs = kDefaultEpochs,
                     std::uint64_t seed = kDefaultTrainSeed) {
  const auto pos = list_files(positives, ".pgm");
  const auto neg = list_files(negatives, ".pgm");
  if (pos.empty()) fail(Errc::empty_input, "no .pgm files in " + positives.string());
  if (neg.empty()) fail(Errc::empty_input, "no .pgm files in " + negatives.string());

  std::vector<TrainingSample> samples;
  for (const auto& p : pos) samples.push_back({hog_descriptor(read_window(p)), +1});
  for (const auto& p : neg) samples.push_back({hog_descriptor(read_window(p)), -1});

  const auto model = train_svm(samples, lambda, epochs, seed);
  write_file_atomic(cfg.model_path, save_model(model));
  io.out << "trained on " << pos.size() << " positive and " << neg.size() << " negative windows\n"
         << "training accuracy: " << std::fixed << std::setprecision(2) << 100.0 * training_accuracy(model, samples)
         << "%\n"
         << "model written to " << cfg.model_path.string() << "\n";
  return kOk;
}

inline int cmd_enroll(const Config& cfg, const std::string& user, const fs::path& image, Streams io) {
  const auto model = read_model(cfg);
  auto store = load_store_file(cfg.store_path);
  const auto img = read_pgm_file(image);
  enroll(store, user, img, model, cfg.detect_options());
  save_store_file(cfg.store_path, store);
  io.out << "enrolled '" << user << "' (" << store.templates.size() << " user(s) in store)\n";
  return kOk;
}

/// Authenticates `user` against a live image; returns the stored-template key
/// only on a match.
inline std::optional<BioKey> authorize(const Config& cfg, const std::string& user, const fs::path& live, Streams io) {
  const auto model = read_model(cfg);
  const auto store = load_store_file(cfg.store_path);
  const auto& stored = store.at(user);
  const auto decision = authenticate(store, user, read_pgm_file(live), model, cfg.auth_threshold, cfg.detect_options());
  io.err << "similarity " << std::fixed << std::setprecision(6) << decision.similarity << " (threshold "
         << decision.threshold << "): " << (decision.matched ? "match" : "no match") << "\n";
  if (!decision.matched) return std::nullopt;
  return derive_key(stored);
}

inline int cmd_auth(const Config& cfg, const std::string& user, const fs::path& live, Streams io) {
  if (!authorize(cfg, user, live, io)) return kAuthFailed;
  io.out << "authenticated '" << user << "'\n";
  return kOk;
}

inline int cmd_encrypt(const Config& cfg, const std::string& user, const fs::path& live, const fs::path& input,
                       fs::path output, Streams io) {
  const auto key = authorize(cfg, user, live, io);
  if (!key) return kAuthFailed;
  const auto plain = read_file(input);
  if (!plain.empty() && plain.back() == 0x00 && !cfg.pkcs7)
    io.err << "warning: " << input.string()
           << " ends in 0x00; trailing zero bytes will be lost on decryption (use --pkcs7 to keep them)\n";
  if (output.empty()) output = fs::path(input.string() + ".enc");
  write_file_atomic(output, encrypt(plain, *key, cfg.padding()).serialize());
  io.out << "encrypted " << plain.size() << " bytes to " << output.string() << "\n";
  return kOk;
}

inline int cmd_decrypt(const Config& cfg, const std::string& user, const fs::path& live, const fs::path& input,
                       fs::path output, Streams io) {
  const auto key = authorize(cfg, user, live, io);
  if (!key) return kAuthFailed;
  const auto plain = decrypt(CipherEnvelope::parse(read_file(input)), *key, cfg.padding());
  if (output.empty())
    output = input.extension() == ".enc" ? fs::path(input).replace_extension() : fs::path(input.string() + ".dec");
  write_file_atomic(output, plain);
  io.out << "decrypted " << plain.size() << " bytes to " << output.string() << "\n";
  return kOk;
}

/// Where analyze gets its key: an explicit hex key, or an authenticated user.
struct KeySource {
  std::string key_hex;
  std::string user;
  fs::path live_image;
};

inline int cmd_analyze(const Config& cfg, const fs::path& corpus, const KeySource& source, const fs::path& report,
                       Streams io) {
  Bytes key;
  if (!source.key_hex.empty()) {
    key = from_hex(source.key_hex);
    if (key.size() != kAes256KeySize) fail(Errc::invalid_argument, "--key-hex must encode exactly 32 bytes");
  } else if (!source.user.empty()) {
    auto k = authorize(cfg, source.user, source.live_image, io);
    if (!k) return kAuthFailed;
    key.assign(k->begin(), k->end());
  } else {
    fail(Errc::invalid_argument, "analyze needs --key-hex or --user with --image");
  }
  const auto iv = from_hex(cfg.analyze_iv_hex);
  if (iv.size() != kAesBlockSize) fail(Errc::invalid_argument, "--iv must encode exactly 16 bytes");
  const PerturbationSpec spec{cfg.perturb_fraction, cfg.perturb_seed};

  const auto files = list_files(corpus);
  std::vector<MetricsReport> rows;
  for (const auto& path : files) {
    const auto data = read_file(path);
    const auto label = path.filename().string();
    if (data.empty()) {
      io.err << "warning: skipping empty file " << label << "\n";
      continue;
    }
    try {
      rows.push_back(analyze_file(data, key, iv, spec, label));
    } catch (const Error& e) {
      if (e.code() != Errc::zero_variance) throw;
      // Constant-bit plaintext (e.g. all 0x00): correlation is undefined.
      io.err << "warning: correlation undefined for " << label << "\n";
      const auto body = encrypt_with_iv(data, key, iv).body;
      rows.push_back({label, std::nan(""), shannon_entropy(data), shannon_entropy(body),
                      normalized_hamming(data, body), avalanche_percent(data, key, iv, spec)});
    }
  }
  if (rows.empty()) fail(Errc::empty_input, "no files to analyze in " + corpus.string());
  const auto csv = to_csv(rows);
  write_file_atomic(report, Bytes(csv.begin(), csv.end()));
  io.out << "analyzed " << rows.size() << " file(s); report written to " << report.string() << "\n";
  return kOk;
}

/// Parses arguments and dispatches. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, Streams io) {
  CLI::App app{"Face-derived AES-256-CBC file encryption toolkit", "biocrypt"};
  app.fallthrough();
  app.require_subcommand(1);

  Config cfg;
  std::string store, model, iv = cfg.analyze_iv_hex;
  app.set_config("--config", "", "key = value configuration file")->envname("BIOCRYPT_CONFIG");
  app.add_option("--store", store, "template store file")->default_str(cfg.store_path.string());
  app.add_option("--model", model, "SVM model file")->default_str(cfg.model_path.string());
  app.add_option("--threshold", cfg.auth_threshold, "cosine similarity needed to authenticate")
      ->capture_default_str()
      ->check(CLI::Range(-1.0, 1.0));
  app.add_option("--detect-threshold", cfg.detect_threshold, "SVM score a window must exceed")->capture_default_str();
  app.add_option("--nms-iou", cfg.nms_iou, "overlap above which detections are suppressed")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--perturb-fraction", cfg.perturb_fraction, "fraction of bytes perturbed for avalanche")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--perturb-seed", cfg.perturb_seed, "seed for perturbation positions")->capture_default_str();
  app.add_option("--iv", iv, "fixed IV (hex) used by analyze")->capture_default_str();
  app.add_flag("--pkcs7", cfg.pkcs7, "use PKCS#7 padding instead of zero padding (not the default format)");

  fs::path pos_dir, neg_dir;
  double lambda = kDefaultLambda;
  std::uint32_t epochs = kDefaultEpochs;
  std::uint64_t seed = kDefaultTrainSeed;
  auto* train = app.add_subcommand("train", "train the face window classifier");
  train->add_option("positives", pos_dir, "directory of face crops (.pgm)")->required();
  train->add_option("negatives", neg_dir, "directory of non-face windows (.pgm)")->required();
  train->add_option("--lambda", lambda, "regularization strength")->capture_default_str()->check(CLI::PositiveNumber);
  train->add_option("--epochs", epochs, "passes over the training set")->capture_default_str();
  train->add_option("--seed", seed, "shuffle seed")->capture_default_str();

  std::string user;
  fs::path image, input, output;
  auto* enroll_cmd = app.add_subcommand("enroll", "enroll a user from a face image");
  enroll_cmd->add_option("username", user)->required();
  enroll_cmd->add_option("image", image, "face image (.pgm)")->required();

  auto* auth_cmd = app.add_subcommand("auth", "authenticate a user against a live image");
  auth_cmd->add_option("username", user)->required();
  auth_cmd->add_option("image", image, "live face image (.pgm)")->required();

  auto* enc_cmd = app.add_subcommand("encrypt", "authenticate, then encrypt a file");
  auto* dec_cmd = app.add_subcommand("decrypt", "authenticate, then decrypt a file");
  for (auto* c : {enc_cmd, dec_cmd}) {
    c->add_option("username", user)->required();
    c->add_option("image", image, "live face image (.pgm)")->required();
    c->add_option("input", input)->required();
    c->add_option("output", output);
  }

  fs::path corpus, report;
  KeySource source;
  auto* analyze = app.add_subcommand("analyze", "cipher quality report over a directory of files");
  analyze->add_option("corpus", corpus)->required();
  analyze->add_option("report", report, "CSV output")->required();
  analyze->add_option("--key-hex", source.key_hex, "64 hex digits");
  analyze->add_option("--user", source.user, "derive the key from this user's template");
  analyze->add_option("--image", source.live_image, "live image authenticating --user");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    io.out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    io.err << "error: " << e.what() << "\n";
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::FileError)) return kIoError;
    return kUsage;
  }
  if (!store.empty()) cfg.store_path = store;
  if (!model.empty()) cfg.model_path = model;
  cfg.analyze_iv_hex = iv;

  try {
    if (*train) return cmd_train(cfg, pos_dir, neg_dir, io, lambda, epochs, seed);
    if (*enroll_cmd) return cmd_enroll(cfg, user, image, io);
    if (*auth_cmd) return cmd_auth(cfg, user, image, io);
    if (*enc_cmd) return cmd_encrypt(cfg, user, image, input, output, io);
    if (*dec_cmd) return cmd_decrypt(cfg, user, image, input, output, io);
    if (*analyze) return cmd_analyze(cfg, corpus, source, report, io);
  } catch (const Error& e) {
    io.err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace biocrypt::cli
