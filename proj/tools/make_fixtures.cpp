// Writes the synthetic fixture set to disk:
//   <out>/positives/*.pgm   64x64 face crops
//   <out>/negatives/*.pgm   64x64 clutter windows
//   <out>/people/*.pgm      enrollment and live-capture scenes per identity
//   <out>/corpus/*          ten mixed-content sample files

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "biocrypt/synthetic.hpp"

namespace fs = std::filesystem;
using namespace biocrypt;

int main(int argc, char** argv) {
  CLI::App app{"Generate synthetic face fixtures and a sample corpus"};
  fs::path out = "fixtures";
  std::size_t corpus_size = 64 * 1024;
  int people = 4;
  app.add_option("out", out, "output directory")->capture_default_str();
  app.add_option("--corpus-size", corpus_size, "bytes per corpus file")->capture_default_str();
  app.add_option("--people", people, "identities to render scenes for")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  auto name = [](const char* prefix, std::size_t i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%03zu.pgm", prefix, i);
    return std::string(buf);
  };

  try {
    for (const char* sub : {"positives", "negatives", "people", "corpus"}) fs::create_directories(out / sub);
    const auto ts = synthetic::training_set();
    for (std::size_t i = 0; i < ts.positives.size(); ++i) write_pgm_file(out / "positives" / name("face", i), ts.positives[i]);
    for (std::size_t i = 0; i < ts.negatives.size(); ++i) write_pgm_file(out / "negatives" / name("clutter", i), ts.negatives[i]);
    for (int id = 0; id < people; ++id) {
      const auto pid = static_cast<std::uint64_t>(id);
      const auto base = "person" + std::to_string(id);
      write_pgm_file(out / "people" / (base + "_enroll.pgm"), synthetic::scene(pid, 160, 128, 48, 32, 64, 100 + pid).image);
      write_pgm_file(out / "people" / (base + "_live.pgm"),
                     synthetic::scene(pid, 160, 128, 48, 32, 64, 200 + pid, synthetic::live_capture(pid)).image);
    }
    for (const auto& f : synthetic::sample_corpus(corpus_size)) write_file_atomic(out / "corpus" / f.name, f.data);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  std::cout << "fixtures written to " << out.string() << "\n";
  return 0;
}
