#include "graspkit/depth_image.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "graspkit/synth.hpp"

namespace graspkit {
namespace {

// Reads the next header token, skipping whitespace and '#' comment lines.
std::string next_pgm_token(std::istream& in) {
  std::string tok;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  while (c != EOF && !std::isspace(c)) {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (c != EOF) in.unget();
  return tok;
}

int parse_pgm_int(std::istream& in, const char* what) {
  const std::string tok = next_pgm_token(in);
  try {
    std::size_t pos = 0;
    const int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(std::string("pgm: malformed ") + what);
  }
}

}  // namespace

Pgm16 read_pgm16(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("pgm: cannot open " + path);
  }
  if (next_pgm_token(in) != "P5") {
    throw std::runtime_error("pgm: not a binary PGM (P5): " + path);
  }
  Pgm16 img;
  img.width = parse_pgm_int(in, "width");
  img.height = parse_pgm_int(in, "height");
  img.maxval = parse_pgm_int(in, "maxval");
  if (img.width <= 0 || img.height <= 0) {
    throw std::runtime_error("pgm: zero or negative dimensions in " + path);
  }
  if (img.maxval <= 255 || img.maxval > 65535) {
    throw std::runtime_error("pgm: expected 16-bit maxval in " + path);
  }
  in.get();  // single whitespace byte separating header from samples

  const std::size_t n =
      static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  std::vector<unsigned char> raw(n * 2);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw std::runtime_error("pgm: truncated sample data in " + path);
  }
  img.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    img.samples[i] = static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
  }
  return img;
}

void write_pgm16(const Pgm16& img, const std::string& path) {
  if (img.width <= 0 || img.height <= 0 ||
      img.samples.size() != static_cast<std::size_t>(img.width) *
                                static_cast<std::size_t>(img.height)) {
    throw std::runtime_error("pgm: inconsistent image to write");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("pgm: cannot write " + path);
  }
  out << "P5\n" << img.width << " " << img.height << "\n" << img.maxval << "\n";
  std::vector<unsigned char> raw(img.samples.size() * 2);
  for (std::size_t i = 0; i < img.samples.size(); ++i) {
    raw[2 * i] = static_cast<unsigned char>(img.samples[i] >> 8);
    raw[2 * i + 1] = static_cast<unsigned char>(img.samples[i] & 0xff);
  }
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
  if (!out) {
    throw std::runtime_error("pgm: write failed for " + path);
  }
}

DepthImage load_depth(const std::string& path, double unit_scale) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) {
    throw std::runtime_error("depth: cannot open " + path);
  }
  int c = probe.get();
  while (c != EOF && std::isspace(c)) c = probe.get();
  probe.close();

  if (c == '{') {
    // Synthetic scene dump: render it (metric by construction; unit_scale
    // applies only to stored PGM samples).
    const SceneSpec spec = load_scene(path);
    const CameraModel cam = spec.camera ? *spec.camera : default_camera();
    return render_scene(spec, cam).depth;
  }

  if (!(unit_scale > 0.0)) {
    throw std::runtime_error("depth: unit_scale must be positive");
  }
  const Pgm16 pgm = read_pgm16(path);
  DepthImage img;
  img.width = pgm.width;
  img.height = pgm.height;
  img.values.resize(pgm.samples.size());
  for (std::size_t i = 0; i < pgm.samples.size(); ++i) {
    img.values[i] = static_cast<double>(pgm.samples[i]) * unit_scale;
  }
  return img;
}

void save_depth_pgm(const DepthImage& img, const std::string& path,
                    double unit_scale) {
  if (!(unit_scale > 0.0)) {
    throw std::runtime_error("depth: unit_scale must be positive");
  }
  Pgm16 pgm;
  pgm.width = img.width;
  pgm.height = img.height;
  pgm.maxval = 65535;
  pgm.samples.resize(img.values.size());
  for (std::size_t i = 0; i < img.values.size(); ++i) {
    const double d = img.values[i];
    if (d == DepthImage::kInvalid) {
      pgm.samples[i] = 0;
      continue;
    }
    const long long stored = std::llround(d / unit_scale);
    if (stored < 0 || stored > 65535) {
      throw std::runtime_error("depth: value out of 16-bit range for " + path);
    }
    pgm.samples[i] = static_cast<std::uint16_t>(stored);
  }
  write_pgm16(pgm, path);
}

}  // namespace graspkit
