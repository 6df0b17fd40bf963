#include "road/tensor_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "road/errors.hpp"

namespace road {

std::pair<double, double> ImageTensor::value_range() const {
  if (data.empty()) return {0.0, 0.0};
  auto [lo, hi] = std::minmax_element(data.begin(), data.end());
  return {*lo, *hi};
}

void Dataset::recompute_mean() {
  if (images.empty()) {
    per_channel_mean.clear();
    return;
  }
  int c = images.front().channels;
  per_channel_mean.assign(c, 0.0);
  std::size_t count = 0;
  for (const auto& img : images) {
    for (int p = 0; p < img.num_pixels(); ++p)
      for (int ch = 0; ch < c; ++ch)
        per_channel_mean[ch] += img.data[static_cast<std::size_t>(p) * c + ch];
    count += img.num_pixels();
  }
  for (double& m : per_channel_mean) m /= static_cast<double>(count);
}

namespace npy {
namespace {

constexpr char kMagic[6] = {'\x93', 'N', 'U', 'M', 'P', 'Y'};

std::string shape_to_str(const std::vector<std::size_t>& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    os << shape[i];
    if (shape.size() == 1 || i + 1 < shape.size()) os << ',';
    if (i + 1 < shape.size()) os << ' ';
  }
  os << ')';
  return os.str();
}

void write_raw(const std::filesystem::path& path, const std::string& descr,
               const std::vector<std::size_t>& shape, const void* payload,
               std::size_t payload_bytes) {
  std::string dict = "{'descr': '" + descr + "', 'fortran_order': False, 'shape': " +
                     shape_to_str(shape) + ", }";
  // total header (magic + version + len + dict + padding + '\n') is a
  // multiple of 64 bytes
  std::size_t unpadded = 6 + 2 + 2 + dict.size() + 1;
  std::size_t total = (unpadded + 63) / 64 * 64;
  dict.append(total - unpadded, ' ');
  dict.push_back('\n');

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(kMagic, 6);
  char version[2] = {1, 0};
  out.write(version, 2);
  std::uint16_t hlen = static_cast<std::uint16_t>(dict.size());
  char lenb[2] = {static_cast<char>(hlen & 0xff), static_cast<char>(hlen >> 8)};
  out.write(lenb, 2);
  out.write(dict.data(), static_cast<std::streamsize>(dict.size()));
  out.write(static_cast<const char*>(payload), static_cast<std::streamsize>(payload_bytes));
  if (!out) throw IoError("write failed: " + path.string());
}

std::string extract_field(const std::string& dict, const std::string& key) {
  auto pos = dict.find("'" + key + "'");
  if (pos == std::string::npos) throw FormatError("missing header key: " + key);
  pos = dict.find(':', pos);
  if (pos == std::string::npos) throw FormatError("malformed header");
  ++pos;
  while (pos < dict.size() && dict[pos] == ' ') ++pos;
  std::size_t end = pos;
  if (dict[pos] == '\'') {
    end = dict.find('\'', pos + 1);
    if (end == std::string::npos) throw FormatError("malformed header");
    return dict.substr(pos + 1, end - pos - 1);
  }
  if (dict[pos] == '(') {
    end = dict.find(')', pos);
    if (end == std::string::npos) throw FormatError("malformed header");
    return dict.substr(pos, end - pos + 1);
  }
  while (end < dict.size() && dict[end] != ',' && dict[end] != '}') ++end;
  return dict.substr(pos, end - pos);
}

}  // namespace

Array read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  char magic[6];
  in.read(magic, 6);
  if (!in || std::memcmp(magic, kMagic, 6) != 0)
    throw FormatError("not an NPY file: " + path.string());
  unsigned char version[2];
  in.read(reinterpret_cast<char*>(version), 2);
  if (!in || version[0] != 1 || version[1] != 0)
    throw FormatError("unsupported NPY version");
  unsigned char lenb[2];
  in.read(reinterpret_cast<char*>(lenb), 2);
  if (!in) throw FormatError("truncated NPY header");
  std::size_t hlen = lenb[0] | (static_cast<std::size_t>(lenb[1]) << 8);
  std::string dict(hlen, '\0');
  in.read(dict.data(), static_cast<std::streamsize>(hlen));
  if (!in) throw FormatError("truncated NPY header");

  std::string descr = extract_field(dict, "descr");
  std::string fortran = extract_field(dict, "fortran_order");
  std::string shape_str = extract_field(dict, "shape");
  if (fortran != "False") throw FormatError("fortran_order arrays are not supported");

  Array arr;
  {
    std::string inner = shape_str.substr(1, shape_str.size() - 2);
    std::istringstream ss(inner);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      std::string trimmed;
      for (char c : tok)
        if (!std::isspace(static_cast<unsigned char>(c))) trimmed += c;
      if (!trimmed.empty()) arr.shape.push_back(std::stoull(trimmed));
    }
  }
  std::size_t count = 1;
  for (std::size_t s : arr.shape) count *= s;

  int item = 0;
  bool is_int = false;
  if (descr == "<f8") item = 8;
  else if (descr == "<f4") item = 4;
  else if (descr == "<i8") { item = 8; is_int = true; }
  else if (descr == "<i4") { item = 4; is_int = true; }
  else throw UnsupportedDtype("unsupported dtype: " + descr);

  std::vector<char> buf(count * static_cast<std::size_t>(item));
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!in) throw FormatError("truncated NPY payload");

  arr.integer_dtype = is_int;
  arr.data.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const char* p = buf.data() + i * static_cast<std::size_t>(item);
    if (!is_int && item == 8) {
      double v;
      std::memcpy(&v, p, 8);
      arr.data[i] = v;
    } else if (!is_int && item == 4) {
      float v;
      std::memcpy(&v, p, 4);
      arr.data[i] = static_cast<double>(v);
    } else if (item == 8) {
      std::int64_t v;
      std::memcpy(&v, p, 8);
      arr.data[i] = static_cast<double>(v);
    } else {
      std::int32_t v;
      std::memcpy(&v, p, 4);
      arr.data[i] = static_cast<double>(v);
    }
  }
  return arr;
}

void write_f8(const std::filesystem::path& path, const std::vector<std::size_t>& shape,
              const std::vector<double>& data) {
  write_raw(path, "<f8", shape, data.data(), data.size() * 8);
}

void write_i8(const std::filesystem::path& path, const std::vector<std::size_t>& shape,
              const std::vector<std::int64_t>& data) {
  write_raw(path, "<i8", shape, data.data(), data.size() * 8);
}

}  // namespace npy

Tensor read_tensor(const std::filesystem::path& path) {
  npy::Array arr = npy::read(path);
  if (arr.integer_dtype) throw UnsupportedDtype("expected float dtype: " + path.string());
  for (double v : arr.data)
    if (!std::isfinite(v)) throw FormatError("non-finite value in " + path.string());
  if (arr.shape.size() == 2) {
    SaliencyMap s;
    s.height = static_cast<int>(arr.shape[0]);
    s.width = static_cast<int>(arr.shape[1]);
    s.scores = std::move(arr.data);
    return s;
  }
  if (arr.shape.size() == 3) {
    ImageTensor t;
    t.height = static_cast<int>(arr.shape[0]);
    t.width = static_cast<int>(arr.shape[1]);
    t.channels = static_cast<int>(arr.shape[2]);
    t.data = std::move(arr.data);
    return t;
  }
  throw FormatError("expected 2-D or 3-D array, got rank " +
                    std::to_string(arr.shape.size()));
}

void write_tensor(const ImageTensor& t, const std::filesystem::path& path) {
  npy::write_f8(path,
                {static_cast<std::size_t>(t.height), static_cast<std::size_t>(t.width),
                 static_cast<std::size_t>(t.channels)},
                t.data);
}

void write_tensor(const SaliencyMap& s, const std::filesystem::path& path) {
  npy::write_f8(path,
                {static_cast<std::size_t>(s.height), static_cast<std::size_t>(s.width)},
                s.scores);
}

namespace {

std::string fmt6(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

void write_curve_csv(const std::vector<EvaluationCurve>& curves,
                     const std::filesystem::path& path) {
  for (std::size_t i = 1; i < curves.size(); ++i)
    if (curves[i].eta != curves[0].eta)
      throw GridMismatch("curves do not share an eta grid");

  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "eta";
  for (const auto& c : curves) out << ',' << c.name << "_mean," << c.name << "_stderr";
  out << '\n';
  std::size_t rows = curves.empty() ? 0 : curves[0].eta.size();
  for (std::size_t r = 0; r < rows; ++r) {
    out << fmt6(curves[0].eta[r]);
    for (const auto& c : curves)
      out << ',' << fmt6(c.acc_mean[r]) << ',' << fmt6(c.acc_stderr[r]);
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<EvaluationCurve> read_curve_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  std::string header;
  if (!std::getline(in, header)) throw FormatError("empty CSV");
  std::vector<std::string> cols;
  {
    std::istringstream ss(header);
    std::string tok;
    while (std::getline(ss, tok, ',')) cols.push_back(tok);
  }
  if (cols.empty() || cols[0] != "eta") throw FormatError("expected eta column");
  std::vector<EvaluationCurve> curves;
  for (std::size_t i = 1; i + 1 < cols.size(); i += 2) {
    std::string base = cols[i].substr(0, cols[i].rfind("_mean"));
    curves.push_back({base, {}, {}, {}});
  }
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');
    double eta = std::stod(tok);
    for (auto& c : curves) {
      std::getline(ss, tok, ',');
      c.eta.push_back(eta);
      c.acc_mean.push_back(std::stod(tok));
      std::getline(ss, tok, ',');
      c.acc_stderr.push_back(std::stod(tok));
    }
  }
  return curves;
}

Dataset load_dataset(const std::filesystem::path& dir) {
  npy::Array imgs = npy::read(dir / "images.npy");
  npy::Array labels = npy::read(dir / "labels.npy");
  if (imgs.shape.size() != 4) throw FormatError("images.npy must be N x H x W x C");
  if (labels.shape.size() != 1 || labels.shape[0] != imgs.shape[0])
    throw FormatError("labels.npy must be N");

  Dataset ds;
  std::size_t n = imgs.shape[0];
  int h = static_cast<int>(imgs.shape[1]);
  int w = static_cast<int>(imgs.shape[2]);
  int c = static_cast<int>(imgs.shape[3]);
  std::size_t stride = static_cast<std::size_t>(h) * w * c;
  ds.images.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ImageTensor t{h, w, c, {}};
    t.data.assign(imgs.data.begin() + static_cast<std::ptrdiff_t>(i * stride),
                  imgs.data.begin() + static_cast<std::ptrdiff_t>((i + 1) * stride));
    ds.images.push_back(std::move(t));
  }
  ds.labels.reserve(n);
  int max_label = 0;
  for (std::size_t i = 0; i < n; ++i) {
    int y = static_cast<int>(labels.data[i]);
    if (y < 0) throw FormatError("negative label");
    max_label = std::max(max_label, y);
    ds.labels.push_back(y);
  }
  ds.num_classes = max_label + 1;
  ds.recompute_mean();
  return ds;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& dir) {
  if (ds.images.empty()) throw InvalidConfig("cannot save empty dataset");
  const auto& first = ds.images.front();
  std::size_t stride = first.size();
  std::vector<double> flat;
  flat.reserve(stride * ds.images.size());
  for (const auto& img : ds.images) {
    if (img.size() != stride || img.height != first.height || img.width != first.width)
      throw ShapeMismatch("dataset images differ in shape");
    flat.insert(flat.end(), img.data.begin(), img.data.end());
  }
  npy::write_f8(dir / "images.npy",
                {ds.images.size(), static_cast<std::size_t>(first.height),
                 static_cast<std::size_t>(first.width),
                 static_cast<std::size_t>(first.channels)},
                flat);
  std::vector<std::int64_t> labels(ds.labels.begin(), ds.labels.end());
  npy::write_i8(dir / "labels.npy", {labels.size()}, labels);
}

std::vector<SaliencyMap> read_saliency_stack(const std::filesystem::path& path) {
  npy::Array arr = npy::read(path);
  if (arr.integer_dtype) throw UnsupportedDtype("expected float saliency");
  std::vector<SaliencyMap> maps;
  if (arr.shape.size() == 2) {
    maps.push_back({static_cast<int>(arr.shape[0]), static_cast<int>(arr.shape[1]),
                    std::move(arr.data)});
    return maps;
  }
  if (arr.shape.size() != 3) throw FormatError("saliency stack must be 2-D or 3-D");
  std::size_t n = arr.shape[0];
  int h = static_cast<int>(arr.shape[1]);
  int w = static_cast<int>(arr.shape[2]);
  std::size_t stride = static_cast<std::size_t>(h) * w;
  for (std::size_t i = 0; i < n; ++i) {
    SaliencyMap s{h, w, {}};
    s.scores.assign(arr.data.begin() + static_cast<std::ptrdiff_t>(i * stride),
                    arr.data.begin() + static_cast<std::ptrdiff_t>((i + 1) * stride));
    maps.push_back(std::move(s));
  }
  return maps;
}

void write_saliency_stack(const std::vector<SaliencyMap>& maps,
                          const std::filesystem::path& path) {
  if (maps.empty()) throw InvalidConfig("empty saliency stack");
  std::vector<double> flat;
  flat.reserve(maps.size() * maps[0].scores.size());
  for (const auto& m : maps) flat.insert(flat.end(), m.scores.begin(), m.scores.end());
  npy::write_f8(path,
                {maps.size(), static_cast<std::size_t>(maps[0].height),
                 static_cast<std::size_t>(maps[0].width)},
                flat);
}

}  // namespace road
