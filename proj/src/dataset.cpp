#include "hfl/dataset.hpp"

#include <fstream>
#include <vector>

#include "hfl/errors.hpp"
#include "hfl/rng.hpp"

namespace hfl {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<unsigned char>& buf, std::size_t offset,
                        const std::string& path) {
  if (offset + 4 > buf.size())
    throw FormatError(path + ": truncated header at offset " + std::to_string(offset));
  return (std::uint32_t(buf[offset]) << 24) | (std::uint32_t(buf[offset + 1]) << 16) |
         (std::uint32_t(buf[offset + 2]) << 8) | std::uint32_t(buf[offset + 3]);
}

}  // namespace

void DataSpec::validate() const {
  if (source == DataSource::Synthetic) {
    if (classes < 2) throw ConfigError("data.classes must be at least 2");
    if (input_dim < 1) throw ConfigError("data.input_dim must be positive");
    if (samples < 1) throw ConfigError("data.samples must be positive");
    if (sigma <= 0.0) throw ConfigError("data.sigma must be positive");
    if (separation < 0.0) throw ConfigError("data.separation must be nonnegative");
  } else {
    if (image_path.empty() || label_path.empty())
      throw ConfigError("data.image_path and data.label_path are required for idx_files");
  }
  if (public_size < 1) throw ConfigError("data.public_size must be positive");
  if (test_size < 1) throw ConfigError("data.test_size must be positive");
  if (max_examples < 0) throw ConfigError("data.max_examples must be nonnegative");
}

Dataset load_idx_dataset(const std::string& image_path, const std::string& label_path) {
  const auto img = read_file(image_path);
  const auto lab = read_file(label_path);

  if (read_be32(img, 0, image_path) != kImageMagic)
    throw FormatError(image_path + ": bad image magic at offset 0");
  if (read_be32(lab, 0, label_path) != kLabelMagic)
    throw FormatError(label_path + ": bad label magic at offset 0");

  const std::uint32_t n_img = read_be32(img, 4, image_path);
  const std::uint32_t rows = read_be32(img, 8, image_path);
  const std::uint32_t cols = read_be32(img, 12, image_path);
  const std::uint32_t n_lab = read_be32(lab, 4, label_path);

  if (n_img != n_lab)
    throw FormatError(image_path + ": image count " + std::to_string(n_img) +
                      " disagrees with label count " + std::to_string(n_lab));
  const std::size_t want_img = 16 + std::size_t(n_img) * rows * cols;
  if (img.size() != want_img)
    throw FormatError(image_path + ": expected " + std::to_string(want_img) +
                      " bytes, found " + std::to_string(img.size()));
  const std::size_t want_lab = 8 + std::size_t(n_lab);
  if (lab.size() != want_lab)
    throw FormatError(label_path + ": expected " + std::to_string(want_lab) +
                      " bytes, found " + std::to_string(lab.size()));

  Dataset ds;
  ds.num_classes = 10;
  ds.inputs.resize(n_img, std::size_t(rows) * cols);
  ds.labels.resize(n_img);
  for (std::uint32_t i = 0; i < n_img; ++i) {
    const std::size_t base = 16 + std::size_t(i) * rows * cols;
    for (std::uint32_t p = 0; p < rows * cols; ++p)
      ds.inputs(i, p) = img[base + p] / 255.0;
    const unsigned char y = lab[8 + i];
    if (y > 9) throw FormatError(label_path + ": label " + std::to_string(int(y)) +
                                 " out of range at item " + std::to_string(i));
    ds.labels[i] = y;
  }
  return ds;
}

Dataset gen_synthetic_dataset(const DataSpec& spec, std::uint64_t seed,
                              const Eigen::MatrixXd& class_means) {
  spec.validate();
  if (class_means.rows() != spec.classes || class_means.cols() != spec.input_dim)
    throw ShapeError("gen_synthetic_dataset: class_means must be classes x input_dim");

  Dataset ds;
  ds.num_classes = spec.classes;
  ds.inputs.resize(spec.samples, spec.input_dim);
  ds.labels.resize(spec.samples);

  RngStream rng = RngStream::keyed(seed, StreamKind::Synthetic);
  Eigen::Index row = 0;
  for (Eigen::Index c = 0; c < spec.classes; ++c) {
    Eigen::Index count = spec.samples / spec.classes;
    if (c < spec.samples % spec.classes) ++count;  // remainder to the low classes
    for (Eigen::Index i = 0; i < count; ++i, ++row) {
      for (Eigen::Index d = 0; d < spec.input_dim; ++d)
        ds.inputs(row, d) = class_means(c, d) + spec.sigma * rng.normal();
      ds.labels[row] = static_cast<int>(c);
    }
  }
  return ds;
}

Dataset gen_synthetic_dataset(const DataSpec& spec, std::uint64_t seed) {
  spec.validate();
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(spec.classes, spec.input_dim);
  for (Eigen::Index c = 0; c < spec.classes; ++c)
    means(c, c % spec.input_dim) = spec.separation;
  return gen_synthetic_dataset(spec, seed, means);
}

Dataset load_dataset(const DataSpec& spec, std::uint64_t seed) {
  spec.validate();
  if (spec.source == DataSource::Synthetic) return gen_synthetic_dataset(spec, seed);

  Dataset ds = load_idx_dataset(spec.image_path, spec.label_path);
  if (spec.max_examples > 0 && ds.size() > spec.max_examples) {
    ds.inputs.conservativeResize(spec.max_examples, Eigen::NoChange);
    ds.labels.conservativeResize(spec.max_examples);
  }
  return ds;
}

}  // namespace hfl
