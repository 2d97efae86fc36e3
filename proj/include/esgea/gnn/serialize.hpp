#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "esgea/error.hpp"
#include "esgea/gnn/model.hpp"
#include "esgea/io.hpp"

namespace esgea::gnn {

inline constexpr std::array<char, 8> kModelMagic = {'E', 'S', 'G', 'E', 'A', 'M', 'D', 'L'};
inline constexpr std::uint32_t kModelVersion = 1;

/// Layout (little-endian): magic[8], u32 version, config (u64 layers, u64
/// hidden, u32 aggregator, u32 readout, f64 lr, f64 wd, u64 epochs, u64
/// patience, u64 seed, u64 batch), u64 input_dim, u64 classes, u64 tensor
/// count, then per tensor [u64 rows][u64 cols][f64 row-major].
inline void write_model(std::ostream& out, const TrainedModel& m) {
  using io::detail::put_le;
  out.write(kModelMagic.data(), kModelMagic.size());
  put_le<std::uint32_t>(out, kModelVersion);
  const auto& c = m.config;
  put_le<std::uint64_t>(out, c.num_layers);
  put_le<std::uint64_t>(out, c.hidden_dim);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(c.aggregator));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(c.readout));
  put_le<double>(out, c.learning_rate);
  put_le<double>(out, c.weight_decay);
  put_le<std::uint64_t>(out, c.epochs);
  put_le<std::uint64_t>(out, c.patience);
  put_le<std::uint64_t>(out, c.seed);
  put_le<std::uint64_t>(out, c.batch_size);
  put_le<std::uint64_t>(out, m.input_dim);
  put_le<std::uint64_t>(out, m.num_classes);
  auto tensors = const_cast<TrainedModel&>(m).parameters();
  put_le<std::uint64_t>(out, tensors.size());
  for (const Matrix* t : tensors) {
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(t->rows()));
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(t->cols()));
    out.write(reinterpret_cast<const char*>(t->data()), static_cast<std::streamsize>(t->size() * sizeof(double)));
  }
}

inline TrainedModel read_model(std::istream& in, const std::string& source = "<stream>") {
  using io::detail::get_le;
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kModelMagic) throw DataError(source + ": not a model file");
  const auto version = get_le<std::uint32_t>(in, source);
  if (version != kModelVersion) throw DataError(source + ": unsupported model version " + std::to_string(version));
  TrainedModel m;
  auto& c = m.config;
  c.num_layers = get_le<std::uint64_t>(in, source);
  c.hidden_dim = get_le<std::uint64_t>(in, source);
  const auto agg = get_le<std::uint32_t>(in, source);
  const auto ro = get_le<std::uint32_t>(in, source);
  if (agg > 3 || ro > 1) throw DataError(source + ": bad aggregator/readout code");
  c.aggregator = static_cast<Aggregator>(agg);
  c.readout = static_cast<Readout>(ro);
  c.learning_rate = get_le<double>(in, source);
  c.weight_decay = get_le<double>(in, source);
  c.epochs = get_le<std::uint64_t>(in, source);
  c.patience = get_le<std::uint64_t>(in, source);
  c.seed = get_le<std::uint64_t>(in, source);
  c.batch_size = get_le<std::uint64_t>(in, source);
  m.input_dim = get_le<std::uint64_t>(in, source);
  m.num_classes = get_le<std::uint64_t>(in, source);
  const auto count = get_le<std::uint64_t>(in, source);
  if (count != c.num_layers + 2) throw DataError(source + ": tensor count does not match layer count");
  std::vector<Matrix> tensors;
  std::size_t expect_rows = m.input_dim;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto rows = get_le<std::uint64_t>(in, source);
    const auto cols = get_le<std::uint64_t>(in, source);
    const bool is_bias = i == count - 1;
    const std::size_t want_rows = is_bias ? 1 : expect_rows;
    const std::size_t want_cols = i + 2 < count ? c.hidden_dim : m.num_classes;
    if (rows != want_rows || cols != want_cols) throw DataError(source + ": tensor " + std::to_string(i) + " has wrong shape");
    Matrix t(rows, cols);
    if (!in.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(rows * cols * sizeof(double)))) {
      throw DataError(source + ": truncated model file");
    }
    tensors.push_back(std::move(t));
    if (!is_bias) expect_rows = cols;
  }
  m.head_bias = std::move(tensors.back());
  tensors.pop_back();
  m.head_weight = std::move(tensors.back());
  tensors.pop_back();
  m.layers = std::move(tensors);
  return m;
}

inline void save_model(const std::filesystem::path& path, const TrainedModel& m) {
  auto out = io::detail::open_out(path, std::ios::binary);
  write_model(out, m);
}

inline TrainedModel load_model(const std::filesystem::path& path) {
  auto in = io::detail::open_in(path, std::ios::binary);
  return read_model(in, path.string());
}

/// {task, seed, epochs_run, test_metric, per_epoch: [{epoch, train_loss, val_loss}]}
inline nlohmann::json metrics_json(std::string_view task, std::uint64_t seed, std::size_t epochs_run,
                                   double test_metric, const std::vector<EpochRecord>& history) {
  nlohmann::json per_epoch = nlohmann::json::array();
  for (const auto& e : history) {
    per_epoch.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"val_loss", e.val_loss}});
  }
  return {{"task", task},
          {"seed", seed},
          {"epochs_run", epochs_run},
          {"test_metric", test_metric},
          {"per_epoch", std::move(per_epoch)}};
}

}  // namespace esgea::gnn
