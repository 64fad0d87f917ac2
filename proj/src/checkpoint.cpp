#include "medstream/checkpoint.hpp"

#include <array>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "medstream/errors.hpp"

namespace medstream {

std::uint32_t crc32(const unsigned char* data, std::size_t size) {
  static const std::array<std::uint32_t, 256> table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int bit = 0; bit < 8; ++bit) c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t crc = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < size; ++i) {
    crc = table[(crc ^ data[i]) & 0xFFu] ^ (crc >> 8);
  }
  return crc ^ 0xFFFFFFFFu;
}

namespace {

class Writer {
 public:
  void raw(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    buffer_.insert(buffer_.end(), bytes, bytes + size);
  }
  void u8(std::uint8_t v) { raw(&v, 1); }
  void u32(std::uint32_t v) { raw(&v, 4); }
  void i64(std::int64_t v) { raw(&v, 8); }
  void f64(double v) { raw(&v, 8); }
  void vec(const Eigen::VectorXd& v) { raw(v.data(), sizeof(double) * v.size()); }
  void mat(const Eigen::MatrixXd& m) { raw(m.data(), sizeof(double) * m.size()); }
  const std::vector<unsigned char>& bytes() const { return buffer_; }

 private:
  std::vector<unsigned char> buffer_;
};

class Reader {
 public:
  Reader(const unsigned char* data, std::size_t size) : data_(data), size_(size) {}
  void raw(void* out, std::size_t size) {
    if (pos_ + size > size_) throw IntegrityError("checkpoint is truncated");
    std::memcpy(out, data_ + pos_, size);
    pos_ += size;
  }
  std::uint8_t u8() { std::uint8_t v; raw(&v, 1); return v; }
  std::uint32_t u32() { std::uint32_t v; raw(&v, 4); return v; }
  std::int64_t i64() { std::int64_t v; raw(&v, 8); return v; }
  double f64() { double v; raw(&v, 8); return v; }
  Eigen::VectorXd vec(Eigen::Index n) {
    Eigen::VectorXd v(n);
    raw(v.data(), sizeof(double) * n);
    return v;
  }
  Eigen::MatrixXd mat(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    raw(m.data(), sizeof(double) * rows * cols);
    return m;
  }
  bool exhausted() const { return pos_ == size_; }

 private:
  const unsigned char* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

void write_config(Writer& w, const StreamConfig& config) {
  w.u8(config.model == ModelKind::kLogistic ? 1 : 0);
  w.u32(static_cast<std::uint32_t>(config.dims.n_mediators));
  w.u32(static_cast<std::uint32_t>(config.dims.n_confounders));
  w.u8(config.dims.outcome_intercept ? 1 : 0);
  w.u8(config.dims.mediator_intercept ? 1 : 0);
  w.f64(config.delta);
  w.f64(config.contrast.first);
  w.f64(config.contrast.second);
  w.u8(config.standardize ? 1 : 0);
  if (config.standardize) {
    w.vec(config.standardize->mean);
    w.vec(config.standardize->scale);
  }
  w.u8(config.standardize_from_first_batch ? 1 : 0);
}

StreamConfig read_config(Reader& r) {
  StreamConfig config;
  config.model = r.u8() ? ModelKind::kLogistic : ModelKind::kLinear;
  config.dims.n_mediators = static_cast<int>(r.u32());
  config.dims.n_confounders = static_cast<int>(r.u32());
  config.dims.outcome_intercept = r.u8() != 0;
  config.dims.mediator_intercept = r.u8() != 0;
  config.delta = r.f64();
  config.contrast.first = r.f64();
  config.contrast.second = r.f64();
  if (r.u8()) {
    const Eigen::Index cols = 1 + config.dims.n_mediators + config.dims.n_confounders;
    Standardization std_params;
    std_params.mean = r.vec(cols);
    std_params.scale = r.vec(cols);
    config.standardize = std::move(std_params);
  }
  config.standardize_from_first_batch = r.u8() != 0;
  return config;
}

}  // namespace

void save_checkpoint(const StreamState& state, const std::string& path) {
  Writer w;
  w.raw(kCheckpointMagic, sizeof(kCheckpointMagic));
  w.u32(kCheckpointVersion);
  write_config(w, state.config);

  if (const auto* linear = std::get_if<LinearOutcomeState>(&state.outcome)) {
    w.i64(linear->n_batches);
    w.i64(linear->n_obs);
    w.vec(linear->coef);
    w.mat(linear->info);
    w.f64(linear->yy_sum);
    w.f64(linear->resid_var);
  } else {
    const auto& logistic = std::get<LogisticOutcomeState>(state.outcome);
    w.i64(logistic.n_batches);
    w.i64(logistic.n_obs);
    w.f64(logistic.newton.tol);
    w.u32(static_cast<std::uint32_t>(logistic.newton.max_iter));
    w.u8(logistic.newton.step_halving ? 1 : 0);
    w.vec(logistic.coef);
    w.mat(logistic.info);
  }

  const auto& med = state.mediators;
  w.i64(med.n_batches);
  w.i64(med.n_obs);
  w.mat(med.info);
  w.mat(med.coef);
  w.vec(med.ww_sum);
  w.vec(med.resid_var);

  const std::uint32_t checksum = crc32(w.bytes().data(), w.bytes().size());

  const std::string tmp_path = path + ".tmp";
  {
    std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write checkpoint: " + tmp_path);
    out.write(reinterpret_cast<const char*>(w.bytes().data()),
              static_cast<std::streamsize>(w.bytes().size()));
    out.write(reinterpret_cast<const char*>(&checksum), 4);
    out.flush();
    if (!out) {
      std::remove(tmp_path.c_str());
      throw InputError("failed while writing checkpoint: " + tmp_path);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp_path, path, ec);
  if (ec) {
    std::remove(tmp_path.c_str());
    throw InputError("cannot move checkpoint into place: " + ec.message());
  }
}

StreamState load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open checkpoint: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());

  if (bytes.size() < sizeof(kCheckpointMagic) + 4 + 4) {
    throw IntegrityError(path + ": checkpoint is truncated");
  }
  if (std::memcmp(bytes.data(), kCheckpointMagic, sizeof(kCheckpointMagic)) != 0) {
    throw IntegrityError(path + ": not a checkpoint file (bad magic bytes)");
  }

  std::uint32_t stored_crc;
  std::memcpy(&stored_crc, bytes.data() + bytes.size() - 4, 4);
  const std::uint32_t actual_crc = crc32(bytes.data(), bytes.size() - 4);
  if (stored_crc != actual_crc) {
    throw IntegrityError(path + ": checksum mismatch, checkpoint is corrupted");
  }

  Reader r(bytes.data(), bytes.size() - 4);
  char magic[8];
  r.raw(magic, 8);
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw IntegrityError(path + ": checkpoint format version " + std::to_string(version) +
                         " needs migration; this build reads version " +
                         std::to_string(kCheckpointVersion));
  }

  StreamState state;
  state.config = read_config(r);
  state.config.validate();
  const ModelDims& dims = state.config.dims;

  if (state.config.model == ModelKind::kLinear) {
    LinearOutcomeState linear;
    linear.dims = dims;
    const int d = linear.cols();
    linear.n_batches = r.i64();
    linear.n_obs = r.i64();
    linear.coef = r.vec(d);
    linear.info = r.mat(d, d);
    linear.yy_sum = r.f64();
    linear.resid_var = r.f64();
    state.outcome = std::move(linear);
  } else {
    LogisticOutcomeState logistic;
    logistic.dims = dims;
    const int d = logistic.cols();
    logistic.n_batches = r.i64();
    logistic.n_obs = r.i64();
    logistic.newton.tol = r.f64();
    logistic.newton.max_iter = static_cast<int>(r.u32());
    logistic.newton.step_halving = r.u8() != 0;
    logistic.coef = r.vec(d);
    logistic.info = r.mat(d, d);
    state.outcome = std::move(logistic);
  }

  MediatorState med;
  med.dims = dims;
  const int dm = med.cols();
  med.n_batches = r.i64();
  med.n_obs = r.i64();
  med.info = r.mat(dm, dm);
  med.coef = r.mat(dm, dims.n_mediators);
  med.ww_sum = r.vec(dims.n_mediators);
  med.resid_var = r.vec(dims.n_mediators);
  state.mediators = std::move(med);

  if (!r.exhausted()) throw IntegrityError(path + ": trailing bytes after state block");
  return state;
}

}  // namespace medstream
