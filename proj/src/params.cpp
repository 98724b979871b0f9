// Copyright 2026 The FastGCL Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "params.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace fastgcl {

namespace {

constexpr char kMagic[8] = {'F', 'G', 'C', 'L', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

template <typename T>
void write_pod(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const std::filesystem::path& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) fail(ErrorCode::kCheckpoint, "truncated checkpoint " + path.string());
  return v;
}

}  // namespace

void ParamSet::add(std::string name, Matrix value) {
  require(!contains(name), "duplicate parameter name " + name);
  tensors_.push_back({std::move(name), std::move(value)});
}

void ParamSet::append(const ParamSet& other) {
  for (const auto& t : other.tensors_) add(t.name, t.value);
}

std::optional<std::size_t> ParamSet::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < tensors_.size(); ++i)
    if (tensors_[i].name == name) return i;
  return std::nullopt;
}

const Matrix& ParamSet::at(std::string_view name) const {
  const auto i = index_of(name);
  if (!i) fail(ErrorCode::kInvalidArgument, "unknown parameter " + std::string(name));
  return tensors_[*i].value;
}

Matrix& ParamSet::at(std::string_view name) {
  return const_cast<Matrix&>(static_cast<const ParamSet&>(*this).at(name));
}

std::size_t ParamSet::num_values() const {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += t.value.size();
  return n;
}

bool ParamSet::all_finite() const {
  for (const auto& t : tensors_)
    if (!t.value.all_finite()) return false;
  return true;
}

bool operator==(const ParamSet& a, const ParamSet& b) {
  if (a.tensors_.size() != b.tensors_.size()) return false;
  for (std::size_t i = 0; i < a.tensors_.size(); ++i) {
    if (a.tensors_[i].name != b.tensors_[i].name) return false;
    const auto& x = a.tensors_[i].value;
    const auto& y = b.tensors_[i].value;
    if (!x.same_shape(y)) return false;
    if (!x.empty() && std::memcmp(x.data().data(), y.data().data(), x.size() * sizeof(double)) != 0) return false;
  }
  return true;
}

BoundParams::BoundParams(ad::Tape& tape, const ParamSet& params, bool differentiable) : params_(&params) {
  vars_.reserve(params.size());
  for (const auto& t : params.tensors())
    vars_.push_back(differentiable ? tape.parameter(t.value) : tape.constant(t.value));
}

BoundParams::BoundParams(const ParamSet& params, std::vector<ad::Var> vars)
    : params_(&params), vars_(std::move(vars)) {
  require(vars_.size() == params.size(), "BoundParams: var count does not match params");
}

ad::Var BoundParams::operator[](std::string_view name) const {
  const auto i = params_->index_of(name);
  if (!i) fail(ErrorCode::kInvalidArgument, "unknown parameter " + std::string(name));
  return vars_[*i];
}

Matrix glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Matrix w(fan_in, fan_out);
  for (auto& x : w.data()) x = rng.uniform(-bound, bound);
  return w;
}

void save_checkpoint(const ParamSet& params, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write checkpoint " + path.string());
  out.write(kMagic, sizeof(kMagic));
  write_pod<std::uint32_t>(out, kVersion);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& t : params.tensors()) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    write_pod<std::uint64_t>(out, t.value.rows());
    write_pod<std::uint64_t>(out, t.value.cols());
    out.write(reinterpret_cast<const char*>(t.value.data().data()),
              static_cast<std::streamsize>(t.value.size() * sizeof(double)));
  }
  if (!out) fail(ErrorCode::kIo, "failed writing checkpoint " + path.string());
}

ParamSet load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open checkpoint " + path.string());
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    fail(ErrorCode::kCheckpoint, path.string() + " is not a checkpoint file");
  if (read_pod<std::uint32_t>(in, path) != kVersion)
    fail(ErrorCode::kCheckpoint, "unsupported checkpoint version in " + path.string());
  const auto count = read_pod<std::uint32_t>(in, path);
  ParamSet params;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = read_pod<std::uint32_t>(in, path);
    if (len > 4096) fail(ErrorCode::kCheckpoint, "corrupt tensor name in " + path.string());
    std::string name(len, '\0');
    in.read(name.data(), len);
    const auto rows = read_pod<std::uint64_t>(in, path);
    const auto cols = read_pod<std::uint64_t>(in, path);
    if (rows > (1u << 24) || cols > (1u << 24)) fail(ErrorCode::kCheckpoint, "corrupt tensor shape in " + path.string());
    std::vector<double> data(rows * cols);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
    if (!in) fail(ErrorCode::kCheckpoint, "truncated checkpoint " + path.string());
    params.add(std::move(name), Matrix(rows, cols, std::move(data)));
  }
  return params;
}

}  // namespace fastgcl
