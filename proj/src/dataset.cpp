#include "credaug/dataset.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "credaug/csv.hpp"
#include "credaug/error.hpp"
#include "credaug/rng.hpp"

namespace credaug {

std::vector<std::string> FeatureSchema::feature_names() const {
  std::vector<std::string> out;
  out.reserve(features.size());
  for (const auto& f : features) out.push_back(f.name);
  return out;
}

void FeatureSchema::validate() const {
  if (features.empty()) throw SchemaError("schema has no features");
  std::set<std::string> seen;
  for (const auto& f : features) {
    if (f.name.empty()) throw SchemaError("feature with empty name");
    if (!seen.insert(f.name).second) {
      throw SchemaError("duplicate feature name '" + f.name + "'");
    }
    if (f.cap_low && f.cap_high && !(*f.cap_low < *f.cap_high)) {
      throw SchemaError("feature '" + f.name + "' has cap_low >= cap_high");
    }
    if (f.kind == FeatureKind::kDiscreteInteger) {
      for (const auto& cap : {f.cap_low, f.cap_high}) {
        if (cap && std::trunc(*cap) != *cap) {
          throw SchemaError("discrete feature '" + f.name +
                            "' has a non-integer cap");
        }
      }
    }
  }
  if (target_name.empty()) throw SchemaError("schema has no target name");
  if (seen.contains(target_name)) {
    throw SchemaError("target '" + target_name + "' is also a feature");
  }
}

std::size_t Dataset::positives() const noexcept {
  return static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
}

Matrix Dataset::rows_with_label(int label) const {
  Matrix out(0, X.cols());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == label) out.append_row(X.row(i));
  }
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.schema = schema;
  out.X = X.select_rows(indices);
  out.y.reserve(indices.size());
  for (auto i : indices) out.y.push_back(y[i]);
  return out;
}

void Dataset::validate() const {
  if (X.rows() != y.size()) {
    throw SchemaError("feature rows (" + std::to_string(X.rows()) +
                      ") != label count (" + std::to_string(y.size()) + ")");
  }
  if (X.rows() > 0 && X.cols() != schema.size()) {
    throw SchemaError("matrix width does not match schema arity");
  }
  for (int label : y) {
    if (label != 0 && label != 1) throw SchemaError("labels must be 0 or 1");
  }
}

namespace {

bool parse_number(std::string_view field, double& out) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
    field.remove_prefix(1);
  }
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) {
    field.remove_suffix(1);
  }
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(),
                                   out);
  return ec == std::errc() && ptr == field.data() + field.size() &&
         std::isfinite(out);
}

void append_number(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

LoadResult load_csv(const std::filesystem::path& path,
                    const FeatureSchema& schema) {
  schema.validate();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open data file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  CsvReader reader(text);
  std::vector<std::string> header;
  if (!reader.next(header)) {
    throw EmptyDatasetError("data file '" + path.string() + "' is empty");
  }
  std::unordered_map<std::string, std::size_t> column_of;
  for (std::size_t c = 0; c < header.size(); ++c) column_of[header[c]] = c;

  std::vector<std::size_t> feature_cols;
  for (const auto& f : schema.features) {
    auto it = column_of.find(f.name);
    if (it == column_of.end()) {
      throw SchemaError("column '" + f.name + "' missing from '" +
                        path.string() + "'");
    }
    feature_cols.push_back(it->second);
  }
  auto target_it = column_of.find(schema.target_name);
  if (target_it == column_of.end()) {
    throw SchemaError("target column '" + schema.target_name +
                      "' missing from '" + path.string() + "'");
  }
  const std::size_t target_col = target_it->second;

  LoadResult result;
  result.data.schema = schema;
  result.data.X = Matrix(0, schema.size());
  std::vector<std::string> fields;
  std::vector<double> row(schema.size());
  while (reader.next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    ++result.rows_read;
    bool ok = true;
    for (std::size_t j = 0; j < feature_cols.size() && ok; ++j) {
      ok = feature_cols[j] < fields.size() &&
           parse_number(fields[feature_cols[j]], row[j]);
    }
    double label = 0;
    ok = ok && target_col < fields.size() &&
         parse_number(fields[target_col], label) &&
         (label == 0.0 || label == 1.0);
    if (!ok) {
      ++result.rows_dropped;
      continue;
    }
    result.data.X.append_row(row);
    result.data.y.push_back(static_cast<int>(label));
  }
  if (result.data.rows() == 0) {
    throw EmptyDatasetError("no usable rows in '" + path.string() + "'");
  }
  return result;
}

void write_csv(const std::filesystem::path& path, const Dataset& d) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  std::string line;
  std::vector<std::string> header = d.schema.feature_names();
  header.push_back(d.schema.target_name);
  out << csv_join(header) << '\n';
  for (std::size_t i = 0; i < d.rows(); ++i) {
    line.clear();
    for (double v : d.X.row(i)) {
      append_number(line, v);
      line.push_back(',');
    }
    line += std::to_string(d.y[i]);
    out << line << '\n';
  }
}

Dataset apply_caps(const Dataset& d) {
  Dataset out = d;
  for (std::size_t j = 0; j < d.schema.size(); ++j) {
    const auto& f = d.schema.features[j];
    if (!f.cap_low && !f.cap_high) continue;
    const double lo = f.cap_low.value_or(-HUGE_VAL);
    const double hi = f.cap_high.value_or(HUGE_VAL);
    for (std::size_t i = 0; i < out.rows(); ++i) {
      out.X(i, j) = std::clamp(out.X(i, j), lo, hi);
    }
  }
  return out;
}

namespace {

std::size_t round_half_up(double x) {
  // count * fraction can land a few ulps below an exact half.
  return static_cast<std::size_t>(std::floor(x + 0.5 + 1e-9));
}

}  // namespace

SplitResult stratified_split(const Dataset& d, double train_fraction,
                             std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw StratificationError("train_fraction must lie in (0, 1)");
  }
  d.validate();
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < d.rows(); ++i) by_class[d.y[i]].push_back(i);
  for (int c = 0; c < 2; ++c) {
    if (by_class[c].size() < 2) {
      throw StratificationError("class " + std::to_string(c) + " has " +
                                std::to_string(by_class[c].size()) +
                                " members; stratification needs at least 2");
    }
  }

  std::size_t n_train[2];
  for (int c = 0; c < 2; ++c) {
    n_train[c] = round_half_up(static_cast<double>(by_class[c].size()) *
                               train_fraction);
  }
  const std::size_t target =
      round_half_up(static_cast<double>(d.rows()) * train_fraction);
  const int larger = by_class[1].size() > by_class[0].size() ? 1 : 0;
  const std::size_t allocated = n_train[0] + n_train[1];
  if (allocated > target) {
    n_train[larger] -= allocated - target;
  } else {
    n_train[larger] += target - allocated;
  }
  for (int c = 0; c < 2; ++c) {
    n_train[c] = std::clamp<std::size_t>(n_train[c], 1, by_class[c].size() - 1);
  }

  SplitResult result;
  result.train_fraction = train_fraction;
  result.seed = seed;
  for (int c = 0; c < 2; ++c) {
    auto& members = by_class[c];
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
    rng.shuffle(std::span<std::size_t>(members));
    result.train_indices.insert(result.train_indices.end(), members.begin(),
                                members.begin() + n_train[c]);
    result.test_indices.insert(result.test_indices.end(),
                               members.begin() + n_train[c], members.end());
  }
  std::sort(result.train_indices.begin(), result.train_indices.end());
  std::sort(result.test_indices.begin(), result.test_indices.end());
  result.train = d.subset(result.train_indices);
  result.test = d.subset(result.test_indices);
  return result;
}

ScalerParams fit_scaler(const Dataset& train) {
  train.validate();
  const std::size_t n = train.rows();
  if (n < 2) throw DegenerateScaleError("scaler needs at least 2 rows");
  ScalerParams s;
  s.means.assign(train.X.cols(), 0.0);
  s.std_devs.assign(train.X.cols(), 0.0);
  for (std::size_t j = 0; j < train.X.cols(); ++j) {
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) sum += train.X(i, j);
    const double mean = sum / static_cast<double>(n);
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dev = train.X(i, j) - mean;
      ss += dev * dev;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
      const std::string name = j < train.schema.size()
                                   ? train.schema.features[j].name
                                   : std::to_string(j);
      throw DegenerateScaleError("feature '" + name +
                                 "' is constant on the training rows");
    }
    s.means[j] = mean;
    s.std_devs[j] = sd;
  }
  return s;
}

Matrix transform(const Matrix& X, const ScalerParams& s) {
  if (X.cols() != s.size()) throw SchemaError("scaler arity mismatch");
  Matrix out = X;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    auto r = out.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      r[j] = (r[j] - s.means[j]) / s.std_devs[j];
    }
  }
  return out;
}

Matrix inverse_transform(const Matrix& X, const ScalerParams& s) {
  if (X.cols() != s.size()) throw SchemaError("scaler arity mismatch");
  Matrix out = X;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    auto r = out.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      r[j] = r[j] * s.std_devs[j] + s.means[j];
    }
  }
  return out;
}

Dataset transform(const Dataset& d, const ScalerParams& s) {
  if (d.schema.size() != s.size()) throw SchemaError("scaler arity mismatch");
  Dataset out = d;
  out.X = transform(d.X, s);
  return out;
}

Dataset inverse_transform(const Dataset& d, const ScalerParams& s) {
  if (d.schema.size() != s.size()) throw SchemaError("scaler arity mismatch");
  Dataset out = d;
  out.X = inverse_transform(d.X, s);
  return out;
}

std::string digest(const Dataset& d) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(
      EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  const std::uint64_t shape[2] = {d.X.rows(), d.X.cols()};
  EVP_DigestUpdate(ctx.get(), shape, sizeof(shape));
  EVP_DigestUpdate(ctx.get(), d.X.flat().data(),
                   d.X.flat().size() * sizeof(double));
  EVP_DigestUpdate(ctx.get(), d.y.data(), d.y.size() * sizeof(int));
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[md[i] >> 4]);
    hex.push_back(kHex[md[i] & 0xf]);
  }
  return hex;
}

}  // namespace credaug
