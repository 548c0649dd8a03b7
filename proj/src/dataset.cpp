#include "litm/dataset.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "binio.hpp"
#include "fsutil.hpp"

namespace litm {

void Dataset::validate() const {
  if (n_ids < 1 || samples_per_id < 1 || d_in < 1 || descriptors_per_sample < 1)
    fail(ErrorCode::inconsistent, "dataset: non-positive header field");
  const std::size_t expected =
      static_cast<std::size_t>(n_ids) * static_cast<std::size_t>(samples_per_id);
  if (samples.size() != expected)
    fail(ErrorCode::inconsistent,
         "dataset: header declares " + std::to_string(expected) + " records, got " +
             std::to_string(samples.size()));
  std::vector<int> per_id(n_ids, 0);
  for (const auto& s : samples) {
    if (s.identity < 0 || s.identity >= n_ids)
      fail(ErrorCode::inconsistent, "dataset: identity out of range");
    ++per_id[s.identity];
    if (static_cast<int>(s.descriptors.size()) != descriptors_per_sample)
      fail(ErrorCode::inconsistent, "dataset: descriptor count mismatch");
    for (const auto& d : s.descriptors) {
      if (static_cast<int>(d.size()) != d_in)
        fail(ErrorCode::inconsistent, "dataset: descriptor dimension mismatch");
      for (double v : d)
        if (!std::isfinite(v)) fail(ErrorCode::inconsistent, "dataset: non-finite value");
    }
  }
  for (int u = 0; u < n_ids; ++u)
    if (per_id[u] != samples_per_id)
      fail(ErrorCode::inconsistent,
           "dataset: identity " + std::to_string(u) + " has " + std::to_string(per_id[u]) +
               " samples, expected " + std::to_string(samples_per_id));
}

std::vector<std::vector<int>> Dataset::indices_by_identity() const {
  std::vector<std::vector<int>> by_id(n_ids);
  for (int i = 0; i < static_cast<int>(samples.size()); ++i)
    by_id[samples[i].identity].push_back(i);
  return by_id;
}

void SynthConfig::validate() const {
  if (n_ids < 4) fail(ErrorCode::config, "synth: n_ids must be >= 4");
  if (samples_per_id < 2) fail(ErrorCode::config, "synth: samples_per_id must be >= 2");
  if (d_in < 1) fail(ErrorCode::config, "synth: d_in must be >= 1");
  if (descriptors_per_sample < 1) fail(ErrorCode::config, "synth: descriptors_per_sample must be >= 1");
  if (sigma_within < 0.0) fail(ErrorCode::config, "synth: sigma_within must be >= 0");
  if (hard_pair_fraction < 0.0 || hard_pair_fraction > 1.0)
    fail(ErrorCode::config, "synth: hard_pair_fraction must be in [0, 1]");
  if (twin_distance <= 0.0) fail(ErrorCode::config, "synth: twin_distance must be > 0");
  // Twins must be closer than ordinary identities; the typical distance of
  // two uniform points in the unit d-cube is sqrt(d/6).
  if (twin_distance >= std::sqrt(static_cast<double>(d_in) / 6.0))
    fail(ErrorCode::config, "synth: twin_distance must be below the typical inter-center distance");
}

namespace {

Vec random_unit_vector(int d, RandomSource& rng) {
  Vec u(d);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (int k = 0; k < d; ++k) {
      u[k] = rng.normal();
      norm2 += u[k] * u[k];
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : u) x *= inv;
  return u;
}

double center_distance(const Vec& a, const Vec& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace

Dataset generate(const SynthConfig& cfg) {
  cfg.validate();
  RandomSource rng(cfg.seed);

  // Pair off twins: round(hard_pair_fraction * n_ids / 2) pairs over a random
  // permutation of the identities.
  std::vector<int> perm(cfg.n_ids);
  for (int i = 0; i < cfg.n_ids; ++i) perm[i] = i;
  rng.shuffle(perm);
  const int n_pairs =
      static_cast<int>(std::llround(cfg.hard_pair_fraction * cfg.n_ids / 2.0));
  std::vector<int> twin_of(cfg.n_ids, -1);  // partner whose center anchors this id
  for (int p = 0; p < n_pairs; ++p) twin_of[perm[2 * p + 1]] = perm[2 * p];

  // Base centers are uniform in the unit cube, rejection-sampled to stay at
  // least 2 * twin_distance apart so twins are unambiguously the closest pairs.
  const double min_sep = 2.0 * cfg.twin_distance;
  std::vector<Vec> centers(cfg.n_ids);
  std::vector<int> placed;
  for (int u = 0; u < cfg.n_ids; ++u) {
    if (twin_of[u] >= 0) continue;
    int attempts = 0;
    for (;;) {
      Vec c(cfg.d_in);
      for (int k = 0; k < cfg.d_in; ++k) c[k] = rng.uniform();
      bool ok = true;
      for (int v : placed)
        if (center_distance(c, centers[v]) < min_sep) {
          ok = false;
          break;
        }
      if (ok) {
        centers[u] = std::move(c);
        placed.push_back(u);
        break;
      }
      if (++attempts > 10000)
        fail(ErrorCode::config, "synth: cannot place identity centers with the required separation");
    }
  }
  for (int u = 0; u < cfg.n_ids; ++u) {
    if (twin_of[u] < 0) continue;
    const Vec dir = random_unit_vector(cfg.d_in, rng);
    Vec c = centers[twin_of[u]];
    for (int k = 0; k < cfg.d_in; ++k) c[k] += cfg.twin_distance * dir[k];
    centers[u] = std::move(c);
  }

  Dataset ds;
  ds.n_ids = cfg.n_ids;
  ds.samples_per_id = cfg.samples_per_id;
  ds.d_in = cfg.d_in;
  ds.descriptors_per_sample = cfg.descriptors_per_sample;
  ds.samples.reserve(static_cast<std::size_t>(cfg.n_ids) * cfg.samples_per_id);
  for (int u = 0; u < cfg.n_ids; ++u)
    for (int s = 0; s < cfg.samples_per_id; ++s) {
      Sample sample;
      sample.identity = u;
      sample.descriptors.resize(cfg.descriptors_per_sample);
      for (auto& d : sample.descriptors) {
        d.resize(cfg.d_in);
        for (int k = 0; k < cfg.d_in; ++k)
          d[k] = centers[u][k] + rng.normal(0.0, cfg.sigma_within);
      }
      ds.samples.push_back(std::move(sample));
    }
  return ds;
}

// --- file format -----------------------------------------------------------
//
//   LITMDS 1 <n_ids> <samples_per_id> <d_in> <R>\n
//   then n_ids*samples_per_id records: u32 identity, R*d_in f64, little-endian

static constexpr const char* kDatasetMagic = "LITMDS";
static constexpr int kDatasetVersion = 1;

void save_dataset(const Dataset& ds, const std::string& path) {
  ds.validate();
  detail::atomic_write(path, [&](std::ostream& os) {
    os << kDatasetMagic << ' ' << kDatasetVersion << ' ' << ds.n_ids << ' '
       << ds.samples_per_id << ' ' << ds.d_in << ' ' << ds.descriptors_per_sample
       << '\n';
    for (const auto& s : ds.samples) {
      detail::write_u32le(os, static_cast<std::uint32_t>(s.identity));
      for (const auto& d : s.descriptors)
        for (double v : d) detail::write_f64le(os, v);
    }
  });
}

Dataset load_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::io, "cannot open dataset: " + path);

  std::string header;
  if (!std::getline(is, header)) fail(ErrorCode::truncated, "dataset: missing header");
  std::istringstream hs(header);
  std::string magic;
  int version = 0;
  Dataset ds;
  hs >> magic >> version >> ds.n_ids >> ds.samples_per_id >> ds.d_in >>
      ds.descriptors_per_sample;
  if (!hs || magic != kDatasetMagic)
    fail(ErrorCode::format_version, "dataset: not a " + std::string(kDatasetMagic) + " file");
  if (version != kDatasetVersion)
    fail(ErrorCode::format_version,
         "dataset: unsupported format version " + std::to_string(version));
  if (ds.n_ids < 1 || ds.samples_per_id < 1 || ds.d_in < 1 || ds.descriptors_per_sample < 1)
    fail(ErrorCode::inconsistent, "dataset: bad header field");

  const std::size_t n_records =
      static_cast<std::size_t>(ds.n_ids) * static_cast<std::size_t>(ds.samples_per_id);
  ds.samples.reserve(n_records);
  for (std::size_t i = 0; i < n_records; ++i) {
    Sample s;
    std::uint32_t id = 0;
    if (!detail::read_u32le(is, id))
      fail(ErrorCode::truncated, "dataset: truncated at record " + std::to_string(i));
    s.identity = static_cast<int>(id);
    s.descriptors.assign(ds.descriptors_per_sample, Vec(ds.d_in));
    for (auto& d : s.descriptors)
      for (double& v : d)
        if (!detail::read_f64le(is, v))
          fail(ErrorCode::truncated, "dataset: truncated at record " + std::to_string(i));
    ds.samples.push_back(std::move(s));
  }
  if (is.peek() != std::ifstream::traits_type::eof())
    fail(ErrorCode::inconsistent, "dataset: trailing bytes after declared records");

  ds.validate();
  return ds;
}

Dataset load_dataset_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::io, "cannot open csv: " + path);

  std::vector<std::pair<long long, Vec>> rows;
  std::string line;
  std::size_t dim = 0;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() < 2)
      fail(ErrorCode::inconsistent, "csv line " + std::to_string(lineno) + ": need identity plus values");
    long long id;
    Vec values(cells.size() - 1);
    try {
      id = std::stoll(cells[0]);
      for (std::size_t k = 1; k < cells.size(); ++k) values[k - 1] = std::stod(cells[k]);
    } catch (const std::exception&) {
      fail(ErrorCode::inconsistent, "csv line " + std::to_string(lineno) + ": unparsable field");
    }
    if (id < 0)
      fail(ErrorCode::inconsistent, "csv line " + std::to_string(lineno) + ": negative identity");
    if (dim == 0)
      dim = values.size();
    else if (values.size() != dim)
      fail(ErrorCode::inconsistent, "csv line " + std::to_string(lineno) + ": column count varies");
    rows.emplace_back(id, std::move(values));
  }
  if (rows.empty()) fail(ErrorCode::truncated, "csv: no data rows");

  // Remap external labels onto a dense 0-based range.
  std::map<long long, int> remap;
  for (const auto& [id, _] : rows) remap.emplace(id, 0);
  int next = 0;
  for (auto& [id, dense] : remap) dense = next++;

  Dataset ds;
  ds.n_ids = next;
  ds.d_in = static_cast<int>(dim);
  ds.descriptors_per_sample = 1;
  std::vector<int> per_id(ds.n_ids, 0);
  for (auto& [id, values] : rows) {
    Sample s;
    s.identity = remap[id];
    ++per_id[s.identity];
    s.descriptors.push_back(std::move(values));
    ds.samples.push_back(std::move(s));
  }
  ds.samples_per_id = per_id[0];
  for (int u = 0; u < ds.n_ids; ++u)
    if (per_id[u] != ds.samples_per_id)
      fail(ErrorCode::inconsistent, "csv: identities contribute unequal row counts");

  ds.validate();
  return ds;
}

}  // namespace litm
